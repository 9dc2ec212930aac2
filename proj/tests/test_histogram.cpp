#include <gtest/gtest.h>

#include <random>

#include "support/brute_force.hpp"
#include "tpk/histogram.hpp"

using namespace tpk;

namespace {

IndexSequence seq(std::size_t d, std::vector<std::size_t> s) { return IndexSequence(d, std::move(s)); }

}  // namespace

TEST(Histogram, MassAndValidation) {
    Histogram r{3, 3, 2};
    EXPECT_EQ(r.dim(), 3u);
    EXPECT_EQ(r.mass(), 8);
    EXPECT_NO_THROW(Histogram({0, 0}));
    EXPECT_THROW(Histogram(std::vector<count_t>{}), Error);
    EXPECT_THROW(Histogram({1, -1}), Error);
}

TEST(CanonicalSequence, Examples) {
    EXPECT_EQ(canonical_sequence({3, 3, 2}).symbols(), (std::vector<std::size_t>{1, 1, 1, 2, 2, 2, 3, 3}));
    EXPECT_EQ(canonical_sequence({0, 2}).symbols(), (std::vector<std::size_t>{2, 2}));
    EXPECT_EQ(canonical_sequence({1, 0, 1}).symbols(), (std::vector<std::size_t>{1, 3}));
    EXPECT_EQ(canonical_sequence({0, 0, 0}).size(), 0u);
}

TEST(CanonicalSequence, ContentRecoversHistogram) {
    for (const auto& r : test::simplex(3, 5)) EXPECT_EQ(canonical_sequence(r).content(), r);
    for (const auto& r : test::simplex(4, 3)) EXPECT_EQ(canonical_sequence(r).content(), r);
}

TEST(PermutedSequence, Examples) {
    const auto sigma = Permutation::from_one_based({3, 1, 2});
    EXPECT_EQ(permuted_sequence({2, 5, 3}, sigma).symbols(),
              (std::vector<std::size_t>{3, 3, 3, 1, 1, 2, 2, 2, 2, 2}));
    EXPECT_EQ(permuted_sequence({3, 3, 2}, Permutation::identity(3)), canonical_sequence({3, 3, 2}));
    EXPECT_EQ(permuted_sequence({1, 1}, Permutation::from_one_based({2, 1})).symbols(),
              (std::vector<std::size_t>{2, 1}));
}

TEST(PermutedSequence, DimensionMismatch) {
    EXPECT_THROW(permuted_sequence({1, 2, 3}, Permutation::identity(2)), Error);
}

TEST(Chi, WorkedExamples) {
    const auto rho = seq(3, {1, 2, 2, 2, 1, 3, 1, 3});
    const auto gamma = seq(3, {1, 1, 2, 1, 3, 3, 3, 3});
    EXPECT_EQ(chi(rho, gamma).entries(), (Matrix<count_t>{{1, 0, 2}, {2, 1, 0}, {0, 0, 2}}));

    const auto pi = Permutation::from_one_based({3, 6, 8, 5, 2, 1, 4, 7});
    const auto gamma_pi = gamma.permuted(pi);
    EXPECT_EQ(gamma_pi.symbols(), (std::vector<std::size_t>{2, 3, 3, 3, 1, 1, 1, 3}));
    const auto x = chi(rho, gamma_pi);
    EXPECT_EQ(x.entries(), (Matrix<count_t>{{2, 1, 0}, {0, 0, 3}, {1, 0, 1}}));
    EXPECT_EQ(x.row_sums(), (Histogram{3, 3, 2}));
    EXPECT_EQ(x.col_sums(), (Histogram{3, 1, 4}));

    EXPECT_EQ(chi(seq(1, {1, 1}), seq(1, {1, 1})).entries(), (Matrix<count_t>{{2}}));
}

TEST(Chi, EmptySequencesGiveZeroTable) {
    const auto x = chi(canonical_sequence({0, 0}), canonical_sequence({0, 0}));
    EXPECT_EQ(x.entries(), (Matrix<count_t>(2, 2, 0)));
}

TEST(Chi, LengthMismatch) {
    EXPECT_THROW(chi(seq(2, {1, 2}), seq(2, {1})), Error);
    EXPECT_THROW(chi(seq(2, {1}), seq(3, {1})), Error);
}

TEST(Chi, MarginalsConservedUnderPositionPermutations) {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + gen() % 4;
        const count_t n = static_cast<count_t>(gen() % 9);
        const auto r = test::random_histogram(gen, d, n);
        const auto c = test::random_histogram(gen, d, n);
        std::vector<std::size_t> image(static_cast<std::size_t>(n));
        std::iota(image.begin(), image.end(), std::size_t{0});
        std::shuffle(image.begin(), image.end(), gen);
        const auto x = chi(canonical_sequence(r), canonical_sequence(c).permuted(Permutation(image)));
        EXPECT_EQ(x.row_sums(), r);
        EXPECT_EQ(x.col_sums(), c);
    }
}

TEST(Permutation, GroupLaws) {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 1 + gen() % 7;
        auto draw = [&] {
            std::vector<std::size_t> v(d);
            std::iota(v.begin(), v.end(), std::size_t{0});
            std::shuffle(v.begin(), v.end(), gen);
            return Permutation(v);
        };
        const auto a = draw(), b = draw(), c = draw();
        EXPECT_EQ(a.inverse().inverse(), a);
        EXPECT_TRUE(a.compose(a.inverse()).is_identity());
        EXPECT_EQ(a.compose(b).compose(c), a.compose(b.compose(c)));
    }
}

TEST(Permutation, RejectsNonBijections) {
    EXPECT_THROW(Permutation(std::vector<std::size_t>{0, 0}), Error);
    EXPECT_THROW(Permutation::from_one_based({1, 3}), Error);
    EXPECT_THROW(Permutation::from_one_based({0, 1}), Error);
    EXPECT_EQ(Permutation::from_one_based({3, 1, 2}).one_based(), (std::vector<std::size_t>{3, 1, 2}));
}

TEST(ContingencyTable, ValidatesMarginals) {
    EXPECT_NO_THROW(ContingencyTable(Matrix<count_t>{{1, 0}, {0, 1}}, {1, 1}, {1, 1}));
    EXPECT_THROW(ContingencyTable(Matrix<count_t>{{1, 0}, {1, 1}}, {1, 1}, {1, 1}), Error);
    EXPECT_THROW(ContingencyTable(Matrix<count_t>{{1, 0}, {0, 1}}, {1, 1}, {2, 0, 0}), Error);
    const auto x = ContingencyTable::from_entries(Matrix<count_t>{{2, 0, 0}, {3, 1, 1}, {0, 0, 3}});
    EXPECT_EQ(x.row_sums(), (Histogram{2, 5, 3}));
    EXPECT_EQ(x.col_sums(), (Histogram{5, 1, 4}));
    EXPECT_EQ(x.nonzeros(), 5u);
    EXPECT_EQ(x.to_csv_row(), "2,0,0,3,1,1,0,0,3");
}
