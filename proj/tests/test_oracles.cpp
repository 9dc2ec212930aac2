#include <gtest/gtest.h>

#include <random>

#include "support/brute_force.hpp"
#include "tpk/polytope.hpp"
#include "tpk/testing/oracles.hpp"

using namespace tpk;
using namespace tpk::testing::oracles;
using test::rel_diff;

namespace {

IndexSequence seq(std::size_t d, std::vector<std::size_t> s) { return IndexSequence(d, std::move(s)); }

BinaryVector random_binary(std::mt19937_64& gen, std::size_t n) {
    std::vector<int> bits(n);
    for (auto& b : bits) b = static_cast<int>(gen() & 1);
    return BinaryVector(bits);
}

IndexSequence random_sequence(std::mt19937_64& gen, std::size_t d, std::size_t n) {
    std::vector<std::size_t> s(n);
    for (auto& v : s) v = 1 + gen() % d;
    return IndexSequence(d, s);
}

WeightSpec random_weight(std::mt19937_64& gen, std::size_t d) {
    return WeightSpec::from_weight(test::random_psd_weight(gen, d));
}

}  // namespace

TEST(K1, Examples) {
    const auto w = WeightSpec::from_weight(Matrix<double>{{0.5, 0.25}, {0.125, 2.0}});
    EXPECT_EQ(k1(seq(2, {2}), seq(2, {1}), w), 0.125);
    const auto ones = WeightSpec::from_weight(Matrix<double>(3, 3, 1.0));
    EXPECT_EQ(k1(seq(3, {1, 2, 3, 3}), seq(3, {3, 3, 1, 2}), ones), 1.0);
    EXPECT_THROW(k1(seq(2, {1}), seq(2, {1, 1}), w), Error);
}

TEST(K1, DependsOnlyOnPattern) {
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + gen() % 4, n = gen() % 9;
        const auto w = random_weight(gen, d);
        const auto rho = random_sequence(gen, d, n), gamma = random_sequence(gen, d, n);
        EXPECT_LT(rel_diff(k1(rho, gamma, w), table_weight(chi(rho, gamma), w)), 1e-13);
    }
}

TEST(K2, Examples) {
    EXPECT_EQ(k2(seq(1, {1}), seq(1, {1})), 1);
    EXPECT_EQ(k2(seq(2, {1, 2}), seq(2, {1, 2})), 1);
    // r = c = [2]: 2! / (2! 2!)
    EXPECT_EQ(k2(seq(1, {1, 1}), seq(1, {1, 1})), BigRational(1, 2));
}

TEST(K2, InverseOfFisherYates) {
    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + gen() % 4, n = gen() % 9;
        const auto rho = random_sequence(gen, d, n), gamma = random_sequence(gen, d, n);
        EXPECT_EQ(k2(rho, gamma) * BigRational(fisher_yates(chi(rho, gamma))), 1);
    }
}

TEST(FactorialKernelExpansion, Examples) {
    EXPECT_EQ(factorial_kernel_expansion({1, 1, 1}, {1, 1, 1}), std::make_pair(BigCount(6), BigCount(6)));
    EXPECT_EQ(factorial_kernel_expansion({0, 0, 0, 0}, {1, 0, 1, 1}), std::make_pair(BigCount(1), BigCount(1)));
    EXPECT_THROW(factorial_kernel_expansion({1}, {1, 0}), Error);
    EXPECT_THROW(BinaryVector({0, 2}), Error);
}

TEST(FactorialKernelExpansion, RandomPairsAgree) {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = gen() % 13;
        const auto [direct, product] = factorial_kernel_expansion(random_binary(gen, n), random_binary(gen, n));
        EXPECT_EQ(direct, product);
    }
}

TEST(FactorialProduct, IndicatorDecompositionExhaustive) {
    // prod x_ij! = prod <rho^i, gamma^j>! = prod_t (1 + k_t), over all
    // sequence pairs for small d and N.
    for (std::size_t d = 1; d <= 2; ++d)
        for (std::size_t n = 0; n <= 6; ++n) {
            std::size_t total = 1;
            for (std::size_t k = 0; k < n; ++k) total *= d;
            for (std::size_t a = 0; a < total; ++a)
                for (std::size_t b = 0; b < total; ++b) {
                    std::vector<std::size_t> s(n), t(n);
                    for (std::size_t k = 0, x = a, y = b; k < n; ++k, x /= d, y /= d) {
                        s[k] = 1 + x % d;
                        t[k] = 1 + y % d;
                    }
                    const IndexSequence rho(d, s), gamma(d, t);
                    const BigCount direct = factorial_product(chi(rho, gamma));
                    ASSERT_EQ(direct, factorial_product_by_indicators(rho, gamma));
                    ASSERT_EQ(direct, factorial_product_by_recursion(rho, gamma));
                }
        }
}

TEST(FactorialProduct, IndicatorDecompositionRandomLargerAlphabet) {
    std::mt19937_64 gen(4);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = 3 + gen() % 2, n = gen() % 9;
        const auto rho = random_sequence(gen, d, n), gamma = random_sequence(gen, d, n);
        const BigCount direct = factorial_product(chi(rho, gamma));
        EXPECT_EQ(direct, factorial_product_by_indicators(rho, gamma));
        EXPECT_EQ(direct, factorial_product_by_recursion(rho, gamma));
    }
}

TEST(Kappa, InvariantUnderJointPositionPermutation) {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + gen() % 4, n = 1 + gen() % 8;
        const auto w = random_weight(gen, d);
        const auto rho = random_sequence(gen, d, n), gamma = random_sequence(gen, d, n);
        std::vector<std::size_t> image(n);
        std::iota(image.begin(), image.end(), std::size_t{0});
        std::shuffle(image.begin(), image.end(), gen);
        const Permutation pi(image);
        EXPECT_LT(rel_diff(kappa(rho.permuted(pi), gamma.permuted(pi), w), kappa(rho, gamma, w)), 1e-13);
    }
}

TEST(PermutationSumOracle, Examples) {
    const double a = 0.6, b = 0.3;
    const auto w2 = WeightSpec::from_weight(Matrix<double>{{a, b}, {b, a}});
    EXPECT_NEAR(permutation_sum_oracle({1, 1}, {1, 1}, w2), a * a + b * b, 1e-15);
    EXPECT_NEAR(weighted_volume({1, 1}, {1, 1}, w2), a * a + b * b, 1e-15);

    const auto w1 = WeightSpec::from_weight(Matrix<double>{{0.7}});
    EXPECT_NEAR(permutation_sum_oracle({2}, {2}, w1) / 4.0, 0.49, 1e-15);
    EXPECT_NEAR(weighted_volume({2}, {2}, w1), 0.49, 1e-15);

    const auto ones = WeightSpec::from_weight(Matrix<double>(3, 3, 1.0));
    const Histogram r{2, 1, 1}, c{1, 0, 3};
    EXPECT_EQ(permutation_sum_oracle(r, c, ones) / static_cast<double>(marginal_factorial_product(r, c)),
              static_cast<double>(count_tables(r, c)));
}

TEST(PermutationSumOracle, ReproducesWeightedVolume) {
    std::mt19937_64 gen(6);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t d = 1 + gen() % 3;
        const count_t n = static_cast<count_t>(gen() % 7);
        const auto w = random_weight(gen, d);
        const auto r = test::random_histogram(gen, d, n);
        const auto c = test::random_histogram(gen, d, n);
        const double t = weighted_volume(r, c, w);
        const double scaled = permutation_sum_oracle(r, c, w) / static_cast<double>(marginal_factorial_product(r, c));
        EXPECT_LT(rel_diff(scaled, t), 1e-10);
        EXPECT_LT(rel_diff(normalized_permutation_sum(r, c, w), t), 1e-10);
    }
}

TEST(PermutationSumOracle, Guards) {
    const auto w = WeightSpec::from_weight(Matrix<double>(2, 2, 1.0));
    EXPECT_THROW(permutation_sum_oracle({9, 0}, {4, 5}, w), Error);
    EXPECT_THROW(permutation_sum_oracle({1, 0}, {1, 1}, w), Error);
}

TEST(SymmetrizationOracle, SingletonAndScaling) {
    std::mt19937_64 gen(8);
    const auto k = test::random_psd_weight(gen, 2);
    const std::vector<Histogram> one{{2, 1}};
    const auto g1 = symmetrization_oracle(one, WeightSpec::from_weight(k));
    ASSERT_EQ(g1.size(), 1u);
    EXPECT_GT(g1(0, 0), 0.0);

    const auto hs = test::simplex(2, 3);
    const auto g = symmetrization_oracle(hs, WeightSpec::from_weight(k));
    Matrix<double> k3 = k;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) k3(i, j) *= 3.0;
    const auto g3 = symmetrization_oracle(hs, WeightSpec::from_weight(k3));
    for (std::size_t p = 0; p < hs.size(); ++p)
        for (std::size_t q = 0; q < hs.size(); ++q) EXPECT_LT(rel_diff(g3(p, q), 27.0 * g(p, q)), 1e-12);
    const auto c = certify_psd(g, 1e-10), c3 = certify_psd(g3, 1e-10);
    EXPECT_TRUE(c.pass);
    EXPECT_TRUE(c3.pass);
}

TEST(SymmetrizationOracle, GramOverSimplexIsPsd) {
    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 20; ++trial) {
        const auto w = WeightSpec::from_weight(test::random_psd_weight(gen, 2, 1 + gen() % 2));
        const auto all = test::simplex(2, 3);
        std::vector<Histogram> hs(all.begin(), all.begin() + 1 + static_cast<long>(gen() % all.size()));
        const auto cert = certify_psd(symmetrization_oracle(hs, w), 1e-10);
        EXPECT_TRUE(cert.pass) << cert.min_eigenvalue;
    }
    const std::vector<Histogram> big{{7, 0}};
    EXPECT_THROW(symmetrization_oracle(big, WeightSpec::from_weight(Matrix<double>(2, 2, 1.0))), Error);
}
