#include <gtest/gtest.h>

#include <sstream>

#include "tpk/io.hpp"

using namespace tpk;

TEST(ReadHistograms, CommentsBlankLinesAndLineNumbers) {
    std::istringstream in("# dataset\n1,2,3\n\n 0, 4 ,2\n# end\n");
    const auto hs = io::read_histograms(in);
    ASSERT_EQ(hs.size(), 2u);
    EXPECT_EQ(hs[0].histogram, (Histogram{1, 2, 3}));
    EXPECT_EQ(hs[1].histogram, (Histogram{0, 4, 2}));
    EXPECT_EQ(hs[1].line, 4u);
}

TEST(ReadHistograms, ParseErrorsNameTheLine) {
    std::istringstream in("1,2\n1,-2\n");
    try {
        io::read_histograms(in, "data.txt");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::parse_error);
        EXPECT_NE(std::string(e.what()).find("data.txt:2"), std::string::npos);
    }
    std::istringstream empty_field("1,,2\n");
    EXPECT_THROW(io::read_histograms(empty_field), Error);
    std::istringstream real("1.5,2\n");
    EXPECT_THROW(io::read_histograms(real), Error);
}

TEST(ReadWeights, ModeHeaderSelectsSide) {
    std::istringstream cost("mode: cost\n0,1\n1,0\n");
    const auto w = io::read_weights(cost);
    EXPECT_EQ(w.origin(), WeightOrigin::cost);
    EXPECT_DOUBLE_EQ(w.weight()(0, 1), std::exp(-1.0));

    std::istringstream weight("# K\nmode: weight\n1, 0.5\n0.5, 1\n");
    const auto k = io::read_weights(weight);
    EXPECT_EQ(k.origin(), WeightOrigin::weight);
    EXPECT_DOUBLE_EQ(k.weight()(1, 0), 0.5);
}

TEST(ReadWeights, OverrideAndErrors) {
    std::istringstream bare("1,2\n3,4\n");
    EXPECT_EQ(io::read_weights(bare, "w", WeightOrigin::weight).origin(), WeightOrigin::weight);
    std::istringstream missing("1,2\n3,4\n");
    EXPECT_THROW(io::read_weights(missing), Error);
    std::istringstream conflict("mode: cost\n1\n");
    EXPECT_THROW(io::read_weights(conflict, "w", WeightOrigin::weight), Error);
    std::istringstream ragged("mode: cost\n1,2\n3\n");
    EXPECT_THROW(io::read_weights(ragged), Error);
    std::istringstream rect("mode: cost\n1,2\n");
    EXPECT_THROW(io::read_weights(rect), Error);
    std::istringstream badmode("mode: kernel\n1\n");
    EXPECT_THROW(io::read_weights(badmode), Error);
}

TEST(MatrixCsv, RoundTripsExactly) {
    Matrix<double> a{{1.0 / 3.0, 2e-300}, {-5.5, 1e17 + 1}};
    std::ostringstream out;
    io::write_matrix_csv(out, a);
    std::istringstream in(out.str());
    EXPECT_EQ(io::read_matrix_csv(in), a);
}
