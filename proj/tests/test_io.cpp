#include <gtest/gtest.h>

#include <sstream>

#include "xim/io.hpp"

using namespace xim;

TEST(ReadDataset, PlainCommaSeparated) {
    std::istringstream in("1,2\n3,4\n5,6\n");
    const Dataset data = read_dataset(in);
    EXPECT_EQ(data.n(), 3u);
    EXPECT_EQ(data.dims(), 2u);
    EXPECT_DOUBLE_EQ(data.points(2, 1), 6.0);
    EXPECT_TRUE(data.labels.empty());
}

TEST(ReadDataset, HeaderRowSkipped) {
    std::istringstream in("a,b\n3,4\n5,6\n");
    LoadOptions options;
    options.has_header = true;
    const Dataset data = read_dataset(in, options);
    EXPECT_EQ(data.n(), 2u);
    EXPECT_EQ(data.dims(), 2u);
}

TEST(ReadDataset, NonNumericCellNamesRowAndColumn) {
    std::istringstream in("abc,2\n3,4\n");
    try {
        read_dataset(in);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("row 1"), std::string::npos) << msg;
        EXPECT_NE(msg.find("column 1"), std::string::npos) << msg;
    }
}

TEST(ReadDataset, RaggedRowsRejected) {
    std::istringstream in("1,2\n3,4,5\n");
    EXPECT_THROW(read_dataset(in), StructureError);
}

TEST(ReadDataset, WhitespaceDelimited) {
    std::istringstream in("1 2 3\n4 5 6\n");
    const Dataset data = read_dataset(in);
    EXPECT_EQ(data.n(), 2u);
    EXPECT_EQ(data.dims(), 3u);
}

TEST(ReadDataset, LabelColumnExtracted) {
    std::istringstream in("1,2,7\n3,4,9\n");
    LoadOptions options;
    options.label_column = 2;
    const Dataset data = read_dataset(in, options);
    EXPECT_EQ(data.dims(), 2u);
    ASSERT_EQ(data.labels.size(), 2u);
    EXPECT_EQ(data.labels[0], 7);
    EXPECT_EQ(data.labels[1], 9);
}

TEST(ReadDataset, CommentsAndBlankLinesSkipped) {
    std::istringstream in("# header comment\n\n1,2\n\n# middle\n3,4\n");
    const Dataset data = read_dataset(in);
    EXPECT_EQ(data.n(), 2u);
}

TEST(ReadDataset, InfinityRejected) {
    std::istringstream in("1,inf\n");
    EXPECT_THROW(read_dataset(in), DomainError);
}

TEST(RoundTrip, NumericPayloadIsExact) {
    SplitMix64 rng(88);
    Matrix m(7, 3);
    for (size_t i = 0; i < 7; ++i) {
        for (size_t c = 0; c < 3; ++c) {
            m(i, c) = rng.next_normal() * std::pow(10.0, static_cast<double>(rng.next_index(7)) - 3.0);
        }
    }
    std::ostringstream out;
    write_matrix(out, m);
    std::istringstream in(out.str());
    const Matrix back = read_matrix(in);
    ASSERT_EQ(back.rows(), m.rows());
    ASSERT_EQ(back.cols(), m.cols());
    EXPECT_EQ(back.storage(), m.storage());

    // a second round trip is byte-identical
    std::ostringstream out2;
    write_matrix(out2, back);
    EXPECT_EQ(out2.str(), out.str());
}

TEST(Model, RoundTripsThroughText) {
    ModelFile model;
    model.method = "c-xim";
    model.seed = 424242;
    model.config_echo = {"eta=0.3", "t_max=100"};
    model.lattice = build_lattice(2, 3);
    model.prototypes.w = Matrix(6, 4);
    SplitMix64 rng(9);
    for (size_t j = 0; j < 6; ++j) {
        for (size_t c = 0; c < 4; ++c) {
            model.prototypes.w(j, c) = rng.next_normal();
        }
    }

    std::ostringstream out;
    write_model(out, model);
    std::istringstream in(out.str());
    const ModelFile back = read_model(in);
    EXPECT_EQ(back.method, model.method);
    EXPECT_EQ(back.seed, model.seed);
    EXPECT_EQ(back.config_echo, model.config_echo);
    EXPECT_EQ(back.lattice.nodes.storage(), model.lattice.nodes.storage());
    EXPECT_EQ(back.prototypes.w.storage(), model.prototypes.w.storage());
    EXPECT_TRUE(back.medians.empty());
}

TEST(Model, MedianModelKeepsIndices) {
    ModelFile model;
    model.method = "median-xim";
    model.seed = 7;
    model.lattice = build_lattice(1, 2);
    model.prototypes.w = Matrix(2, 0);
    model.medians = {4, 9};

    std::ostringstream out;
    write_model(out, model);
    std::istringstream in(out.str());
    const ModelFile back = read_model(in);
    EXPECT_EQ(back.prototypes.dims(), 0u);
    ASSERT_EQ(back.medians.size(), 2u);
    EXPECT_EQ(back.medians[0], 4u);
    EXPECT_EQ(back.medians[1], 9u);
}

TEST(Model, RejectsWrongMagicAndGarbage) {
    std::istringstream bad("XIM-MODEL v2\nmethod xim\nend\n");
    EXPECT_THROW(read_model(bad), StructureError);
    std::istringstream truncated("XIM-MODEL v1\nlattice 4 2\n0,0\n");
    EXPECT_THROW(read_model(truncated), StructureError);
    std::istringstream unknown("XIM-MODEL v1\nwhatever 3\nend\n");
    EXPECT_THROW(read_model(unknown), StructureError);
}

TEST(Embedding, RoundTripWithLabels) {
    Matrix coords(3, 2, {0.5, 1.5, 2.5, 3.5, 4.5, 5.5});
    const std::vector<int> labels = {1, 0, 1};
    std::ostringstream out;
    write_embedding(out, coords, {}, labels);
    std::istringstream in(out.str());
    const EmbeddingFile back = read_embedding(in);
    EXPECT_EQ(back.coords.storage(), coords.storage());
    EXPECT_EQ(back.labels, labels);
    ASSERT_EQ(back.ids.size(), 3u);
    EXPECT_EQ(back.ids[1], "1");
}

TEST(Embedding, RoundTripWithoutLabels) {
    Matrix coords(2, 3, {1, 2, 3, 4, 5, 6});
    std::ostringstream out;
    write_embedding(out, coords, {"p0", "p1"}, {});
    std::istringstream in(out.str());
    const EmbeddingFile back = read_embedding(in);
    EXPECT_EQ(back.coords.storage(), coords.storage());
    EXPECT_TRUE(back.labels.empty());
    EXPECT_EQ(back.ids[0], "p0");
}

TEST(Embedding, UnknownColumnRejected) {
    std::istringstream in("id,y0,bogus\n0,1,2\n");
    EXPECT_THROW(read_embedding(in), StructureError);
}

TEST(Files, MissingFileRaisesIoError) {
    EXPECT_THROW(load_dataset("/nonexistent/path/data.csv"), IoError);
    EXPECT_THROW(load_dissimilarity("/nonexistent/path/d.csv"), IoError);
    EXPECT_THROW(load_model("/nonexistent/path/m.xim"), IoError);
}

TEST(Dissimilarity, LoadValidatesStructure) {
    {
        std::istringstream in("0,3\n3,0\n");
        const DissimilarityMatrix d = make_dissimilarity(read_matrix(in));
        EXPECT_TRUE(d.symmetric);
    }
    {
        std::istringstream in("0,3\n2,0\n");
        const DissimilarityMatrix d = make_dissimilarity(read_matrix(in));
        EXPECT_FALSE(d.symmetric);
    }
    {
        std::istringstream in("0,-1\n-1,0\n");
        EXPECT_THROW(make_dissimilarity(read_matrix(in)), DomainError);
    }
}
