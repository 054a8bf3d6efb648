#include <gtest/gtest.h>

#include <cmath>

#include "llchess/chess/fen.hpp"
#include "llchess/models/zoo.hpp"
#include "support.hpp"

using namespace llchess;
using namespace llchess::models;

TEST(Normalization, RoundTripExact) {
    for (Centipawns cp = -kEvalCap; cp <= kEvalCap; ++cp) ASSERT_EQ(denormalize(normalize_cp(cp)), cp) << cp;
}

TEST(Normalization, Clamping) {
    EXPECT_DOUBLE_EQ(normalize_cp(7200), 1.0);
    EXPECT_DOUBLE_EQ(normalize_cp(-7200), -1.0);
    EXPECT_DOUBLE_EQ(normalize_cp(kMateSentinel), 1.0);
    EXPECT_DOUBLE_EQ(normalize_cp(0), 0.0);
    const auto before = denormalize_clamp_count();
    EXPECT_EQ(denormalize(1.44), 5000);
    EXPECT_EQ(denormalize(-1.44), -5000);
    EXPECT_EQ(denormalize_clamp_count(), before + 2);
}

TEST(Normalization, MseReadings) {
    EXPECT_DOUBLE_EQ(mse_to_cp_linear(0.017), 85.0);
    EXPECT_NEAR(mse_to_cp_rmse(0.0004), 100.0, 1e-9);
}

TEST(Labels, BoundaryExhaustive) {
    for (Centipawns cp = -200; cp <= 200; ++cp) {
        const auto expected = cp < -150 ? PositionClass::BlackWinning
                              : cp > 150 ? PositionClass::WhiteWinning
                                         : PositionClass::Drawish;
        ASSERT_EQ(label(cp), expected) << cp;
    }
    EXPECT_EQ(one_hot(PositionClass::Drawish), (std::array<float, 3>{0, 1, 0}));
}

TEST(Zoo, Shapes) {
    const auto ae = build_autoencoder();
    ASSERT_EQ(ae.layers.size(), 6u);
    const long ae_dims[] = {775, 512, 256, 128, 256, 512, 775};
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(ae.layers[i].inputs(), ae_dims[i]);
        EXPECT_EQ(ae.layers[i].outputs(), ae_dims[i + 1]);
    }
    EXPECT_EQ(ae.layers.back().activation, nn::Activation::Sigmoid);
    EXPECT_EQ(ae.layers[0].activation, nn::Activation::Tanh);

    const auto cls = build_classifier();
    const long cls_dims[] = {775, 1024, 512, 256, 3};
    ASSERT_EQ(cls.layers.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(cls.layers[i].outputs(), cls_dims[i + 1]);
    EXPECT_EQ(cls.layers.back().activation, nn::Activation::Softmax);

    const auto ev = build_evaluator(kEvaluatorSeed, 64);
    ASSERT_EQ(ev.layers.size(), 4u);
    EXPECT_EQ(ev.layers[0].inputs(), kLatentDim);
    EXPECT_EQ(ev.layers[1].outputs(), 64);
    EXPECT_EQ(ev.layers.back().activation, nn::Activation::Tanh);
    EXPECT_EQ(build_evaluator().layers[0].outputs(), 2048);

    EXPECT_NO_THROW(check_autoencoder(ae));
    EXPECT_THROW(check_autoencoder(cls), std::invalid_argument);
    EXPECT_THROW(check_evaluator(ae), std::invalid_argument);
}

TEST(Zoo, SparseInferenceMatchesDense) {
    const auto ae = build_autoencoder(3);
    const auto cls = build_classifier(4);
    const auto ev = build_evaluator(5, 32);
    for (const auto& b : testing_support::random_positions(8, 20, 0, 60)) {
        const auto f = encoding::encode(b);
        nn::Matrix<float> x(1, 775);
        for (long i = 0; i < 775; ++i) x(0, i) = f[static_cast<std::size_t>(i)];
        const auto dense = encode_latent_batch(ae, x);
        const auto sparse = encode_latent(ae, encoding::active_features(b));
        EXPECT_TRUE(sparse.isApprox(dense.row(0), 1e-5f));
        EXPECT_TRUE(encode_latent(ae, f).isApprox(dense.row(0), 1e-5f));
        const auto p = classify(cls, encoding::active_features(b));
        EXPECT_NEAR(p[0] + p[1] + p[2], 1.0f, 1e-5f);
        const auto dense_p = nn::forward(cls, x);
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(p[k], dense_p(0, k), 1e-5f);
        const float v = evaluate_static(ev, sparse);
        EXPECT_GT(v, -1.0f);
        EXPECT_LT(v, 1.0f);
    }
}

TEST(Corpus, SubsetAndSources) {
    EncodedCorpus c;
    c.add(chess::Board::startpos(), 20);
    c.add(chess::parse_fen("4k3/8/8/8/8/8/8/R3K3 w Q - 0 1"), 600);
    c.add(chess::parse_fen("4k3/8/8/8/8/8/8/r3K3 w - - 0 1"), -7000);
    ASSERT_EQ(c.size(), 3u);
    const std::size_t rows[] = {2, 0};
    const auto s = c.subset(rows);
    EXPECT_EQ(s.cp(0), -7000);
    EXPECT_EQ(s.cp(1), 20);

    nn::Matrix<float> x, y;
    ClassifierSource(c).gather(rows, x, y);
    EXPECT_EQ(y(0, 0), 1.0f);
    EXPECT_EQ(y(1, 1), 1.0f);
    AutoencoderSource(c).gather(rows, x, y);
    EXPECT_TRUE(x.isApprox(y));
    EvaluatorSource ev(build_autoencoder(), c);
    EXPECT_FLOAT_EQ(ev.targets()(2, 0), -1.0f);
    EXPECT_FLOAT_EQ(ev.targets()(1, 0), static_cast<float>(normalize_cp(600)));
}

TEST(Labels, RecordedStaticEvalRows) {
    const auto rows = testing_support::lines(testing_support::data_dir() / "static_eval_positions.tsv");
    ASSERT_EQ(rows.size(), 5u);
    const PositionClass expected[] = {PositionClass::BlackWinning, PositionClass::WhiteWinning,
                                      PositionClass::WhiteWinning, PositionClass::BlackWinning,
                                      PositionClass::Drawish};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::istringstream in(rows[i]);
        std::string fen;
        Centipawns predicted = 0, reference = 0;
        std::getline(in, fen, '\t');
        in >> predicted >> reference;
        EXPECT_NO_THROW(chess::parse_fen(fen));
        EXPECT_EQ(label(predicted), expected[i]) << fen;
        EXPECT_EQ(label(reference), expected[i]) << fen;
        EXPECT_EQ(denormalize(normalize_cp(predicted)), predicted);
    }
}
