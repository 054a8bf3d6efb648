#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "llchess/nn/adam.hpp"
#include "llchess/nn/trainer.hpp"
#include "llchess/nn/weights_io.hpp"
#include "oracle/gradcheck.hpp"

using namespace llchess::nn;

TEST(Gradients, MatchFiniteDifferences) {
    for (const auto& c : oracle::standard_cases()) {
        const auto r = oracle::run_case(c, 42);
        EXPECT_LT(r.max_relative_error, 1e-4) << c.name;
        EXPECT_GT(r.parameters, 0u);
    }
}

TEST(Loss, Analytics) {
    Matrix<double> half = Matrix<double>::Constant(4, 5, 0.5);
    EXPECT_NEAR(loss_bce(half, half), std::log(2.0), 1e-9);
    Matrix<double> uniform = Matrix<double>::Constant(3, 3, 1.0 / 3.0);
    Matrix<double> onehot = Matrix<double>::Identity(3, 3);
    EXPECT_NEAR(loss_categorical_ce(uniform, onehot), std::log(3.0), 1e-9);
    Matrix<double> target = Matrix<double>::Constant(6, 2, 0.3);
    Matrix<double> shifted = target.array() + 0.1;
    EXPECT_NEAR(loss_mse(shifted, target), 0.01, 1e-15);
    EXPECT_THROW(loss_mse(shifted, Matrix<double>(6, 3)), DimensionMismatch);
}

TEST(Loss, BceIsClippedNotInfinite) {
    Matrix<double> p(1, 2), y(1, 2);
    p << 0.0, 1.0;
    y << 1.0, 0.0;
    EXPECT_TRUE(std::isfinite(loss_bce(p, y)));
}

TEST(Network, ShapesAndGlorotRange) {
    const auto net = make_network<float>(10, {{6, Activation::Relu, 0.5}, {2, Activation::Softmax}}, 3);
    ASSERT_EQ(net.layers.size(), 2u);
    EXPECT_EQ(net.layers[0].weights.rows(), 10);
    EXPECT_EQ(net.layers[0].weights.cols(), 6);
    const float limit = std::sqrt(6.0f / 16.0f);
    EXPECT_LE(net.layers[0].weights.cwiseAbs().maxCoeff(), limit);
    EXPECT_EQ(net.layers[0].bias.cwiseAbs().maxCoeff(), 0.0f);
    const Matrix<float> x = Matrix<float>::Random(4, 10);
    const auto out = forward(net, x);
    for (long r = 0; r < out.rows(); ++r) EXPECT_NEAR(out.row(r).sum(), 1.0f, 1e-6f);
    EXPECT_THROW(forward(net, Matrix<float>(Matrix<float>::Random(4, 9))), DimensionMismatch);
}

TEST(Network, DropoutOnlyInTraining) {
    const auto net = make_network<double>(8, {{16, Activation::Tanh, 0.5}, {3, Activation::Linear}}, 9);
    const Matrix<double> x = Matrix<double>::Random(5, 8);
    EXPECT_TRUE(forward(net, x, Mode::Infer, 1).isApprox(forward(net, x, Mode::Infer, 2)));
    EXPECT_FALSE(forward(net, x, Mode::Train, 1).isApprox(forward(net, x, Mode::Train, 2)));
    EXPECT_TRUE(forward(net, x, Mode::Train, 1).isApprox(forward(net, x, Mode::Train, 1)));
}

TEST(Network, NonFiniteActivationIsLocated) {
    auto net = make_network<double>(3, {{2, Activation::Linear}}, 1);
    net.layers[0].weights(1, 1) = std::nan("");
    try {
        forward(net, Matrix<double>(Matrix<double>::Ones(2, 3)));
        FAIL();
    } catch (const NumericFault& e) {
        EXPECT_EQ(e.layer(), 0);
        EXPECT_EQ(e.col(), 1);
    }
}

TEST(Adam, FirstStepMovesByLearningRate) {
    auto net = make_network<double>(2, {{1, Activation::Linear}}, 1);
    const double w0 = net.layers[0].weights(0, 0);
    auto g = Gradients<double>::zeros_like(net);
    g.weights[0](0, 0) = 0.37;
    g.bias[0](0) = -2.0;
    auto state = AdamState<double>::for_network(net, {0.01, 0.9, 0.999, 1e-7});
    adam_step(net, g, state);
    // Bias-corrected moments make the first step lr * g / (|g| + eps).
    EXPECT_NEAR(net.layers[0].weights(0, 0), w0 - 0.01 * 0.37 / (0.37 + 1e-7), 1e-12);
    EXPECT_NEAR(net.layers[0].bias(0), 0.01 * 2.0 / (2.0 + 1e-7), 1e-12);
    EXPECT_EQ(net.layers[0].weights(1, 0), make_network<double>(2, {{1, Activation::Linear}}, 1).layers[0].weights(1, 0));
}

TEST(Trainer, LearnsXorAndIsDeterministic) {
    Matrix<float> x(4, 2), y(4, 1);
    x << 0, 0, 0, 1, 1, 0, 1, 1;
    y << 0, 1, 1, 0;
    const DenseBatchSource<float> data(x, y);
    TrainConfig cfg;
    cfg.epochs = 1500;
    cfg.batch_size = 4;
    cfg.loss = LossKind::BinaryCrossEntropy;
    cfg.adam.learning_rate = 0.02;
    auto net = make_network<float>(2, {{8, Activation::Tanh}, {1, Activation::Sigmoid}}, 4);
    const auto a = train(net, data, cfg);
    const auto b = train(net, data, cfg);
    EXPECT_LT(a.metrics.back().train_loss, 0.05);
    EXPECT_EQ(serialize_params(a.params), serialize_params(b.params));
    const auto out = forward(a.params, x);
    for (long r = 0; r < 4; ++r) EXPECT_NEAR(out(r, 0), y(r, 0), 0.2f);
}

TEST(Trainer, RejectsEmptyAndMismatchedData) {
    auto net = make_network<float>(2, {{1, Activation::Linear}}, 4);
    EXPECT_THROW(train(net, DenseBatchSource<float>(Matrix<float>(0, 2), Matrix<float>(0, 1)), TrainConfig{}),
                 std::invalid_argument);
    EXPECT_THROW(train(net, DenseBatchSource<float>(Matrix<float>::Ones(3, 3), Matrix<float>::Ones(3, 1)), TrainConfig{}),
                 DimensionMismatch);
}

TEST(Trainer, MetricsCsvFormat) {
    std::vector<EpochMetrics> m(2);
    m[0] = {1, 0.5, 0.25, std::nullopt};
    m[1] = {2, 0.125, std::nullopt, 0.75};
    std::ostringstream out;
    write_metrics_csv(out, m);
    EXPECT_EQ(out.str(), "epoch,train_loss,test_loss,test_accuracy\n1,0.5,0.25,\n2,0.125,,0.75\n");
}

TEST(WeightsIo, RoundTripAndCorruption) {
    const auto net = make_network<float>(7, {{5, Activation::Relu, 0.3}, {2, Activation::Tanh}}, 8);
    const std::string bytes = serialize_params(net);
    ASSERT_EQ(bytes.substr(0, 8), "LLCWNET1");
    const auto back = deserialize_params(bytes);
    EXPECT_EQ(serialize_params(back), bytes);
    EXPECT_EQ(back.layers[1].activation, Activation::Tanh);
    EXPECT_FLOAT_EQ(static_cast<float>(back.dropout[0]), 0.3f);

    std::string flipped = bytes;
    flipped[40] = static_cast<char>(flipped[40] ^ 0x10);
    EXPECT_THROW(deserialize_params(flipped), WeightFileError);
    EXPECT_THROW(deserialize_params(bytes.substr(0, bytes.size() - 3)), WeightFileError);
    std::string magic = bytes;
    magic[0] = 'X';
    EXPECT_THROW(deserialize_params(magic), WeightFileError);

    const auto path = std::filesystem::temp_directory_path() / "llchess_weights_test.w";
    save_params(net, path);
    EXPECT_EQ(serialize_params(load_params(path)), bytes);
    std::filesystem::remove(path);
    EXPECT_THROW(load_params(path), WeightFileError);
}
