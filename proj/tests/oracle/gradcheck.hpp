#pragma once

// Central finite differences over every weight and bias of a float64 network.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "llchess/nn/network.hpp"

namespace oracle {

using llchess::nn::Matrix;
using llchess::nn::NetworkParams;

struct GradCheck {
    double max_relative_error = 0.0;
    std::size_t parameters = 0;
};

inline double relative_error(double analytic, double numeric) {
    const double scale = std::max({std::fabs(analytic), std::fabs(numeric), 1e-5});
    return std::fabs(analytic - numeric) / scale;
}

// Dropout masks are a pure function of the seed, so Train mode is checkable too.
inline GradCheck check_gradients(NetworkParams<double> net, const Matrix<double>& x, const Matrix<double>& y,
                                 llchess::nn::LossKind kind, llchess::nn::Mode mode, std::uint64_t seed,
                                 double h = 1e-5) {
    using namespace llchess::nn;
    const auto analytic = backward(net, x, y, kind, mode, seed).gradients;
    auto objective = [&] { return loss(kind, forward(net, x, mode, seed), y); };
    GradCheck out;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto probe = [&](double& p, double a) {
            const double saved = p;
            p = saved + h;
            const double up = objective();
            p = saved - h;
            const double down = objective();
            p = saved;
            out.max_relative_error = std::max(out.max_relative_error, relative_error(a, (up - down) / (2 * h)));
            ++out.parameters;
        };
        auto& layer = net.layers[l];
        for (long r = 0; r < layer.weights.rows(); ++r)
            for (long c = 0; c < layer.weights.cols(); ++c) probe(layer.weights(r, c), analytic.weights[l](r, c));
        for (long c = 0; c < layer.bias.cols(); ++c) probe(layer.bias(c), analytic.bias[l](c));
    }
    return out;
}

// Random inputs and targets suited to the loss: bits for BCE, one-hot rows for CCE,
// values in (-1, 1) for MSE.
inline std::pair<Matrix<double>, Matrix<double>> random_batch(long rows, long in, long out, llchess::nn::LossKind kind,
                                                              std::uint64_t seed) {
    using llchess::nn::LossKind;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix<double> x(rows, in), y(rows, out);
    for (long r = 0; r < rows; ++r)
        for (long c = 0; c < in; ++c) x(r, c) = kind == LossKind::BinaryCrossEntropy ? double(rng() & 1) : u(rng);
    y.setZero();
    for (long r = 0; r < rows; ++r) {
        if (kind == LossKind::CategoricalCrossEntropy) {
            y(r, static_cast<long>(rng() % static_cast<std::uint64_t>(out))) = 1.0;
        } else {
            for (long c = 0; c < out; ++c)
                y(r, c) = kind == LossKind::BinaryCrossEntropy ? double(rng() & 1) : 0.9 * u(rng);
        }
    }
    return {x, y};
}

struct GradCase {
    const char* name;
    long input_dim;
    std::vector<llchess::nn::LayerSpec> layers;
    llchess::nn::LossKind loss;
    llchess::nn::Mode mode;
};

// Reduced-width versions of the three model shapes, each in both modes, plus the
// remaining activation/loss pairings.
inline std::vector<GradCase> standard_cases() {
    using namespace llchess::nn;
    using A = Activation;
    using L = LossKind;
    std::vector<GradCase> out;
    for (Mode mode : {Mode::Infer, Mode::Train}) {
        const bool train = mode == Mode::Train;
        out.push_back({train ? "autoencoder/train" : "autoencoder/infer", 12,
                       {{8, A::Tanh, 0.25}, {5, A::Tanh, 0.25}, {3, A::Tanh, 0.25}, {5, A::Tanh, 0.25},
                        {8, A::Tanh, 0.25}, {12, A::Sigmoid}},
                       L::BinaryCrossEntropy, mode});
        out.push_back({train ? "classifier/train" : "classifier/infer", 12,
                       {{10, A::Relu, 0.25}, {7, A::Relu, 0.25}, {5, A::Relu, 0.25}, {3, A::Softmax}},
                       L::CategoricalCrossEntropy, mode});
        out.push_back({train ? "evaluator/train" : "evaluator/infer", 6,
                       {{9, A::Relu, 0.3}, {9, A::Relu, 0.3}, {9, A::Relu, 0.3}, {1, A::Tanh}},
                       L::MeanSquaredError, mode});
    }
    out.push_back({"sigmoid+mse", 5, {{4, A::Sigmoid}, {3, A::Sigmoid}}, L::MeanSquaredError, Mode::Infer});
    out.push_back({"linear+mse", 5, {{4, A::Tanh}, {2, A::Linear}}, L::MeanSquaredError, Mode::Infer});
    out.push_back({"softmax+mse", 5, {{4, A::Relu}, {3, A::Softmax}}, L::MeanSquaredError, Mode::Infer});
    out.push_back({"relu+sigmoid+bce", 5, {{4, A::Relu}, {3, A::Sigmoid}}, L::BinaryCrossEntropy, Mode::Infer});
    return out;
}

inline GradCheck run_case(const GradCase& c, std::uint64_t seed) {
    auto net = llchess::nn::make_network<double>(c.input_dim, c.layers, seed);
    // Zero biases put whole rows exactly on the ReLU hinge once their inputs drop out.
    std::mt19937_64 rng(seed ^ 0xB1A5);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (auto& l : net.layers)
        for (long i = 0; i < l.bias.cols(); ++i) l.bias(i) = u(rng);
    const auto [x, y] = random_batch(7, c.input_dim, c.layers.back().units, c.loss, seed + 1);
    return check_gradients(net, x, y, c.loss, c.mode, seed + 2);
}

}  // namespace oracle
