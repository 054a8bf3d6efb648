#pragma once

#include <cmath>

#include "llchess/nn/network.hpp"

namespace llchess::nn {

struct AdamConfig {
    double learning_rate = 0.001;
    double beta1 = 0.90;
    double beta2 = 0.999;
    double epsilon = 1e-7;
};

template <class T>
struct AdamState {
    AdamConfig config;
    long step = 0;
    Gradients<T> first_moment;
    Gradients<T> second_moment;

    static AdamState for_network(const NetworkParams<T>& net, AdamConfig config = {}) {
        return {config, 0, Gradients<T>::zeros_like(net), Gradients<T>::zeros_like(net)};
    }
};

// One bias-corrected Adam update, in place.
template <class T>
void adam_step(NetworkParams<T>& net, const Gradients<T>& grads, AdamState<T>& state) {
    const auto& cfg = state.config;
    ++state.step;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    const T b1 = static_cast<T>(cfg.beta1);
    const T b2 = static_cast<T>(cfg.beta2);
    const T lr = static_cast<T>(cfg.learning_rate);
    const T eps = static_cast<T>(cfg.epsilon);
    const T inv_c1 = static_cast<T>(1.0 / c1);
    const T inv_c2 = static_cast<T>(1.0 / c2);

    auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
        m = b1 * m + (T(1) - b1) * g;
        v = b2 * v + (T(1) - b2) * g.cwiseProduct(g);
        param.array() -= lr * (m.array() * inv_c1) / ((v.array() * inv_c2).sqrt() + eps);
    };
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        update(net.layers[i].weights, grads.weights[i], state.first_moment.weights[i], state.second_moment.weights[i]);
        update(net.layers[i].bias, grads.bias[i], state.first_moment.bias[i], state.second_moment.bias[i]);
    }
}

}  // namespace llchess::nn
