#pragma once

// Dense feed-forward networks: parameters, forward pass with inverted dropout,
// losses and backpropagation. Templated on the scalar so the same code serves
// float32 models and float64 gradient checks.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace llchess::nn {

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using RowVector = Eigen::Matrix<T, 1, Eigen::Dynamic>;

enum class Activation : std::uint8_t { Tanh = 0, Sigmoid = 1, Relu = 2, Softmax = 3, Linear = 4 };
enum class Mode { Train, Infer };
enum class LossKind { BinaryCrossEntropy, CategoricalCrossEntropy, MeanSquaredError };

inline const char* to_string(Activation a) {
    switch (a) {
        case Activation::Tanh: return "tanh";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Relu: return "relu";
        case Activation::Softmax: return "softmax";
        case Activation::Linear: return "linear";
    }
    return "?";
}

// Non-finite value in an activation or gradient.
class NumericFault : public std::runtime_error {
public:
    NumericFault(int layer, long row, long col, const std::string& what)
        : std::runtime_error(what + " (layer " + std::to_string(layer) + ", row " + std::to_string(row) + ", col " +
                             std::to_string(col) + ")"),
          layer_(layer), row_(row), col_(col) {}
    int layer() const { return layer_; }
    long row() const { return row_; }
    long col() const { return col_; }

private:
    int layer_;
    long row_, col_;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// weights is input-dim x output-dim, so a batch (rows = samples) maps as X * W + b.
template <class T>
struct DenseLayer {
    Matrix<T> weights;
    RowVector<T> bias;
    Activation activation = Activation::Linear;

    long inputs() const { return weights.rows(); }
    long outputs() const { return weights.cols(); }
};

template <class T>
struct NetworkParams {
    std::vector<DenseLayer<T>> layers;
    // dropout[i] is the drop probability applied to the output of hidden layer i
    // (i < layers.size() - 1). Never applied to the input or the final output.
    std::vector<double> dropout;

    long input_dim() const { return layers.empty() ? 0 : layers.front().inputs(); }
    long output_dim() const { return layers.empty() ? 0 : layers.back().outputs(); }

    // Throws std::invalid_argument when dims do not chain, a rate is outside [0, 1),
    // softmax is used before the last layer, or a parameter is non-finite.
    void validate() const {
        if (layers.empty()) throw std::invalid_argument("network has no layers");
        if (dropout.size() + 1 != layers.size())
            throw std::invalid_argument("expected one dropout rate per hidden boundary");
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const auto& l = layers[i];
            if (l.bias.size() != l.outputs()) throw std::invalid_argument("bias size mismatch at layer " + std::to_string(i));
            if (i > 0 && layers[i - 1].outputs() != l.inputs())
                throw std::invalid_argument("layer " + std::to_string(i) + " input dim does not chain");
            if (l.activation == Activation::Softmax && i + 1 != layers.size())
                throw std::invalid_argument("softmax is only allowed on the final layer");
            if (!l.weights.allFinite() || !l.bias.allFinite())
                throw std::invalid_argument("non-finite parameter in layer " + std::to_string(i));
        }
        for (double r : dropout)
            if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("dropout rate outside [0, 1)");
    }

    template <class U>
    NetworkParams<U> cast() const {
        NetworkParams<U> out;
        out.dropout = dropout;
        for (const auto& l : layers)
            out.layers.push_back({l.weights.template cast<U>(), l.bias.template cast<U>(), l.activation});
        return out;
    }
};

struct LayerSpec {
    long units;
    Activation activation;
    double dropout_after = 0.0;
};

// Glorot-uniform weights, zero biases. layers[i] describes the output of weight layer i.
template <class T>
NetworkParams<T> make_network(long input_dim, const std::vector<LayerSpec>& layers, std::uint64_t seed) {
    NetworkParams<T> net;
    std::mt19937_64 rng(seed);
    long in = input_dim;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const long out = layers[i].units;
        const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        DenseLayer<T> layer{Matrix<T>(in, out), RowVector<T>::Zero(out), layers[i].activation};
        for (long r = 0; r < in; ++r)
            for (long c = 0; c < out; ++c) layer.weights(r, c) = static_cast<T>(dist(rng));
        net.layers.push_back(std::move(layer));
        if (i + 1 < layers.size()) net.dropout.push_back(layers[i].dropout_after);
        in = out;
    }
    net.validate();
    return net;
}

namespace detail {

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

template <class T>
void apply_activation(Matrix<T>& z, Activation a) {
    switch (a) {
        case Activation::Tanh: z = z.array().tanh(); break;
        case Activation::Sigmoid: z = (T(1) / (T(1) + (-z.array()).exp())).matrix(); break;
        case Activation::Relu: z = z.cwiseMax(T(0)); break;
        case Activation::Linear: break;
        case Activation::Softmax:
            for (long r = 0; r < z.rows(); ++r) {
                auto row = z.row(r);
                row.array() -= row.maxCoeff();
                row = row.array().exp().matrix();
                row /= row.sum();
            }
            break;
    }
}

// Given activation outputs a and dL/da, returns dL/dz.
template <class T>
Matrix<T> activation_backward(const Matrix<T>& a, const Matrix<T>& grad, Activation act) {
    switch (act) {
        case Activation::Tanh: return (grad.array() * (T(1) - a.array().square())).matrix();
        case Activation::Sigmoid: return (grad.array() * a.array() * (T(1) - a.array())).matrix();
        case Activation::Relu: return (grad.array() * (a.array() > T(0)).template cast<T>()).matrix();
        case Activation::Linear: return grad;
        case Activation::Softmax: {
            Matrix<T> out(a.rows(), a.cols());
            for (long r = 0; r < a.rows(); ++r) {
                const T dot = (grad.row(r).array() * a.row(r).array()).sum();
                out.row(r) = (a.row(r).array() * (grad.row(r).array() - dot)).matrix();
            }
            return out;
        }
    }
    return grad;
}

template <class T>
void check_finite(const Matrix<T>& m, int layer, const char* what) {
    if (m.allFinite()) return;
    for (long r = 0; r < m.rows(); ++r)
        for (long c = 0; c < m.cols(); ++c)
            if (!std::isfinite(static_cast<double>(m(r, c)))) throw NumericFault(layer, r, c, what);
}

}  // namespace detail

// Everything a backward pass needs from the forward pass.
template <class T>
struct ForwardTrace {
    std::vector<Matrix<T>> inputs;   // inputs[i] is what layer i consumed (post-dropout)
    std::vector<Matrix<T>> outputs;  // outputs[i] is layer i's activation before dropout
    std::vector<Matrix<T>> masks;    // scaled keep-masks; empty when no dropout was applied
    const Matrix<T>& result() const { return outputs.back(); }
};

// Dropout masks are drawn from a generator seeded with (seed, layer), so the same
// seed reproduces the same masks. Kept units are scaled by 1 / keep-probability.
template <class T>
ForwardTrace<T> forward_trace(const NetworkParams<T>& net, const Matrix<T>& inputs, Mode mode, std::uint64_t seed) {
    if (inputs.cols() != net.input_dim())
        throw DimensionMismatch("input has " + std::to_string(inputs.cols()) + " columns, network expects " +
                                std::to_string(net.input_dim()));
    ForwardTrace<T> trace;
    const std::size_t n = net.layers.size();
    trace.inputs.reserve(n);
    trace.outputs.reserve(n);
    trace.masks.resize(n);
    Matrix<T> current = inputs;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& layer = net.layers[i];
        Matrix<T> z = current * layer.weights;
        z.rowwise() += layer.bias;
        detail::apply_activation(z, layer.activation);
        detail::check_finite(z, static_cast<int>(i), "non-finite activation");
        trace.inputs.push_back(std::move(current));
        trace.outputs.push_back(z);
        current = std::move(z);
        const double rate = i + 1 < n ? net.dropout[i] : 0.0;
        if (mode == Mode::Train && rate > 0.0) {
            const double keep = 1.0 - rate;
            std::mt19937_64 rng(detail::mix(seed, i));
            Matrix<T> mask(current.rows(), current.cols());
            const T scale = static_cast<T>(1.0 / keep);
            for (long r = 0; r < mask.rows(); ++r)
                for (long c = 0; c < mask.cols(); ++c)
                    mask(r, c) = (static_cast<double>(rng() >> 11) * 0x1.0p-53 < keep) ? scale : T(0);
            current = current.cwiseProduct(mask);
            trace.masks[i] = std::move(mask);
        }
    }
    return trace;
}

template <class T>
Matrix<T> forward(const NetworkParams<T>& net, const Matrix<T>& inputs, Mode mode = Mode::Infer,
                  std::uint64_t seed = 0) {
    return forward_trace(net, inputs, mode, seed).outputs.back();
}

// ---- losses ---------------------------------------------------------------

inline constexpr double kLossEpsilon = 1e-7;

inline void check_same_shape(long pr, long pc, long tr, long tc) {
    if (pr != tr || pc != tc) throw DimensionMismatch("prediction and target shapes differ");
}

// Mean over every element of -[y log p + (1 - y) log(1 - p)], p clamped to [eps, 1 - eps].
template <class T>
double loss_bce(const Matrix<T>& predicted, const Matrix<T>& target) {
    check_same_shape(predicted.rows(), predicted.cols(), target.rows(), target.cols());
    double sum = 0.0;
    for (long r = 0; r < predicted.rows(); ++r)
        for (long c = 0; c < predicted.cols(); ++c) {
            const double p = std::clamp(static_cast<double>(predicted(r, c)), kLossEpsilon, 1.0 - kLossEpsilon);
            const double y = static_cast<double>(target(r, c));
            sum -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
        }
    return sum / static_cast<double>(predicted.size());
}

// Mean over rows of -sum_i y_i log p_i, p clamped to [eps, 1].
template <class T>
double loss_categorical_ce(const Matrix<T>& predicted, const Matrix<T>& target) {
    check_same_shape(predicted.rows(), predicted.cols(), target.rows(), target.cols());
    double sum = 0.0;
    for (long r = 0; r < predicted.rows(); ++r)
        for (long c = 0; c < predicted.cols(); ++c) {
            const double y = static_cast<double>(target(r, c));
            if (y != 0.0) sum -= y * std::log(std::max(static_cast<double>(predicted(r, c)), kLossEpsilon));
        }
    return sum / static_cast<double>(predicted.rows());
}

// Mean over every element of (y - p)^2.
template <class T>
double loss_mse(const Matrix<T>& predicted, const Matrix<T>& target) {
    check_same_shape(predicted.rows(), predicted.cols(), target.rows(), target.cols());
    double sum = 0.0;
    for (long r = 0; r < predicted.rows(); ++r)
        for (long c = 0; c < predicted.cols(); ++c) {
            const double d = static_cast<double>(target(r, c)) - static_cast<double>(predicted(r, c));
            sum += d * d;
        }
    return sum / static_cast<double>(predicted.size());
}

template <class T>
double loss(LossKind kind, const Matrix<T>& predicted, const Matrix<T>& target) {
    switch (kind) {
        case LossKind::BinaryCrossEntropy: return loss_bce(predicted, target);
        case LossKind::CategoricalCrossEntropy: return loss_categorical_ce(predicted, target);
        case LossKind::MeanSquaredError: return loss_mse(predicted, target);
    }
    return 0.0;
}

// dL/dp for the given loss.
template <class T>
Matrix<T> loss_gradient(LossKind kind, const Matrix<T>& p, const Matrix<T>& y) {
    check_same_shape(p.rows(), p.cols(), y.rows(), y.cols());
    const T eps = static_cast<T>(kLossEpsilon);
    switch (kind) {
        case LossKind::BinaryCrossEntropy: {
            const T n = static_cast<T>(p.size());
            Matrix<T> g(p.rows(), p.cols());
            for (long i = 0; i < p.size(); ++i) {
                const T pi = p.data()[i];
                const T yi = y.data()[i];
                g.data()[i] = (pi <= eps || pi >= T(1) - eps) ? T(0) : (-yi / pi + (T(1) - yi) / (T(1) - pi)) / n;
            }
            return g;
        }
        case LossKind::CategoricalCrossEntropy: {
            const T n = static_cast<T>(p.rows());
            Matrix<T> g(p.rows(), p.cols());
            for (long i = 0; i < p.size(); ++i) {
                const T pi = p.data()[i];
                g.data()[i] = pi <= eps ? T(0) : -y.data()[i] / pi / n;
            }
            return g;
        }
        case LossKind::MeanSquaredError: return (T(2) * (p - y) / static_cast<T>(p.size())).eval();
    }
    return Matrix<T>::Zero(p.rows(), p.cols());
}

// ---- backpropagation --------------------------------------------------------

template <class T>
struct Gradients {
    std::vector<Matrix<T>> weights;
    std::vector<RowVector<T>> bias;

    static Gradients zeros_like(const NetworkParams<T>& net) {
        Gradients g;
        for (const auto& l : net.layers) {
            g.weights.push_back(Matrix<T>::Zero(l.inputs(), l.outputs()));
            g.bias.push_back(RowVector<T>::Zero(l.outputs()));
        }
        return g;
    }
};

template <class T>
struct BackwardResult {
    Gradients<T> gradients;
    double loss = 0.0;
    Matrix<T> output;
};

// Gradients of the mean loss over the batch. Dropout masks are regenerated from
// seed, so backward(net, ..., seed) differentiates exactly forward(net, ..., Train, seed).
// Sigmoid+BCE and softmax+CCE use the fused (p - y) form for the output delta.
template <class T>
BackwardResult<T> backward(const NetworkParams<T>& net, const Matrix<T>& inputs, const Matrix<T>& targets,
                           LossKind kind, Mode mode = Mode::Train, std::uint64_t seed = 0) {
    const ForwardTrace<T> trace = forward_trace(net, inputs, mode, seed);
    const Matrix<T>& out = trace.result();
    BackwardResult<T> result;
    result.loss = loss(kind, out, targets);
    result.output = out;
    result.gradients = Gradients<T>::zeros_like(net);

    const std::size_t n = net.layers.size();
    const Activation last = net.layers.back().activation;
    Matrix<T> delta;  // dL/dz for the current layer
    const bool fused_bce = kind == LossKind::BinaryCrossEntropy && last == Activation::Sigmoid;
    const bool fused_cce = kind == LossKind::CategoricalCrossEntropy && last == Activation::Softmax;
    if (fused_bce)
        delta = (out - targets) / static_cast<T>(out.size());
    else if (fused_cce)
        delta = (out - targets) / static_cast<T>(out.rows());
    else
        delta = detail::activation_backward(out, loss_gradient(kind, out, targets), last);

    for (std::size_t k = n; k-- > 0;) {
        const auto& layer = net.layers[k];
        result.gradients.weights[k].noalias() = trace.inputs[k].transpose() * delta;
        result.gradients.bias[k] = delta.colwise().sum();
        detail::check_finite(result.gradients.weights[k], static_cast<int>(k), "non-finite weight gradient");
        detail::check_finite(Matrix<T>(result.gradients.bias[k]), static_cast<int>(k), "non-finite bias gradient");
        if (k == 0) break;
        Matrix<T> grad_prev = delta * layer.weights.transpose();
        if (trace.masks[k - 1].size() > 0) grad_prev = grad_prev.cwiseProduct(trace.masks[k - 1]);
        delta = detail::activation_backward(trace.outputs[k - 1], grad_prev, net.layers[k - 1].activation);
    }
    return result;
}

}  // namespace llchess::nn
