#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "llchess/nn/adam.hpp"
#include "llchess/nn/network.hpp"

namespace llchess::nn {

// Random-access rows of (input, target) pairs. Implementations materialize the
// requested rows into dense matrices; storage format is theirs.
template <class T>
class BatchSource {
public:
    virtual ~BatchSource() = default;
    virtual std::size_t size() const = 0;
    virtual long input_dim() const = 0;
    virtual long target_dim() const = 0;
    virtual void gather(std::span<const std::size_t> rows, Matrix<T>& inputs, Matrix<T>& targets) const = 0;
};

template <class T>
class DenseBatchSource final : public BatchSource<T> {
public:
    DenseBatchSource(Matrix<T> inputs, Matrix<T> targets) : inputs_(std::move(inputs)), targets_(std::move(targets)) {
        if (inputs_.rows() != targets_.rows()) throw DimensionMismatch("input and target row counts differ");
    }
    std::size_t size() const override { return static_cast<std::size_t>(inputs_.rows()); }
    long input_dim() const override { return inputs_.cols(); }
    long target_dim() const override { return targets_.cols(); }
    void gather(std::span<const std::size_t> rows, Matrix<T>& x, Matrix<T>& y) const override {
        x.resize(static_cast<long>(rows.size()), inputs_.cols());
        y.resize(static_cast<long>(rows.size()), targets_.cols());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            x.row(static_cast<long>(i)) = inputs_.row(static_cast<long>(rows[i]));
            y.row(static_cast<long>(i)) = targets_.row(static_cast<long>(rows[i]));
        }
    }

private:
    Matrix<T> inputs_;
    Matrix<T> targets_;
};

class TrainingDiverged : public std::runtime_error {
public:
    TrainingDiverged(int epoch, std::size_t batch, const std::string& what)
        : std::runtime_error(what + " at epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch)),
          epoch_(epoch), batch_(batch) {}
    int epoch() const { return epoch_; }
    std::size_t batch() const { return batch_; }

private:
    int epoch_;
    std::size_t batch_;
};

struct TrainConfig {
    int epochs = 10;
    std::size_t batch_size = 256;
    std::uint64_t seed = 1;
    LossKind loss = LossKind::MeanSquaredError;
    AdamConfig adam;
};

struct EpochMetrics {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    std::optional<double> test_loss;
    std::optional<double> test_accuracy;
};

template <class T>
using EvalHook = std::function<void(const NetworkParams<T>&, EpochMetrics&)>;

template <class T>
struct TrainResult {
    NetworkParams<T> params;
    std::vector<EpochMetrics> metrics;
};

// Mini-batch Adam. Shuffling and dropout masks derive from config.seed alone,
// so identical inputs reproduce identical parameters and metrics.
template <class T>
TrainResult<T> train(NetworkParams<T> net, const BatchSource<T>& data, const TrainConfig& config,
                     const EvalHook<T>& eval_hook = {}) {
    if (data.size() == 0) throw std::invalid_argument("training set is empty");
    if (config.batch_size == 0) throw std::invalid_argument("batch size must be positive");
    if (data.input_dim() != net.input_dim() || data.target_dim() != net.output_dim())
        throw DimensionMismatch("dataset dims do not match the network");

    TrainResult<T> result;
    AdamState<T> adam = AdamState<T>::for_network(net, config.adam);
    std::vector<std::size_t> order(data.size());
    Matrix<T> x, y;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::mt19937_64 shuffle_rng(detail::mix(config.seed, static_cast<std::uint64_t>(epoch)));
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(shuffle_rng() % i);
            std::swap(order[i - 1], order[j]);
        }

        double weighted_loss = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
            const std::size_t count = std::min(config.batch_size, order.size() - start);
            data.gather(std::span<const std::size_t>(order.data() + start, count), x, y);
            const std::uint64_t mask_seed =
                detail::mix(detail::mix(config.seed, static_cast<std::uint64_t>(epoch) << 32), batch_index);
            BackwardResult<T> step;
            try {
                step = backward(net, x, y, config.loss, Mode::Train, mask_seed);
            } catch (const NumericFault& e) {
                throw TrainingDiverged(epoch, batch_index, e.what());
            }
            if (!std::isfinite(step.loss)) throw TrainingDiverged(epoch, batch_index, "non-finite loss");
            adam_step(net, step.gradients, adam);
            weighted_loss += step.loss * static_cast<double>(count);
        }

        EpochMetrics m;
        m.epoch = epoch;
        m.train_loss = weighted_loss / static_cast<double>(order.size());
        if (eval_hook) eval_hook(net, m);
        result.metrics.push_back(m);
    }
    result.params = std::move(net);
    return result;
}

// Mean loss over a whole dataset in inference mode, in chunks.
template <class T>
double evaluate_loss(const NetworkParams<T>& net, const BatchSource<T>& data, LossKind kind,
                     std::size_t chunk = 1024) {
    double total = 0.0;
    std::vector<std::size_t> rows;
    Matrix<T> x, y;
    for (std::size_t start = 0; start < data.size(); start += chunk) {
        const std::size_t count = std::min(chunk, data.size() - start);
        rows.resize(count);
        std::iota(rows.begin(), rows.end(), start);
        data.gather(rows, x, y);
        total += loss(kind, forward(net, x), y) * static_cast<double>(count);
    }
    return data.size() ? total / static_cast<double>(data.size()) : 0.0;
}

// CSV with header "epoch,train_loss,test_loss,test_accuracy"; absent values left blank.
inline void write_metrics_csv(std::ostream& out, const std::vector<EpochMetrics>& metrics) {
    out << "epoch,train_loss,test_loss,test_accuracy\n";
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.9g", v);
        return std::string(buf);
    };
    for (const auto& m : metrics) {
        out << m.epoch << ',' << fmt(m.train_loss) << ',' << (m.test_loss ? fmt(*m.test_loss) : "") << ','
            << (m.test_accuracy ? fmt(*m.test_accuracy) : "") << '\n';
    }
}

}  // namespace llchess::nn
