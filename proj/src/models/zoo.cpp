#include "llchess/models/zoo.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace llchess::models {
namespace {

using nn::Activation;
using nn::Matrix;
using nn::RowVector;

void apply_inplace(RowVector<float>& v, Activation a) {
    Matrix<float> m = v;
    nn::detail::apply_activation(m, a);
    v = m;
}

// Runs the first `layers` weight layers on a binary input given by its set indices.
RowVector<float> forward_binary(const Network& net, std::span<const std::uint32_t> active, std::size_t layers) {
    const auto& first = net.layers.front();
    RowVector<float> h = first.bias;
    for (const std::uint32_t i : active) {
        if (i >= static_cast<std::uint32_t>(first.inputs())) throw std::out_of_range("feature index out of range");
        h += first.weights.row(i);
    }
    apply_inplace(h, first.activation);
    for (std::size_t k = 1; k < layers; ++k) {
        const auto& l = net.layers[k];
        RowVector<float> z = l.bias;
        z.noalias() += h * l.weights;
        apply_inplace(z, l.activation);
        h = std::move(z);
    }
    return h;
}

std::vector<std::uint32_t> active_of(const encoding::FeatureVector& f) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < f.size(); ++i)
        if (f[i]) out.push_back(i);
    return out;
}

Network encoder_half(const Network& ae) {
    Network enc;
    enc.layers.assign(ae.layers.begin(), ae.layers.begin() + kEncoderLayers);
    enc.dropout.assign(kEncoderLayers - 1, 0.0);
    return enc;
}

void expect(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

Network build_autoencoder(std::uint64_t seed) {
    constexpr double d = kAutoencoderDropout;
    return nn::make_network<float>(encoding::kFeatureCount, {{512, Activation::Tanh, d},
                                                             {256, Activation::Tanh, d},
                                                             {kLatentDim, Activation::Tanh, d},
                                                             {256, Activation::Tanh, d},
                                                             {512, Activation::Tanh, d},
                                                             {encoding::kFeatureCount, Activation::Sigmoid}},
                                   seed);
}

Network build_classifier(std::uint64_t seed) {
    constexpr double d = kClassifierDropout;
    return nn::make_network<float>(encoding::kFeatureCount, {{1024, Activation::Relu, d},
                                                             {512, Activation::Relu, d},
                                                             {256, Activation::Relu, d},
                                                             {kClassCount, Activation::Softmax}},
                                   seed);
}

Network build_evaluator(std::uint64_t seed, long hidden_width) {
    if (hidden_width < 1) throw std::invalid_argument("evaluator width must be positive");
    constexpr double d = kEvaluatorDropout;
    return nn::make_network<float>(kLatentDim, {{hidden_width, Activation::Relu, d},
                                                {hidden_width, Activation::Relu, d},
                                                {hidden_width, Activation::Relu, d},
                                                {1, Activation::Tanh}},
                                   seed);
}

void check_autoencoder(const Network& n) {
    n.validate();
    expect(n.layers.size() > kEncoderLayers, "autoencoder needs an encoder and a decoder half");
    expect(n.input_dim() == encoding::kFeatureCount && n.output_dim() == encoding::kFeatureCount,
           "autoencoder must map 775 features to 775 features");
    expect(n.layers[kEncoderLayers - 1].outputs() == kLatentDim, "autoencoder bottleneck must have 128 units");
}

void check_classifier(const Network& n) {
    n.validate();
    expect(n.input_dim() == encoding::kFeatureCount && n.output_dim() == kClassCount,
           "classifier must map 775 features to 3 classes");
    expect(n.layers.back().activation == Activation::Softmax, "classifier output must be softmax");
}

void check_evaluator(const Network& n) {
    n.validate();
    expect(n.input_dim() == kLatentDim && n.output_dim() == 1, "evaluator must map a 128 latent to one value");
    expect(n.layers.back().activation == Activation::Tanh, "evaluator output must be tanh");
}

LatentVector encode_latent(const Network& autoencoder, const encoding::FeatureVector& features) {
    return encode_latent(autoencoder, active_of(features));
}

LatentVector encode_latent(const Network& autoencoder, std::span<const std::uint32_t> active_features) {
    return forward_binary(autoencoder, active_features, kEncoderLayers);
}

ClassProbabilities classify(const Network& classifier, const encoding::FeatureVector& features) {
    return classify(classifier, active_of(features));
}

ClassProbabilities classify(const Network& classifier, std::span<const std::uint32_t> active_features) {
    const RowVector<float> p = forward_binary(classifier, active_features, classifier.layers.size());
    return {p[0], p[1], p[2]};
}

float evaluate_static(const Network& evaluator, const LatentVector& latent) {
    if (latent.size() != evaluator.input_dim()) throw nn::DimensionMismatch("latent size does not match evaluator");
    RowVector<float> h = latent;
    for (const auto& l : evaluator.layers) {
        RowVector<float> z = l.bias;
        z.noalias() += h * l.weights;
        apply_inplace(z, l.activation);
        h = std::move(z);
    }
    return h[0];
}

Matrix<float> encode_latent_batch(const Network& autoencoder, const Matrix<float>& features) {
    return nn::forward(encoder_half(autoencoder), features);
}

Matrix<float> reconstruct_batch(const Network& autoencoder, const Matrix<float>& features) {
    return nn::forward(autoencoder, features);
}

// ---- corpus -------------------------------------------------------------------

void EncodedCorpus::add(const chess::Board& board, Centipawns cp) { add(encoding::encode(board), cp); }

void EncodedCorpus::add(const encoding::FeatureVector& features, Centipawns cp) {
    features_.insert(features_.end(), features.begin(), features.end());
    cp_.push_back(cp);
}

Matrix<float> EncodedCorpus::feature_matrix(std::span<const std::size_t> rows) const {
    Matrix<float> m(static_cast<long>(rows.size()), encoding::kFeatureCount);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto f = features(rows[r]);
        for (std::size_t c = 0; c < encoding::kFeatureCount; ++c) m(static_cast<long>(r), static_cast<long>(c)) = f[c];
    }
    return m;
}

Matrix<float> EncodedCorpus::feature_matrix() const {
    std::vector<std::size_t> rows(size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return feature_matrix(rows);
}

EncodedCorpus EncodedCorpus::subset(std::span<const std::size_t> rows) const {
    EncodedCorpus out;
    for (const auto r : rows) {
        const auto f = features(r);
        out.features_.insert(out.features_.end(), f.begin(), f.end());
        out.cp_.push_back(cp_[r]);
    }
    return out;
}

void AutoencoderSource::gather(std::span<const std::size_t> rows, Matrix<float>& x, Matrix<float>& y) const {
    x = corpus_.feature_matrix(rows);
    y = x;
}

void ClassifierSource::gather(std::span<const std::size_t> rows, Matrix<float>& x, Matrix<float>& y) const {
    x = corpus_.feature_matrix(rows);
    y = Matrix<float>::Zero(static_cast<long>(rows.size()), kClassCount);
    for (std::size_t r = 0; r < rows.size(); ++r)
        y(static_cast<long>(r), static_cast<int>(label(corpus_.cp(rows[r])))) = 1.0f;
}

EvaluatorSource::EvaluatorSource(const Network& autoencoder, const EncodedCorpus& corpus) {
    check_autoencoder(autoencoder);
    latents_.resize(static_cast<long>(corpus.size()), kLatentDim);
    targets_.resize(static_cast<long>(corpus.size()), 1);
    constexpr std::size_t kChunk = 1024;
    std::vector<std::size_t> rows;
    for (std::size_t start = 0; start < corpus.size(); start += kChunk) {
        const std::size_t count = std::min(kChunk, corpus.size() - start);
        rows.resize(count);
        std::iota(rows.begin(), rows.end(), start);
        latents_.middleRows(static_cast<long>(start), static_cast<long>(count)) =
            encode_latent_batch(autoencoder, corpus.feature_matrix(rows));
    }
    for (std::size_t i = 0; i < corpus.size(); ++i)
        targets_(static_cast<long>(i), 0) = static_cast<float>(normalize_cp(corpus.cp(i)));
}

void EvaluatorSource::gather(std::span<const std::size_t> rows, Matrix<float>& x, Matrix<float>& y) const {
    x.resize(static_cast<long>(rows.size()), kLatentDim);
    y.resize(static_cast<long>(rows.size()), 1);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        x.row(static_cast<long>(r)) = latents_.row(static_cast<long>(rows[r]));
        y(static_cast<long>(r), 0) = targets_(static_cast<long>(rows[r]), 0);
    }
}

// ---- metrics ------------------------------------------------------------------

namespace {

template <class Fn>
void for_chunks(std::size_t n, Fn&& fn) {
    constexpr std::size_t kChunk = 1024;
    std::vector<std::size_t> rows;
    for (std::size_t start = 0; start < n; start += kChunk) {
        rows.resize(std::min(kChunk, n - start));
        std::iota(rows.begin(), rows.end(), start);
        fn(std::span<const std::size_t>(rows));
    }
}

double bit_accuracy_of(const Network& ae, const EncodedCorpus& corpus) {
    if (corpus.size() == 0) return 0.0;
    std::uint64_t correct = 0;
    for_chunks(corpus.size(), [&](std::span<const std::size_t> rows) {
        const Matrix<float> x = corpus.feature_matrix(rows);
        const Matrix<float> y = nn::forward(ae, x);
        correct += static_cast<std::uint64_t>(((y.array() >= 0.5f) == (x.array() >= 0.5f)).count());
    });
    return static_cast<double>(correct) / (static_cast<double>(corpus.size()) * encoding::kFeatureCount);
}

double class_accuracy_of(const Network& classifier, const EncodedCorpus& corpus) {
    if (corpus.size() == 0) return 0.0;
    std::size_t correct = 0;
    for_chunks(corpus.size(), [&](std::span<const std::size_t> rows) {
        const Matrix<float> p = nn::forward(classifier, corpus.feature_matrix(rows));
        for (long r = 0; r < p.rows(); ++r) {
            Eigen::Index best;
            p.row(r).maxCoeff(&best);
            if (static_cast<int>(best) == static_cast<int>(label(corpus.cp(rows[static_cast<std::size_t>(r)]))))
                ++correct;
        }
    });
    return static_cast<double>(correct) / static_cast<double>(corpus.size());
}

EvaluatorMetrics metrics_from(const Matrix<float>& pred, const Matrix<float>& target, const EncodedCorpus& corpus,
                              Centipawns sign_threshold) {
    EvaluatorMetrics m;
    const auto n = static_cast<double>(pred.rows());
    if (pred.rows() == 0) return m;
    double se = 0.0, ae = 0.0;
    std::size_t agree = 0;
    for (long i = 0; i < pred.rows(); ++i) {
        const double d = static_cast<double>(pred(i, 0)) - static_cast<double>(target(i, 0));
        se += d * d;
        ae += std::abs(d);
        const Centipawns cp = corpus.cp(static_cast<std::size_t>(i));
        if (std::abs(cp) >= sign_threshold) {
            ++m.sign_samples;
            if ((pred(i, 0) > 0.0f) == (cp > 0)) ++agree;
        }
    }
    m.mse = se / n;
    m.mae_cp = ae / n * kEvalCap;
    m.rmse_cp = mse_to_cp_rmse(m.mse);
    m.linear_cp = mse_to_cp_linear(m.mse);
    m.sign_agreement = m.sign_samples ? static_cast<double>(agree) / static_cast<double>(m.sign_samples) : 0.0;
    return m;
}

}  // namespace

double reconstruction_bit_accuracy(const Network& autoencoder, const EncodedCorpus& corpus) {
    return bit_accuracy_of(autoencoder, corpus);
}

double classification_accuracy(const Network& classifier, const EncodedCorpus& corpus) {
    return class_accuracy_of(classifier, corpus);
}

EvaluatorMetrics evaluator_metrics(const Network& autoencoder, const Network& evaluator, const EncodedCorpus& corpus,
                                   Centipawns sign_threshold) {
    const EvaluatorSource source(autoencoder, corpus);
    return metrics_from(nn::forward(evaluator, source.latents()), source.targets(), corpus, sign_threshold);
}

// ---- training -----------------------------------------------------------------

nn::TrainResult<float> train_autoencoder(Network net, const EncodedCorpus& train, const EncodedCorpus& test,
                                         nn::TrainConfig config) {
    check_autoencoder(net);
    config.loss = nn::LossKind::BinaryCrossEntropy;
    const AutoencoderSource train_src(train), test_src(test);
    return nn::train<float>(std::move(net), train_src, config, [&](const Network& n, nn::EpochMetrics& m) {
        if (test.size() == 0) return;
        m.test_loss = nn::evaluate_loss(n, test_src, nn::LossKind::BinaryCrossEntropy);
        m.test_accuracy = bit_accuracy_of(n, test);
    });
}

nn::TrainResult<float> train_classifier(Network net, const EncodedCorpus& train, const EncodedCorpus& test,
                                        nn::TrainConfig config) {
    check_classifier(net);
    config.loss = nn::LossKind::CategoricalCrossEntropy;
    const ClassifierSource train_src(train), test_src(test);
    return nn::train<float>(std::move(net), train_src, config, [&](const Network& n, nn::EpochMetrics& m) {
        if (test.size() == 0) return;
        m.test_loss = nn::evaluate_loss(n, test_src, nn::LossKind::CategoricalCrossEntropy);
        m.test_accuracy = class_accuracy_of(n, test);
    });
}

nn::TrainResult<float> train_evaluator(Network net, const Network& autoencoder, const EncodedCorpus& train,
                                       const EncodedCorpus& test, nn::TrainConfig config) {
    check_evaluator(net);
    config.loss = nn::LossKind::MeanSquaredError;
    const EvaluatorSource train_src(autoencoder, train);
    const EvaluatorSource test_src(autoencoder, test);
    return nn::train<float>(std::move(net), train_src, config, [&](const Network& n, nn::EpochMetrics& m) {
        if (test.size() == 0) return;
        const auto metrics = metrics_from(nn::forward(n, test_src.latents()), test_src.targets(), test, 300);
        m.test_loss = metrics.mse;
        m.test_accuracy = metrics.sign_agreement;
    });
}

}  // namespace llchess::models
