#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "llchess/chess/board.hpp"
#include "llchess/encoding/features.hpp"
#include "llchess/models/transforms.hpp"
#include "llchess/nn/trainer.hpp"

namespace llchess::models {

using Network = nn::NetworkParams<float>;

inline constexpr long kLatentDim = 128;
inline constexpr long kEvaluatorWidth = 2048;
inline constexpr double kAutoencoderDropout = 0.25;
inline constexpr double kClassifierDropout = 0.25;
inline constexpr double kEvaluatorDropout = 0.30;
// Weight layers belonging to the encoder half of the autoencoder.
inline constexpr std::size_t kEncoderLayers = 3;

inline constexpr std::uint64_t kAutoencoderSeed = 775;
inline constexpr std::uint64_t kClassifierSeed = 1024;
inline constexpr std::uint64_t kEvaluatorSeed = 2048;

// 775 -> 512 -> 256 -> 128 -> 256 -> 512 -> 775, tanh hidden, sigmoid output.
Network build_autoencoder(std::uint64_t seed = kAutoencoderSeed);
// 775 -> 1024 -> 512 -> 256 -> 3, relu hidden, softmax output.
Network build_classifier(std::uint64_t seed = kClassifierSeed);
// 128 -> w -> w -> w -> 1, relu hidden, tanh output; w = 2048 at full size.
Network build_evaluator(std::uint64_t seed = kEvaluatorSeed, long hidden_width = kEvaluatorWidth);

using LatentVector = nn::RowVector<float>;
using ClassProbabilities = std::array<float, kClassCount>;

// Single-position inference. The first layer is evaluated as a sum over the set
// features, which is exact for binary inputs. All are infer-mode and pure.
LatentVector encode_latent(const Network& autoencoder, const encoding::FeatureVector& features);
LatentVector encode_latent(const Network& autoencoder, std::span<const std::uint32_t> active_features);
ClassProbabilities classify(const Network& classifier, const encoding::FeatureVector& features);
ClassProbabilities classify(const Network& classifier, std::span<const std::uint32_t> active_features);
// Normalized white-relative value in (-1, 1).
float evaluate_static(const Network& evaluator, const LatentVector& latent);

// Batched counterparts (dense path), rows are samples.
nn::Matrix<float> encode_latent_batch(const Network& autoencoder, const nn::Matrix<float>& features);
nn::Matrix<float> reconstruct_batch(const Network& autoencoder, const nn::Matrix<float>& features);

// Throws std::invalid_argument when a network does not have the expected interface dims.
void check_autoencoder(const Network& n);
void check_classifier(const Network& n);
void check_evaluator(const Network& n);

// Encoded positions with their white-relative centipawn labels.
class EncodedCorpus {
public:
    void add(const chess::Board& board, Centipawns cp);
    void add(const encoding::FeatureVector& features, Centipawns cp);
    std::size_t size() const { return cp_.size(); }
    std::span<const std::uint8_t> features(std::size_t i) const {
        return {features_.data() + i * encoding::kFeatureCount, encoding::kFeatureCount};
    }
    Centipawns cp(std::size_t i) const { return cp_[i]; }
    // Dense float copy of the features of the given rows.
    nn::Matrix<float> feature_matrix(std::span<const std::size_t> rows) const;
    nn::Matrix<float> feature_matrix() const;
    EncodedCorpus subset(std::span<const std::size_t> rows) const;

private:
    std::vector<std::uint8_t> features_;
    std::vector<Centipawns> cp_;
};

// Batch sources over a corpus for each model's training target.
class AutoencoderSource final : public nn::BatchSource<float> {
public:
    explicit AutoencoderSource(const EncodedCorpus& corpus) : corpus_(corpus) {}
    std::size_t size() const override { return corpus_.size(); }
    long input_dim() const override { return encoding::kFeatureCount; }
    long target_dim() const override { return encoding::kFeatureCount; }
    void gather(std::span<const std::size_t> rows, nn::Matrix<float>& x, nn::Matrix<float>& y) const override;

private:
    const EncodedCorpus& corpus_;
};

class ClassifierSource final : public nn::BatchSource<float> {
public:
    explicit ClassifierSource(const EncodedCorpus& corpus) : corpus_(corpus) {}
    std::size_t size() const override { return corpus_.size(); }
    long input_dim() const override { return encoding::kFeatureCount; }
    long target_dim() const override { return kClassCount; }
    void gather(std::span<const std::size_t> rows, nn::Matrix<float>& x, nn::Matrix<float>& y) const override;

private:
    const EncodedCorpus& corpus_;
};

// Latents are computed once up front with the (frozen) autoencoder.
class EvaluatorSource final : public nn::BatchSource<float> {
public:
    EvaluatorSource(const Network& autoencoder, const EncodedCorpus& corpus);
    std::size_t size() const override { return static_cast<std::size_t>(latents_.rows()); }
    long input_dim() const override { return kLatentDim; }
    long target_dim() const override { return 1; }
    void gather(std::span<const std::size_t> rows, nn::Matrix<float>& x, nn::Matrix<float>& y) const override;
    const nn::Matrix<float>& latents() const { return latents_; }
    const nn::Matrix<float>& targets() const { return targets_; }

private:
    nn::Matrix<float> latents_;
    nn::Matrix<float> targets_;
};

// ---- metrics ----------------------------------------------------------------

// Fraction of the 775 bits reproduced after thresholding the reconstruction at 0.5.
double reconstruction_bit_accuracy(const Network& autoencoder, const EncodedCorpus& corpus);
double classification_accuracy(const Network& classifier, const EncodedCorpus& corpus);

struct EvaluatorMetrics {
    double mse = 0.0;           // normalized scale
    double mae_cp = 0.0;        // mean |prediction - clamped label| in centipawns
    double rmse_cp = 0.0;       // sqrt(mse) * 5000
    double linear_cp = 0.0;     // mse * 5000
    double sign_agreement = 0.0;  // over samples with |cp| >= sign_threshold
    std::size_t sign_samples = 0;
};
EvaluatorMetrics evaluator_metrics(const Network& autoencoder, const Network& evaluator, const EncodedCorpus& corpus,
                                   Centipawns sign_threshold = 300);

// ---- training ---------------------------------------------------------------

nn::TrainResult<float> train_autoencoder(Network net, const EncodedCorpus& train, const EncodedCorpus& test,
                                         nn::TrainConfig config);
nn::TrainResult<float> train_classifier(Network net, const EncodedCorpus& train, const EncodedCorpus& test,
                                        nn::TrainConfig config);
nn::TrainResult<float> train_evaluator(Network net, const Network& autoencoder, const EncodedCorpus& train,
                                       const EncodedCorpus& test, nn::TrainConfig config);

}  // namespace llchess::models
