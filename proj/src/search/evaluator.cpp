#include "llchess/search/evaluator.hpp"

#include <algorithm>

#include "llchess/chess/movegen.hpp"
#include "llchess/encoding/features.hpp"
#include "llchess/refengine/classical.hpp"

namespace llchess::search {

NeuralEvaluator::NeuralEvaluator(models::Network autoencoder, models::Network evaluator)
    : autoencoder_(std::move(autoencoder)), evaluator_(std::move(evaluator)) {
    models::check_autoencoder(autoencoder_);
    models::check_evaluator(evaluator_);
}

float NeuralEvaluator::evaluate(const chess::Board& board) const {
    const auto active = encoding::active_features(board);
    return models::evaluate_static(evaluator_, models::encode_latent(autoencoder_, active));
}

NeuralClassifier::NeuralClassifier(models::Network classifier) : classifier_(std::move(classifier)) {
    models::check_classifier(classifier_);
}

models::ClassProbabilities NeuralClassifier::classify(const chess::Board& board) const {
    const auto active = encoding::active_features(board);
    return models::classify(classifier_, active);
}

float ClassicalEvaluator::evaluate(const chess::Board& board) const {
    const float v = static_cast<float>(refengine::evaluate_cp(board)) / static_cast<float>(models::kEvalCap);
    return std::clamp(v, -0.999f, 0.999f);
}

float static_eval(const chess::Board& board, const Evaluator& evaluator) {
    if (chess::legal_moves(board).empty()) {
        if (!chess::in_check(board, board.side_to_move())) return 0.0f;
        return board.side_to_move() == chess::Color::White ? -1.0f : 1.0f;
    }
    return evaluator.evaluate(board);
}

}  // namespace llchess::search
