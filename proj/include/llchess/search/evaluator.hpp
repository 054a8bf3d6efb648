#pragma once

#include <memory>

#include "llchess/chess/board.hpp"
#include "llchess/models/zoo.hpp"

namespace llchess::search {

// Leaf heuristic: white-relative value in [-1, 1] for a nonterminal position.
// Implementations must be safe to call concurrently.
class Evaluator {
public:
    virtual ~Evaluator() = default;
    virtual float evaluate(const chess::Board& board) const = 0;
};

// Probabilities in PositionClass order (black winning, drawish, white winning).
class PositionClassifier {
public:
    virtual ~PositionClassifier() = default;
    virtual models::ClassProbabilities classify(const chess::Board& board) const = 0;
};

// Autoencoder latent fed to the evaluator network.
class NeuralEvaluator final : public Evaluator {
public:
    NeuralEvaluator(models::Network autoencoder, models::Network evaluator);
    float evaluate(const chess::Board& board) const override;
    const models::Network& autoencoder() const { return autoencoder_; }
    const models::Network& evaluator() const { return evaluator_; }

private:
    models::Network autoencoder_;
    models::Network evaluator_;
};

class NeuralClassifier final : public PositionClassifier {
public:
    explicit NeuralClassifier(models::Network classifier);
    models::ClassProbabilities classify(const chess::Board& board) const override;

private:
    models::Network classifier_;
};

// Handcrafted material and piece-square score scaled onto the normalized range.
class ClassicalEvaluator final : public Evaluator {
public:
    float evaluate(const chess::Board& board) const override;
};

// Terminal-aware static evaluation, white-relative: side to move checkmated gives
// -1 for white / +1 for black, stalemate 0, otherwise the evaluator's value.
float static_eval(const chess::Board& board, const Evaluator& evaluator);

}  // namespace llchess::search
