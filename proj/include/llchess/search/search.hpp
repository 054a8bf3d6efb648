#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "llchess/chess/movegen.hpp"
#include "llchess/search/evaluator.hpp"
#include "llchess/search/tt.hpp"
#include "llchess/uci/server.hpp"

namespace llchess::search {

// Search values are side-to-move relative on the normalized scale. Mates live in a
// band beyond +-1: being mated at ply p scores -(2 - p/1024), so nearer mates
// dominate. Steps are powers of two so band arithmetic is exact in float.
inline constexpr float kMateValue = 2.0f;
inline constexpr float kMateStep = 1.0f / 1024.0f;
inline constexpr float kInfinity = 4.0f;
inline constexpr int kMaxSearchDepth = 60;

constexpr float mated_in(int ply) { return -(kMateValue - static_cast<float>(ply) * kMateStep); }
inline bool is_mate_value(float v) { return std::fabs(v) > 1.5f; }
// Mate values become "mate N" (moves, negative when being mated), others centipawns.
uci::UciScore to_uci_score(float value);

struct SearchConfig {
    int max_depth = 5;
    unsigned threads = 1;
    std::size_t tt_entries = std::size_t{1} << 20;
    bool use_ordering = true;
    bool use_tt = true;
    bool use_gate = true;  // needs a classifier
    float prune_tau = 0.99f;
    int prune_max_depth = 2;
    std::optional<std::chrono::milliseconds> movetime;
    std::optional<std::uint64_t> max_nodes;

    // Throws std::invalid_argument.
    void validate() const;
};

struct SearchResult {
    chess::Move bestmove{};
    float value = 0.0f;         // side to move at the root
    models::Centipawns cp = 0;  // value in centipawns; mates map to +-10000
    uci::UciScore score;
    std::vector<chess::Move> pv;
    std::uint64_t nodes = 0;
    int depth = 0;  // deepest completed iteration
    double elapsed_s = 0.0;
    double nps = 0.0;
    std::uint64_t gate_prunes = 0;
};

class SearchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// TT move first, then captures by most valuable victim / least valuable attacker,
// then the rest in generation order. Stable.
chess::MoveList order_moves(const chess::Board& board, const chess::MoveList& moves, MoveCode tt_hint = kNoMove);

enum class GateVerdict { None, FailLow, FailHigh };

// Prunes only shallow (1 <= remaining <= prune_max_depth), non-PV, not-in-check nodes
// where the classifier's probability that the side to move is lost (FailLow) or won
// (FailHigh) strictly exceeds tau. The search applies a verdict only when the bound it
// returns is no stronger than the evaluator's range: FailLow needs alpha >= -1, FailHigh
// beta <= 1.
GateVerdict classifier_gate(const chess::Board& board, int remaining_depth, bool pv_node, bool in_check,
                            const PositionClassifier& classifier, const SearchConfig& config);

// Alpha-beta negamax (fail-hard) with iterative deepening and root splitting.
class Searcher {
public:
    explicit Searcher(const Evaluator& evaluator, const PositionClassifier* classifier = nullptr,
                      SearchConfig config = {});
    ~Searcher();

    using IterationCallback = std::function<void(const uci::IterationReport&)>;

    // `history` holds the hashes of the game positions before the root, oldest first.
    // Throws SearchError when the root has no legal move.
    SearchResult search(const chess::Board& root, const std::vector<std::uint64_t>& history = {},
                        const std::atomic<bool>* stop = nullptr, const IterationCallback& on_iteration = {});

    // One fixed-depth search from the root, side-to-move value. Honors ordering, TT and
    // gate settings; nodes are added to last_nodes().
    float alphabeta(const chess::Board& board, int depth, float alpha = -kInfinity, float beta = kInfinity);
    std::uint64_t last_nodes() const { return last_nodes_; }

    void new_game();
    SearchConfig& config() { return config_; }
    const SearchConfig& config() const { return config_; }
    TranspositionTable& tt();

private:
    struct Worker;
    struct Shared;
    void ensure_tt();

    const Evaluator& evaluator_;
    const PositionClassifier* classifier_;
    SearchConfig config_;
    std::unique_ptr<TranspositionTable> tt_;
    std::uint64_t last_nodes_ = 0;
};

// Exposes a Searcher over UCI with Threads, Hash and PruneTau options.
class SearchFacade final : public uci::EngineFacade {
public:
    SearchFacade(std::unique_ptr<Evaluator> evaluator, std::unique_ptr<PositionClassifier> classifier,
                 SearchConfig config, std::string name = "llchess");
    std::string name() const override { return name_; }
    std::vector<uci::UciOption> options() const override;
    bool set_option(const std::string& name, const std::string& value) override;
    void new_game() override { searcher_.new_game(); }
    chess::Move go(const chess::Board& root, const std::vector<std::uint64_t>& history, const uci::GoParams& params,
                   const std::atomic<bool>& stop,
                   const std::function<void(const uci::IterationReport&)>& on_iteration) override;

private:
    std::unique_ptr<Evaluator> evaluator_;
    std::unique_ptr<PositionClassifier> classifier_;
    Searcher searcher_;
    std::string name_;
};

}  // namespace llchess::search
