#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "llchess/chess/board.hpp"
#include "llchess/uci/server.hpp"

// A conventional handcrafted engine (material + piece-square tables, alpha-beta with
// quiescence). It serves as the reference engine for labeling and benchmarking when no
// external engine is installed, and as a cheap deterministic evaluator for tests.
namespace llchess::refengine {

inline constexpr int kPieceValue[6] = {100, 320, 330, 500, 900, 0};

// White-relative static score in centipawns.
int evaluate_cp(const chess::Board& board);

struct Limits {
    int depth = 12;
    std::optional<std::chrono::milliseconds> movetime;
    std::optional<std::uint64_t> nodes;
};

struct Result {
    chess::Move best{};
    bool has_move = false;
    uci::UciScore score;  // side to move
    int depth = 0;
    std::vector<chess::Move> pv;
    std::uint64_t nodes = 0;
};

// Single-threaded and deterministic given the same sequence of calls.
class ClassicalEngine {
public:
    explicit ClassicalEngine(std::size_t tt_entries = 1 << 20);
    ~ClassicalEngine();
    ClassicalEngine(const ClassicalEngine&) = delete;
    ClassicalEngine& operator=(const ClassicalEngine&) = delete;

    void new_game();
    Result search(const chess::Board& root, const std::vector<std::uint64_t>& history, const Limits& limits,
                  const std::atomic<bool>* stop = nullptr,
                  const std::function<void(const uci::IterationReport&)>& on_iteration = {});

private:
    struct Impl;
    Impl* impl_;
};

class ClassicalFacade final : public uci::EngineFacade {
public:
    std::string name() const override { return "llchess-ref"; }
    std::vector<uci::UciOption> options() const override;
    bool set_option(const std::string& name, const std::string& value) override;
    void new_game() override { engine_->new_game(); }
    chess::Move go(const chess::Board& root, const std::vector<std::uint64_t>& history, const uci::GoParams& params,
                   const std::atomic<bool>& stop,
                   const std::function<void(const uci::IterationReport&)>& on_iteration) override;

private:
    std::unique_ptr<ClassicalEngine> engine_ = std::make_unique<ClassicalEngine>();
};

}  // namespace llchess::refengine
