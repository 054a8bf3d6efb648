#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "llchess/chess/board.hpp"

namespace llchess::uci {

struct GoParams {
    std::optional<int> depth;
    std::optional<int> movetime_ms;
    std::optional<std::uint64_t> nodes;
    bool infinite = false;
};

// Side-to-move relative: centipawns, or moves to mate (negative when being mated).
struct UciScore {
    bool mate = false;
    int value = 0;
};

struct IterationReport {
    int depth = 0;
    UciScore score;
    std::uint64_t nodes = 0;
    double elapsed_s = 0.0;
    std::vector<chess::Move> pv;
};

struct UciOption {
    std::string name;
    std::string type;  // "spin", "check", "string", "button"
    std::string default_value;
    std::string min;
    std::string max;
};

// What the server needs from an engine. go() runs on the search worker thread and
// must return promptly once `stop` becomes true, with the best move of the last
// completed iteration.
class EngineFacade {
public:
    virtual ~EngineFacade() = default;
    virtual std::string name() const = 0;
    virtual std::string author() const { return "llchess"; }
    virtual std::vector<UciOption> options() const { return {}; }
    // Returns false for unknown options or bad values.
    virtual bool set_option(const std::string& name, const std::string& value) {
        (void)name;
        (void)value;
        return false;
    }
    virtual void new_game() {}
    virtual chess::Move go(const chess::Board& root, const std::vector<std::uint64_t>& history, const GoParams& params,
                           const std::atomic<bool>& stop,
                           const std::function<void(const IterationReport&)>& on_iteration) = 0;
};

std::string format_info(const IterationReport& r);

// Reads UCI commands until "quit" or end of input. At end of input a running search
// is allowed to finish (an infinite one is stopped) and its bestmove is written.
void server_loop(std::istream& in, std::ostream& out, EngineFacade& engine);

}  // namespace llchess::uci
