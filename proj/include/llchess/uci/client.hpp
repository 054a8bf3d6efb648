#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "llchess/uci/process.hpp"

namespace llchess::uci {

struct EngineScore {
    enum class Kind { Cp, Mate };
    Kind kind = Kind::Cp;
    // Side-to-move relative. For Mate: moves to mate, positive when the side to move
    // mates; 0 only when the side to move is already checkmated.
    int value = 0;
    int depth = 0;
    std::string bestmove;  // "(none)" when the position has no legal move
    std::vector<std::string> pv;
};

class EngineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EngineTimeout : public EngineError {
public:
    using EngineError::EngineError;
};

// Anything that can score a position at a fixed depth.
class Analyzer {
public:
    virtual ~Analyzer() = default;
    virtual EngineScore analyze(const std::string& fen, int depth) = 0;
};

using AnalyzerFactory = std::function<std::unique_ptr<Analyzer>()>;

// Folds one engine output line into the running score. Returns true when the line
// was an exact (non-bound) score report for the principal line.
bool parse_info(std::string_view line, EngineScore& score);

enum class EngineState { Created, Handshaken, Searching, Idle, Dead };
const char* to_string(EngineState s);

struct EngineConfig {
    std::string program;
    std::vector<std::string> args;
    std::vector<std::pair<std::string, std::string>> options;  // sent as setoption after uciok
    std::chrono::milliseconds timeout{120000};                  // per analysis
    std::chrono::milliseconds handshake_timeout{10000};
    // Send ucinewgame before every position so results do not depend on earlier searches.
    bool fresh_per_position = true;
};

// Client side of UCI over a child process. Not shareable across threads.
class UciEngine final : public Analyzer {
public:
    explicit UciEngine(EngineConfig config);
    ~UciEngine() override;

    // uci/uciok, options, isready/readyok. Throws EngineError.
    void handshake();
    EngineScore analyze(const std::string& fen, int depth) override;
    void quit();

    EngineState state() const { return state_; }
    const std::string& name() const { return name_; }

private:
    std::string expect(std::string_view prefix, std::chrono::milliseconds timeout);
    void sync();
    void mark_dead();

    EngineConfig config_;
    std::unique_ptr<ChildProcess> proc_;
    EngineState state_ = EngineState::Created;
    std::string name_;
};

// Factory producing handshaken UciEngine instances.
AnalyzerFactory uci_engine_factory(EngineConfig config);

}  // namespace llchess::uci
