#include "llchess/uci/client.hpp"

#include <charconv>
#include <sstream>

namespace llchess::uci {
namespace {

bool starts_with_token(std::string_view line, std::string_view word) {
    return line.substr(0, word.size()) == word && (line.size() == word.size() || line[word.size()] == ' ');
}

bool to_int(const std::string& s, int& out) {
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

const char* to_string(EngineState s) {
    switch (s) {
        case EngineState::Created: return "created";
        case EngineState::Handshaken: return "handshaken";
        case EngineState::Searching: return "searching";
        case EngineState::Idle: return "idle";
        case EngineState::Dead: return "dead";
    }
    return "?";
}

bool parse_info(std::string_view line, EngineScore& score) {
    if (!starts_with_token(line, "info")) return false;
    std::istringstream in{std::string(line)};
    std::string tok;
    in >> tok;
    int depth = -1, value = 0, multipv = 1;
    bool have_score = false, bound = false;
    EngineScore::Kind kind = EngineScore::Kind::Cp;
    std::vector<std::string> pv;
    while (in >> tok) {
        if (tok == "string") return false;
        if (tok == "depth") {
            std::string v;
            in >> v;
            if (!to_int(v, depth)) return false;
        } else if (tok == "multipv") {
            std::string v;
            in >> v;
            if (!to_int(v, multipv)) return false;
        } else if (tok == "score") {
            std::string k, v;
            in >> k >> v;
            if (k == "cp")
                kind = EngineScore::Kind::Cp;
            else if (k == "mate")
                kind = EngineScore::Kind::Mate;
            else
                return false;
            if (!to_int(v, value)) return false;
            have_score = true;
        } else if (tok == "lowerbound" || tok == "upperbound") {
            bound = true;
        } else if (tok == "pv") {
            while (in >> tok) pv.push_back(tok);
        }
    }
    if (!have_score || bound || multipv != 1) return false;
    score.kind = kind;
    score.value = value;
    if (depth >= 0) score.depth = depth;
    score.pv = std::move(pv);
    return true;
}

UciEngine::UciEngine(EngineConfig config) : config_(std::move(config)) {
    try {
        proc_ = std::make_unique<ChildProcess>(config_.program, config_.args);
    } catch (const ProcessError& e) {
        state_ = EngineState::Dead;
        throw EngineError(e.what());
    }
}

UciEngine::~UciEngine() {
    try {
        quit();
    } catch (...) {
    }
}

void UciEngine::mark_dead() {
    state_ = EngineState::Dead;
    if (proc_) proc_->kill();
}

std::string UciEngine::expect(std::string_view prefix, std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
        const auto left =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        std::optional<std::string> line;
        try {
            line = proc_->read_line(std::max(left, std::chrono::milliseconds(0)));
        } catch (const ProcessError& e) {
            mark_dead();
            throw EngineError(std::string("engine died: ") + e.what());
        }
        if (!line) throw EngineTimeout("timed out waiting for '" + std::string(prefix) + "'");
        if (starts_with_token(*line, prefix)) return *line;
        if (starts_with_token(*line, "id") && line->rfind("id name ", 0) == 0) name_ = line->substr(8);
    }
}

void UciEngine::sync() {
    proc_->write_line("isready");
    expect("readyok", config_.handshake_timeout);
}

void UciEngine::handshake() {
    if (state_ != EngineState::Created) throw EngineError(std::string("handshake in state ") + to_string(state_));
    try {
        proc_->write_line("uci");
        expect("uciok", config_.handshake_timeout);
        for (const auto& [k, v] : config_.options) proc_->write_line("setoption name " + k + " value " + v);
        sync();
    } catch (const EngineTimeout&) {
        mark_dead();
        throw;
    } catch (const ProcessError& e) {
        mark_dead();
        throw EngineError(e.what());
    }
    state_ = EngineState::Handshaken;
}

EngineScore UciEngine::analyze(const std::string& fen, int depth) {
    if (state_ != EngineState::Handshaken && state_ != EngineState::Idle)
        throw EngineError(std::string("analyze in state ") + to_string(state_));
    EngineScore score;
    try {
        if (config_.fresh_per_position) {
            proc_->write_line("ucinewgame");
            sync();
        }
        proc_->write_line("position fen " + fen);
        proc_->write_line("go depth " + std::to_string(depth));
        state_ = EngineState::Searching;

        const auto deadline = std::chrono::steady_clock::now() + config_.timeout;
        while (true) {
            const auto left =
                std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
            std::optional<std::string> line;
            if (left.count() > 0) line = proc_->read_line(left);
            if (!line) {
                proc_->write_line("stop");
                try {
                    expect("bestmove", std::chrono::milliseconds(2000));
                    state_ = EngineState::Idle;
                } catch (const EngineTimeout&) {
                    mark_dead();
                }
                throw EngineTimeout("analysis timed out for " + fen);
            }
            if (starts_with_token(*line, "bestmove")) {
                std::istringstream in(*line);
                std::string tok;
                in >> tok >> score.bestmove;
                break;
            }
            parse_info(*line, score);
        }
    } catch (const ProcessError& e) {
        mark_dead();
        throw EngineError(std::string("engine died: ") + e.what());
    }
    state_ = EngineState::Idle;
    if (score.bestmove.empty()) throw EngineError("malformed bestmove line");
    return score;
}

void UciEngine::quit() {
    if (!proc_ || state_ == EngineState::Dead) return;
    try {
        if (state_ == EngineState::Searching) proc_->write_line("stop");
        proc_->write_line("quit");
    } catch (const ProcessError&) {
    }
    proc_->wait_exit(std::chrono::milliseconds(1000));
    state_ = EngineState::Dead;
}

AnalyzerFactory uci_engine_factory(EngineConfig config) {
    return [config]() -> std::unique_ptr<Analyzer> {
        auto engine = std::make_unique<UciEngine>(config);
        engine->handshake();
        return engine;
    };
}

}  // namespace llchess::uci
