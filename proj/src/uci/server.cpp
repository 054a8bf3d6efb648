#include "llchess/uci/server.hpp"

#include <chrono>
#include <mutex>
#include <sstream>
#include <thread>

#include "llchess/chess/fen.hpp"
#include "llchess/chess/movegen.hpp"

namespace llchess::uci {
namespace {

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}
    void line(const std::string& s) {
        std::lock_guard lock(mutex_);
        out_ << s << '\n';
        out_.flush();
    }

private:
    std::ostream& out_;
    std::mutex mutex_;
};

struct Position {
    chess::Board board = chess::Board::startpos();
    std::vector<std::uint64_t> history;
};

Position parse_position(std::istringstream& in) {
    std::string tok;
    in >> tok;
    Position pos;
    std::vector<std::string> fen_fields;
    if (tok == "startpos") {
        in >> tok;
    } else if (tok == "fen") {
        while (in >> tok && tok != "moves") fen_fields.push_back(tok);
        std::string fen;
        for (const auto& f : fen_fields) fen += (fen.empty() ? "" : " ") + f;
        pos.board = chess::parse_fen(fen);
    } else {
        throw std::invalid_argument("expected 'startpos' or 'fen'");
    }
    if (!in) return pos;
    if (tok != "moves") throw std::invalid_argument("unexpected token '" + tok + "'");
    while (in >> tok) {
        const chess::Move m = chess::parse_uci_move(pos.board, tok);
        pos.history.push_back(pos.board.hash());
        pos.board = pos.board.after(m);
    }
    return pos;
}

GoParams parse_go(std::istringstream& in, std::vector<std::string>& ignored) {
    GoParams p;
    std::string tok;
    while (in >> tok) {
        auto number = [&](auto& target) {
            long long v;
            if (in >> v) target = static_cast<std::remove_reference_t<decltype(*target)>>(v);
        };
        if (tok == "depth")
            number(p.depth);
        else if (tok == "movetime")
            number(p.movetime_ms);
        else if (tok == "nodes")
            number(p.nodes);
        else if (tok == "infinite")
            p.infinite = true;
        else {
            ignored.push_back(tok);
            if (tok == "wtime" || tok == "btime" || tok == "winc" || tok == "binc" || tok == "movestogo" ||
                tok == "mate") {
                std::string skip;
                in >> skip;
            }
        }
    }
    return p;
}

}  // namespace

std::string format_info(const IterationReport& r) {
    std::ostringstream s;
    const auto ms = static_cast<std::uint64_t>(r.elapsed_s * 1000.0);
    const auto nps = r.elapsed_s > 0 ? static_cast<std::uint64_t>(static_cast<double>(r.nodes) / r.elapsed_s) : 0;
    s << "info depth " << r.depth << " score " << (r.score.mate ? "mate " : "cp ") << r.score.value << " nodes "
      << r.nodes << " nps " << nps << " time " << ms;
    if (!r.pv.empty()) {
        s << " pv";
        for (const auto& m : r.pv) s << ' ' << m.uci();
    }
    return s.str();
}

void server_loop(std::istream& in, std::ostream& out, EngineFacade& engine) {
    Writer writer(out);
    Position position;
    std::atomic<bool> stop{false};
    std::thread worker;
    bool infinite = false;

    // Joins the worker. An infinite search is always stopped since it would never end.
    auto finish_search = [&](bool force_stop) {
        if (!worker.joinable()) return;
        if (force_stop || infinite) stop = true;
        worker.join();
    };

    auto start_search = [&](GoParams params) {
        finish_search(true);
        stop = false;
        infinite = params.infinite;
        const auto legal = chess::legal_moves(position.board);
        if (legal.empty()) {
            writer.line("info string no legal moves in this position");
            writer.line("bestmove (none)");
            return;
        }
        worker = std::thread([&, params, legal, pos = position] {
            chess::Move best = legal[0];
            try {
                best = engine.go(pos.board, pos.history, params, stop,
                                 [&](const IterationReport& r) { writer.line(format_info(r)); });
            } catch (const std::exception& e) {
                writer.line(std::string("info string search failed: ") + e.what());
            }
            if (!legal.contains(best)) {
                writer.line("info string engine proposed illegal move " + best.uci());
                best = legal[0];
            }
            while (params.infinite && !stop) std::this_thread::sleep_for(std::chrono::milliseconds(1));
            writer.line("bestmove " + best.uci());
        });
    };

    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream cmd(line);
        std::string tok;
        if (!(cmd >> tok)) continue;
        if (tok == "uci") {
            writer.line("id name " + engine.name());
            writer.line("id author " + engine.author());
            for (const auto& o : engine.options()) {
                std::string s = "option name " + o.name + " type " + o.type;
                if (!o.default_value.empty()) s += " default " + o.default_value;
                if (!o.min.empty()) s += " min " + o.min;
                if (!o.max.empty()) s += " max " + o.max;
                writer.line(s);
            }
            writer.line("uciok");
        } else if (tok == "isready") {
            writer.line("readyok");
        } else if (tok == "setoption") {
            std::string name, value, word;
            std::string* target = nullptr;
            while (cmd >> word) {
                if (word == "name") {
                    target = &name;
                } else if (word == "value") {
                    target = &value;
                } else if (target) {
                    if (!target->empty()) *target += ' ';
                    *target += word;
                }
            }
            finish_search(false);
            if (!engine.set_option(name, value)) writer.line("info string unsupported option " + name);
        } else if (tok == "ucinewgame") {
            finish_search(true);
            engine.new_game();
            position = Position{};
        } else if (tok == "position") {
            try {
                Position p = parse_position(cmd);
                finish_search(false);
                position = std::move(p);
            } catch (const std::exception& e) {
                writer.line(std::string("info string invalid position: ") + e.what());
            }
        } else if (tok == "go") {
            std::vector<std::string> ignored;
            const GoParams params = parse_go(cmd, ignored);
            for (const auto& f : ignored) writer.line("info string ignoring go parameter " + f);
            start_search(params);
        } else if (tok == "stop") {
            finish_search(true);
        } else if (tok == "quit") {
            finish_search(true);
            return;
        }
    }
    // End of input: let a bounded search complete.
    finish_search(false);
}

}  // namespace llchess::uci
