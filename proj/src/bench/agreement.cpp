#include "llchess/bench/agreement.hpp"

#include <atomic>
#include <charconv>
#include <sstream>
#include <thread>

#include "llchess/chess/fen.hpp"
#include "llchess/chess/movegen.hpp"

namespace llchess::bench {

using chess::Color;

std::string RefScore::to_string() const { return (mate ? "mate:" : "cp:") + std::to_string(value); }

RefScore RefScore::parse(const std::string& text) {
    RefScore s;
    std::string_view num;
    if (text.rfind("cp:", 0) == 0) {
        num = std::string_view(text).substr(3);
    } else if (text.rfind("mate:", 0) == 0) {
        s.mate = true;
        num = std::string_view(text).substr(5);
    } else {
        throw std::invalid_argument("bad score '" + text + "'");
    }
    const auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), s.value);
    if (ec != std::errc{} || p != num.data() + num.size() || (s.mate && s.value == 0))
        throw std::invalid_argument("bad score '" + text + "'");
    return s;
}

RefScore white_relative(const uci::EngineScore& score, Color side_to_move) {
    const int sign = side_to_move == Color::White ? 1 : -1;
    if (score.kind == uci::EngineScore::Kind::Mate) {
        // "mate 0": the side to move is already mated.
        const int v = score.value == 0 ? -1 : score.value;
        return {true, sign * v};
    }
    return {false, sign * score.value};
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::AgreeExact: return "agree-exact";
        case Verdict::AgreeEqualStrength: return "agree-equal-strength";
        case Verdict::Disagree: return "disagree";
    }
    return "?";
}

namespace {

// Total order from the mover's view: mates for the mover (sooner is better) above all
// centipawn scores, mates against the mover (later is better) below them.
long long rank(const RefScore& s, Color mover) {
    const int sign = mover == Color::White ? 1 : -1;
    const long long v = static_cast<long long>(sign) * s.value;
    if (!s.mate) return v;
    return v > 0 ? (1LL << 40) - v : -(1LL << 40) - v;
}

}  // namespace

Verdict judge(const std::string& our_move, const std::string& ref_best, const RefScore& after_ours,
              const RefScore& after_best, Color mover, int eps_cp) {
    if (our_move == ref_best) return Verdict::AgreeExact;
    const int sign = mover == Color::White ? 1 : -1;
    const bool our_wins = after_ours.mate && sign * after_ours.value > 0;
    const bool best_wins = after_best.mate && sign * after_best.value > 0;
    const bool our_loses = after_ours.mate && !our_wins;
    const bool best_loses = after_best.mate && !best_wins;
    bool equal;
    if (!after_ours.mate && !after_best.mate)
        equal = std::abs(after_ours.value - after_best.value) <= eps_cp;
    else
        equal = (our_wins && best_wins) || (our_loses && best_loses);
    if (equal || rank(after_ours, mover) >= rank(after_best, mover)) return Verdict::AgreeEqualStrength;
    return Verdict::Disagree;
}

std::vector<AgreementRecord> run_agreement(std::span<const std::string> fens, const MovePicker& ours,
                                           const uci::AnalyzerFactory& reference, const AgreementConfig& config) {
    std::vector<AgreementRecord> records(fens.size());
    for (std::size_t i = 0; i < fens.size(); ++i) {
        AgreementRecord& r = records[i];
        r.fen = fens[i];
        try {
            const auto board = chess::parse_fen(r.fen);
            if (chess::legal_moves(board).empty()) throw std::invalid_argument("position has no legal move");
            const OurChoice c = ours(board, config.our_depth);
            chess::parse_uci_move(board, c.move);
            r.our_move = c.move;
            r.our_value_cp = c.value_cp;
        } catch (const std::exception& e) {
            r.quarantined = true;
            r.error = std::string("our engine: ") + e.what();
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        std::unique_ptr<uci::Analyzer> analyzer;
        for (std::size_t i = next++; i < records.size(); i = next++) {
            AgreementRecord& r = records[i];
            if (r.quarantined) continue;
            std::string failure;
            bool done = false;
            for (int attempt = 0; attempt < 2 && !done; ++attempt) {
                try {
                    if (!analyzer) analyzer = reference();
                    const auto board = chess::parse_fen(r.fen);
                    const Color mover = board.side_to_move();
                    const auto root = analyzer->analyze(r.fen, config.ref_depth);
                    r.ref_best_move = root.bestmove;
                    r.ref_eval_best = white_relative(root, mover);
                    if (r.our_move == r.ref_best_move) {
                        r.ref_eval_our = r.ref_eval_best;
                    } else {
                        const auto child = board.after(chess::parse_uci_move(board, r.our_move));
                        const auto replies = chess::legal_moves(child);
                        if (replies.empty()) {
                            const bool mate = chess::in_check(child, child.side_to_move());
                            r.ref_eval_our = mate ? RefScore{true, mover == Color::White ? 1 : -1} : RefScore{};
                        } else {
                            const int d = std::max(1, config.ref_depth - config.child_depth_offset);
                            const auto s = analyzer->analyze(chess::serialize_fen(child), d);
                            r.ref_eval_our = white_relative(s, child.side_to_move());
                            // Count mates by the mover from the root, as the root analysis does.
                            const int mover_sign = mover == Color::White ? 1 : -1;
                            if (r.ref_eval_our.mate && r.ref_eval_our.value * mover_sign > 0)
                                r.ref_eval_our.value += mover_sign;
                        }
                    }
                    r.verdict = judge(r.our_move, r.ref_best_move, r.ref_eval_our, r.ref_eval_best, mover,
                                      config.eps_cp);
                    done = true;
                } catch (const std::exception& e) {
                    analyzer.reset();
                    failure = e.what();
                }
            }
            if (!done) {
                r.quarantined = true;
                r.error = "reference engine: " + failure;
            }
        }
    };
    const unsigned n = std::max(1u, config.workers);
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < n; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return records;
}

AgreementSummary summarize(std::span<const AgreementRecord> records) {
    AgreementSummary s;
    s.samples = records.size();
    for (const auto& r : records) {
        if (r.quarantined) {
            ++s.quarantined;
            continue;
        }
        switch (r.verdict) {
            case Verdict::AgreeExact: ++s.agree_exact; break;
            case Verdict::AgreeEqualStrength: ++s.agree_equal; break;
            case Verdict::Disagree: ++s.disagree; break;
        }
    }
    const std::size_t judged = s.samples - s.quarantined;
    s.agreement = judged ? static_cast<double>(s.agree_exact + s.agree_equal) / static_cast<double>(judged) : 0.0;
    return s;
}

std::vector<AgreementRecord> replay_recorded(std::istream& in, int eps_cp) {
    std::vector<AgreementRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> f;
        std::istringstream s(line);
        for (std::string field; std::getline(s, field, '\t');) f.push_back(field);
        if (f.size() != 6) throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 6 fields");
        AgreementRecord r;
        r.fen = f[0];
        const auto board = chess::parse_fen(r.fen);
        r.our_move = f[1];
        r.our_value_cp = std::stoi(f[2]);
        r.ref_best_move = f[3];
        r.ref_eval_our = RefScore::parse(f[4]);
        r.ref_eval_best = RefScore::parse(f[5]);
        chess::parse_uci_move(board, r.our_move);
        chess::parse_uci_move(board, r.ref_best_move);
        r.verdict = judge(r.our_move, r.ref_best_move, r.ref_eval_our, r.ref_eval_best, board.side_to_move(), eps_cp);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<std::string> read_fen_list(std::istream& in) {
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        const auto e = line.find_last_not_of(" \t\r");
        std::string fen = line.substr(b, e - b + 1);
        chess::parse_fen(fen);
        out.push_back(std::move(fen));
    }
    return out;
}

}  // namespace llchess::bench
