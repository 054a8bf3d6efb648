#include "llchess/refengine/classical.hpp"

#include <algorithm>
#include <array>
#include <charconv>

#include "llchess/chess/bitboard.hpp"
#include "llchess/chess/movegen.hpp"

namespace llchess::refengine {

using chess::Board;
using chess::Color;
using chess::Move;
using chess::PieceKind;

namespace {

// Tables are laid out as printed (a8 first) from white's point of view; black
// pieces read them vertically mirrored.
constexpr std::array<std::array<int, 64>, 6> kPst = {{
    {0,  0,  0,  0,   0,   0,  0,  0,  50, 50, 50,  50, 50, 50,  50, 50, 10, 10, 20, 30, 30, 20,
     10, 10, 5,  5,  10,  25,  25, 10, 5,  5,  0,  0,  0,   20, 20, 0,   0,  0,  5,  -5, -10, 0,
     0,  -10, -5, 5,  5,   10,  10, -20, -20, 10, 10, 5,   0,  0,  0,  0,   0,  0,  0,  0},
    {-50, -40, -30, -30, -30, -30, -40, -50, -40, -20, 0,   0,   0,   0,   -20, -40,
     -30, 0,   10,  15,  15,  10,  0,   -30, -30, 5,   15,  20,  20,  15,  5,   -30,
     -30, 0,   15,  20,  20,  15,  0,   -30, -30, 5,   10,  15,  15,  10,  5,   -30,
     -40, -20, 0,   5,   5,   0,   -20, -40, -50, -40, -30, -30, -30, -30, -40, -50},
    {-20, -10, -10, -10, -10, -10, -10, -20, -10, 0,   0,   0,   0,   0,   0,   -10,
     -10, 0,   5,   10,  10,  5,   0,   -10, -10, 5,   5,   10,  10,  5,   5,   -10,
     -10, 0,   10,  10,  10,  10,  0,   -10, -10, 10,  10,  10,  10,  10,  10,  -10,
     -10, 5,   0,   0,   0,   0,   5,   -10, -20, -10, -10, -10, -10, -10, -10, -20},
    {0,  0, 0, 0, 0, 0, 0, 0,  5,  10, 10, 10, 10, 10, 10, 5,  -5, 0, 0, 0, 0, 0,
     0,  -5, -5, 0, 0, 0, 0, 0,  0,  -5, -5, 0,  0,  0,  0,  0,  0, -5, -5, 0, 0, 0,
     0,  0, 0, -5, -5, 0, 0, 0, 0, 0, 0, -5, 0,  0,  0,  5,  5,  0, 0, 0},
    {-20, -10, -10, -5, -5, -10, -10, -20, -10, 0,   0,   0,  0,  0,   0,   -10,
     -10, 0,   5,   5,  5,  5,   0,   -10, -5,  0,   5,   5,  5,  5,   0,   -5,
     0,   0,   5,   5,  5,  5,   0,   -5,  -10, 5,   5,   5,  5,  5,   0,   -10,
     -10, 0,   5,   0,  0,  0,   0,   -10, -20, -10, -10, -5, -5, -10, -10, -20},
    {-30, -40, -40, -50, -50, -40, -40, -30, -30, -40, -40, -50, -50, -40, -40, -30,
     -30, -40, -40, -50, -50, -40, -40, -30, -30, -40, -40, -50, -50, -40, -40, -30,
     -20, -30, -30, -40, -40, -30, -30, -20, -10, -20, -20, -20, -20, -20, -20, -10,
     20,  20,  0,   0,   0,   0,   20,  20,  20,  30,  10,  0,   0,   10,  30,  20},
}};

constexpr std::array<int, 64> kKingEndgame = {
    -50, -40, -30, -20, -20, -30, -40, -50, -30, -20, -10, 0,   0,   -10, -20, -30,
    -30, -10, 20,  30,  30,  20,  -10, -30, -30, -10, 30,  40,  40,  30,  -10, -30,
    -30, -10, 30,  40,  40,  30,  -10, -30, -30, -10, 20,  30,  30,  20,  -10, -30,
    -30, -30, 0,   0,   0,   0,   -30, -30, -50, -30, -30, -30, -30, -30, -30, -50};

constexpr int kPhaseWeight[6] = {0, 1, 1, 2, 4, 0};
constexpr int kMaxPhase = 24;

constexpr int kInf = 32001;
constexpr int kMate = 32000;
constexpr int kMateBound = kMate - 1000;
constexpr int kMaxPly = 120;

enum : std::uint8_t { kExact, kLower, kUpper };

struct TTSlot {
    std::uint64_t key = 0;
    std::int16_t score = 0;
    std::int8_t depth = -1;
    std::uint8_t bound = kExact;
    std::uint16_t move = 0;
};

std::uint16_t code(const Move& m) {
    const int promo = m.promotion ? chess::index(*m.promotion) : 0;
    return static_cast<std::uint16_t>(1 | m.from << 1 | m.to << 7 | promo << 13);
}

int score_to_tt(int s, int ply) { return s > kMateBound ? s + ply : s < -kMateBound ? s - ply : s; }
int score_from_tt(int s, int ply) { return s > kMateBound ? s - ply : s < -kMateBound ? s + ply : s; }

uci::UciScore to_uci(int s) {
    if (s > kMateBound) return {true, (kMate - s + 1) / 2};
    if (s < -kMateBound) return {true, -((kMate + s) / 2)};
    return {false, s};
}

int victim_value(const Board& b, const Move& m) {
    if (m.is_en_passant()) return kPieceValue[0];
    const auto p = b.piece_at(m.to);
    return p ? kPieceValue[chess::index(p->kind)] : 0;
}

}  // namespace

int evaluate_cp(const Board& board) {
    int mg[2] = {0, 0};
    int king_mg[2] = {0, 0};
    int king_eg[2] = {0, 0};
    int phase = 0;
    for (int c = 0; c < 2; ++c) {
        const Color color = static_cast<Color>(c);
        for (int k = 0; k < 6; ++k) {
            chess::Bitboard bb = board.pieces(color, static_cast<PieceKind>(k));
            while (bb) {
                const int sq = chess::pop_lsb(bb);
                const int idx = color == Color::White ? sq : sq ^ 56;
                phase += kPhaseWeight[k];
                if (k == 5) {
                    king_mg[c] += kPst[5][idx];
                    king_eg[c] += kKingEndgame[idx];
                } else {
                    mg[c] += kPieceValue[k] + kPst[k][idx];
                }
            }
        }
        if (chess::popcount(board.pieces(color, PieceKind::Bishop)) >= 2) mg[c] += 30;
    }
    phase = std::min(phase, kMaxPhase);
    int score = mg[0] - mg[1];
    score += ((king_mg[0] - king_mg[1]) * phase + (king_eg[0] - king_eg[1]) * (kMaxPhase - phase)) / kMaxPhase;
    return score;
}

struct ClassicalEngine::Impl {
    explicit Impl(std::size_t n) : tt(std::max<std::size_t>(n, 1)) {}

    std::vector<TTSlot> tt;
    std::array<std::array<std::uint16_t, 2>, kMaxPly + 1> killers{};
    std::array<std::array<std::array<int, 64>, 64>, 2> history{};
    std::vector<std::uint64_t> path;
    std::array<std::array<Move, kMaxPly + 1>, kMaxPly + 1> pv{};
    std::array<int, kMaxPly + 1> pv_len{};

    std::uint64_t nodes = 0;
    bool stopped = false;
    const std::atomic<bool>* stop = nullptr;
    std::optional<std::chrono::steady_clock::time_point> deadline;
    std::optional<std::uint64_t> node_limit;

    TTSlot& slot(std::uint64_t key) { return tt[static_cast<std::size_t>((static_cast<unsigned __int128>(key) * tt.size()) >> 64)]; }

    void check_stop() {
        if (stop && stop->load(std::memory_order_relaxed)) stopped = true;
        if (node_limit && nodes >= *node_limit) stopped = true;
        if (deadline && (nodes & 255) == 0 && std::chrono::steady_clock::now() >= *deadline) stopped = true;
    }

    bool is_draw(const Board& b) const {
        if (b.halfmove_clock() >= 100) return true;
        const int n = static_cast<int>(path.size());
        const int limit = std::max(0, n - b.halfmove_clock());
        for (int i = n - 4; i >= limit; i -= 2)
            if (path[static_cast<std::size_t>(i)] == b.hash()) return true;
        return false;
    }

    int eval_stm(const Board& b) const {
        const int s = evaluate_cp(b);
        return b.side_to_move() == Color::White ? s : -s;
    }

    void order(const Board& b, chess::MoveList& moves, std::uint16_t tt_move, int ply) {
        std::array<int, chess::MoveList::kCapacity> score{};
        const int side = chess::index(b.side_to_move());
        for (std::size_t i = 0; i < moves.size(); ++i) {
            const Move& m = moves[i];
            int s;
            const std::uint16_t c = code(m);
            if (c == tt_move)
                s = 1 << 30;
            else if (m.is_capture())
                s = (1 << 28) + victim_value(b, m) * 16 - kPieceValue[chess::index(b.piece_at(m.from)->kind)] / 16;
            else if (m.promotion && *m.promotion == PieceKind::Queen)
                s = (1 << 27);
            else if (c == killers[ply][0])
                s = (1 << 26);
            else if (c == killers[ply][1])
                s = (1 << 25);
            else
                s = history[side][m.from][m.to];
            score[i] = s;
        }
        // Insertion sort keeps generation order among equal scores.
        for (std::size_t i = 1; i < moves.size(); ++i) {
            const Move m = moves[i];
            const int s = score[i];
            std::size_t j = i;
            while (j > 0 && score[j - 1] < s) {
                moves[j] = moves[j - 1];
                score[j] = score[j - 1];
                --j;
            }
            moves[j] = m;
            score[j] = s;
        }
    }

    int qsearch(const Board& b, int ply, int alpha, int beta) {
        ++nodes;
        check_stop();
        if (stopped) return 0;
        pv_len[ply] = ply;
        const bool checked = chess::in_check(b, b.side_to_move());
        const auto moves_all = chess::legal_moves(b);
        if (moves_all.empty()) return checked ? -kMate + ply : 0;
        if (b.halfmove_clock() >= 100) return 0;
        const int stand = eval_stm(b);
        if (ply >= kMaxPly) return stand;
        if (!checked) {
            if (stand >= beta) return stand;
            alpha = std::max(alpha, stand);
        }
        chess::MoveList moves;
        for (const Move& m : moves_all)
            if (checked || m.is_capture() || (m.promotion && *m.promotion == PieceKind::Queen)) moves.push_back(m);
        order(b, moves, 0, ply);
        int best = checked ? -kInf : stand;
        for (const Move& m : moves) {
            if (!checked && !m.promotion && stand + victim_value(b, m) + 200 < alpha) continue;
            const int s = -qsearch(b.after(m), ply + 1, -beta, -alpha);
            if (stopped) return 0;
            if (s > best) best = s;
            if (s > alpha) {
                alpha = s;
                if (s >= beta) break;
            }
        }
        return best;
    }

    int negamax(const Board& b, int depth, int ply, int alpha, int beta, bool pv_node, bool allow_null) {
        pv_len[ply] = ply;
        if (ply > 0 && is_draw(b)) {
            ++nodes;
            return 0;
        }
        const bool checked = chess::in_check(b, b.side_to_move());
        if (checked) ++depth;
        if (depth <= 0 || ply >= kMaxPly) return qsearch(b, ply, alpha, beta);
        ++nodes;
        check_stop();
        if (stopped) return 0;

        TTSlot& ts = slot(b.hash());
        std::uint16_t tt_move = 0;
        if (ts.key == b.hash() && ts.depth >= 0) {
            tt_move = ts.move;
            if (!pv_node && ts.depth >= depth) {
                const int s = score_from_tt(ts.score, ply);
                if (ts.bound == kExact || (ts.bound == kLower && s >= beta) || (ts.bound == kUpper && s <= alpha))
                    return s;
            }
        }

        const auto moves_all = chess::legal_moves(b);
        if (moves_all.empty()) return checked ? -kMate + ply : 0;

        const Color us = b.side_to_move();
        const bool has_pieces = (b.pieces(us) & ~b.pieces(us, PieceKind::Pawn) & ~b.pieces(us, PieceKind::King)) != 0;
        if (!pv_node && !checked && allow_null && depth >= 3 && has_pieces && eval_stm(b) >= beta) {
            const int r = 2 + depth / 6;
            path.push_back(b.hash());
            const int s = -negamax(b.after_null(), depth - 1 - r, ply + 1, -beta, -beta + 1, false, false);
            path.pop_back();
            if (stopped) return 0;
            if (s >= beta && s < kMateBound) return beta;
        }

        chess::MoveList moves = moves_all;
        order(b, moves, tt_move, ply);
        const int alpha_orig = alpha;
        int best = -kInf;
        Move best_move = moves[0];
        path.push_back(b.hash());
        for (std::size_t i = 0; i < moves.size(); ++i) {
            const Move& m = moves[i];
            const Board child = b.after(m);
            const bool quiet = !m.is_capture() && !m.promotion;
            int s;
            if (i == 0) {
                s = -negamax(child, depth - 1, ply + 1, -beta, -alpha, pv_node, true);
            } else {
                int r = 0;
                if (depth >= 3 && i >= 3 && quiet && !checked && !chess::in_check(child, child.side_to_move()))
                    r = i >= 8 ? 2 : 1;
                s = -negamax(child, depth - 1 - r, ply + 1, -alpha - 1, -alpha, false, true);
                if (s > alpha && r > 0) s = -negamax(child, depth - 1, ply + 1, -alpha - 1, -alpha, false, true);
                if (s > alpha && s < beta) s = -negamax(child, depth - 1, ply + 1, -beta, -alpha, true, true);
            }
            if (stopped) {
                path.pop_back();
                return 0;
            }
            if (s > best) {
                best = s;
                best_move = m;
            }
            if (s > alpha) {
                alpha = s;
                pv[ply][ply] = m;
                for (int j = ply + 1; j < pv_len[ply + 1]; ++j) pv[ply][j] = pv[ply + 1][j];
                pv_len[ply] = std::max(pv_len[ply + 1], ply + 1);
                if (s >= beta) {
                    if (quiet) {
                        const std::uint16_t c = code(m);
                        if (killers[ply][0] != c) {
                            killers[ply][1] = killers[ply][0];
                            killers[ply][0] = c;
                        }
                        int& h = history[chess::index(us)][m.from][m.to];
                        h = std::min(h + depth * depth, 1 << 20);
                    }
                    break;
                }
            }
        }
        path.pop_back();
        const std::uint8_t bound = best >= beta ? kLower : best > alpha_orig ? kExact : kUpper;
        if (ts.key != b.hash() || depth >= ts.depth || bound == kExact) {
            ts.key = b.hash();
            ts.depth = static_cast<std::int8_t>(std::min(depth, 127));
            ts.score = static_cast<std::int16_t>(score_to_tt(best, ply));
            ts.bound = bound;
            ts.move = code(best_move);
        }
        return best;
    }
};

ClassicalEngine::ClassicalEngine(std::size_t tt_entries) : impl_(new Impl(tt_entries)) {}
ClassicalEngine::~ClassicalEngine() { delete impl_; }

void ClassicalEngine::new_game() {
    std::fill(impl_->tt.begin(), impl_->tt.end(), TTSlot{});
    impl_->killers = {};
    impl_->history = {};
}

Result ClassicalEngine::search(const Board& root, const std::vector<std::uint64_t>& history, const Limits& limits,
                               const std::atomic<bool>* stop,
                               const std::function<void(const uci::IterationReport&)>& on_iteration) {
    Impl& s = *impl_;
    s.nodes = 0;
    s.stopped = false;
    s.stop = stop;
    s.node_limit = limits.nodes;
    s.deadline.reset();
    const auto start = std::chrono::steady_clock::now();
    if (limits.movetime) s.deadline = start + *limits.movetime;
    s.path = history;
    s.killers = {};

    Result result;
    const auto legal = chess::legal_moves(root);
    if (legal.empty()) {
        result.score = chess::in_check(root, root.side_to_move()) ? uci::UciScore{true, 0} : uci::UciScore{false, 0};
        return result;
    }
    result.best = legal[0];
    result.has_move = true;
    const int max_depth = std::max(1, std::min(limits.depth, kMaxPly - 10));
    for (int d = 1; d <= max_depth; ++d) {
        const int score = s.negamax(root, d, 0, -kInf, kInf, true, false);
        if (s.stopped && d > 1) break;
        if (s.pv_len[0] > 0) {
            result.best = s.pv[0][0];
            result.pv.assign(s.pv[0].begin(), s.pv[0].begin() + s.pv_len[0]);
        }
        result.score = to_uci(score);
        result.depth = d;
        result.nodes = s.nodes;
        if (on_iteration) {
            const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            on_iteration({d, result.score, s.nodes, elapsed, result.pv});
        }
        if (s.stopped) break;
        if (result.score.mate && result.score.value > 0 && 2 * result.score.value - 1 <= d) break;
    }
    result.nodes = s.nodes;
    return result;
}

std::vector<uci::UciOption> ClassicalFacade::options() const {
    return {{"Hash", "spin", "16", "1", "1024"}};
}

bool ClassicalFacade::set_option(const std::string& name, const std::string& value) {
    if (name != "Hash") return false;
    int mb = 0;
    const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), mb);
    if (ec != std::errc{} || mb < 1 || mb > 1024) return false;
    (void)p;
    engine_ = std::make_unique<ClassicalEngine>(static_cast<std::size_t>(mb) * 1024 * 1024 / sizeof(TTSlot));
    return true;
}

Move ClassicalFacade::go(const Board& root, const std::vector<std::uint64_t>& history, const uci::GoParams& params,
                         const std::atomic<bool>& stop,
                         const std::function<void(const uci::IterationReport&)>& on_iteration) {
    Limits limits;
    limits.depth = params.depth.value_or(params.infinite || params.movetime_ms || params.nodes ? kMaxPly : 12);
    if (params.movetime_ms) limits.movetime = std::chrono::milliseconds(*params.movetime_ms);
    limits.nodes = params.nodes;
    return engine_->search(root, history, limits, &stop, on_iteration).best;
}

}  // namespace llchess::refengine
