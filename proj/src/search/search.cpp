#include "llchess/search/search.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <thread>

namespace llchess::search {

using chess::Board;
using chess::Move;
using chess::MoveList;
using chess::PieceKind;

namespace {

constexpr int kMaxPly = kMaxSearchDepth + 2;
constexpr int kOrderValue[6] = {1, 3, 3, 5, 9, 20};

float to_tt(float v, int ply) {
    if (v > 1.5f) return v + static_cast<float>(ply) * kMateStep;
    if (v < -1.5f) return v - static_cast<float>(ply) * kMateStep;
    return v;
}

float from_tt(float v, int ply) {
    if (v > 1.5f) return v - static_cast<float>(ply) * kMateStep;
    if (v < -1.5f) return v + static_cast<float>(ply) * kMateStep;
    return v;
}

int capture_score(const Board& b, const Move& m) {
    const int victim = m.is_en_passant() ? kOrderValue[0] : kOrderValue[chess::index(b.piece_at(m.to)->kind)];
    const int attacker = kOrderValue[chess::index(b.piece_at(m.from)->kind)];
    return victim * 100 - attacker;
}

}  // namespace

uci::UciScore to_uci_score(float value) {
    if (is_mate_value(value)) {
        const int plies = static_cast<int>(std::lround((kMateValue - std::fabs(value)) / kMateStep));
        return {true, value > 0 ? (plies + 1) / 2 : -(plies / 2)};
    }
    return {false, models::denormalize(value)};
}

void SearchConfig::validate() const {
    if (max_depth < 1 || max_depth > kMaxSearchDepth) throw std::invalid_argument("max depth must be in [1, 60]");
    if (!(prune_tau >= 0.0f && prune_tau <= 1.0f)) throw std::invalid_argument("prune tau must be in [0, 1]");
    if (threads < 1) throw std::invalid_argument("thread count must be >= 1");
    if (tt_entries < 1) throw std::invalid_argument("tt capacity must be >= 1");
    if (prune_max_depth < 0) throw std::invalid_argument("prune depth must be >= 0");
}

MoveList order_moves(const Board& board, const MoveList& moves, MoveCode tt_hint) {
    std::array<int, MoveList::kCapacity> key{};
    std::array<std::size_t, MoveList::kCapacity> idx{};
    for (std::size_t i = 0; i < moves.size(); ++i) {
        idx[i] = i;
        const Move& m = moves[i];
        if (same_move(tt_hint, m))
            key[i] = 1 << 20;
        else if (m.is_capture())
            key[i] = 1 << 16 | capture_score(board, m);
        else
            key[i] = 0;
    }
    std::stable_sort(idx.begin(), idx.begin() + static_cast<long>(moves.size()),
                     [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
    MoveList out;
    for (std::size_t i = 0; i < moves.size(); ++i) out.push_back(moves[idx[i]]);
    return out;
}

GateVerdict classifier_gate(const Board& board, int remaining_depth, bool pv_node, bool in_check,
                            const PositionClassifier& classifier, const SearchConfig& config) {
    if (pv_node || in_check || remaining_depth < 1 || remaining_depth > config.prune_max_depth) return GateVerdict::None;
    const auto p = classifier.classify(board);
    const bool white = board.side_to_move() == chess::Color::White;
    const float p_lose = white ? p[0] : p[2];
    const float p_win = white ? p[2] : p[0];
    if (p_lose > config.prune_tau) return GateVerdict::FailLow;
    if (p_win > config.prune_tau) return GateVerdict::FailHigh;
    return GateVerdict::None;
}

struct Searcher::Shared {
    const std::atomic<bool>* external_stop = nullptr;
    std::atomic<bool> abort{false};
    std::atomic<std::uint64_t> nodes{0};
    std::optional<std::chrono::steady_clock::time_point> deadline;
    std::optional<std::uint64_t> node_limit;
};

struct Searcher::Worker {
    Worker(const Evaluator& e, const PositionClassifier* c, const SearchConfig& cfg, TranspositionTable* t, Shared& sh)
        : evaluator(e), classifier(c), config(cfg), tt(t), shared(sh) {}

    const Evaluator& evaluator;
    const PositionClassifier* classifier;
    const SearchConfig& config;
    TranspositionTable* tt;
    Shared& shared;

    std::vector<std::uint64_t> path;
    std::array<std::array<Move, kMaxPly + 1>, kMaxPly + 1> pv{};
    std::array<int, kMaxPly + 1> pv_len{};
    std::uint64_t nodes = 0;
    std::uint64_t gate_prunes = 0;
    bool aborted = false;

    bool should_stop() {
        if (aborted) return true;
        if ((shared.external_stop && shared.external_stop->load(std::memory_order_relaxed)) ||
            shared.abort.load(std::memory_order_relaxed)) {
            aborted = true;
        } else if (shared.node_limit && shared.nodes.load(std::memory_order_relaxed) >= *shared.node_limit) {
            aborted = true;
        } else if (shared.deadline && (nodes & 63) == 0 && std::chrono::steady_clock::now() >= *shared.deadline) {
            aborted = true;
        }
        if (aborted) shared.abort.store(true, std::memory_order_relaxed);
        return aborted;
    }

    bool is_draw(const Board& b) const {
        if (b.halfmove_clock() >= 100) return true;
        const int n = static_cast<int>(path.size());
        const int limit = std::max(0, n - b.halfmove_clock());
        for (int i = n - 4; i >= limit; i -= 2)
            if (path[static_cast<std::size_t>(i)] == b.hash()) return true;
        return false;
    }

    float ab(const Board& b, int depth, int ply, float alpha, float beta, bool pv_node) {
        ++nodes;
        if (shared.node_limit) shared.nodes.fetch_add(1, std::memory_order_relaxed);
        pv_len[ply] = ply;
        if (should_stop()) return 0.0f;

        const MoveList legal = chess::legal_moves(b);
        const bool checked = chess::in_check(b, b.side_to_move());
        if (legal.empty()) return checked ? mated_in(ply) : 0.0f;
        if (ply > 0 && is_draw(b)) return 0.0f;
        if (depth == 0 || ply >= kMaxPly) {
            const float v = evaluator.evaluate(b);
            return b.side_to_move() == chess::Color::White ? v : -v;
        }

        MoveCode hint = kNoMove;
        if (config.use_tt) {
            if (const auto e = tt->probe(b.hash())) {
                hint = e->move;
                if (!pv_node && TranspositionTable::usable_for_cutoff(*e, depth)) {
                    const float v = from_tt(e->value, ply);
                    if (e->bound == Bound::Exact) return std::clamp(v, alpha, beta);
                    if (e->bound == Bound::Lower && v >= beta) return beta;
                    if (e->bound == Bound::Upper && v <= alpha) return alpha;
                }
            }
        }

        if (config.use_gate && classifier) {
            const auto verdict = classifier_gate(b, depth, pv_node, checked, *classifier, config);
            // A classifier verdict bounds the value by the evaluator's range but proves no mate,
            // so it only cuts windows that lie inside [-1, 1] on the relevant side.
            if (verdict == GateVerdict::FailLow && alpha >= -1.0f) {
                ++gate_prunes;
                return alpha;
            }
            if (verdict == GateVerdict::FailHigh && beta <= 1.0f) {
                ++gate_prunes;
                return beta;
            }
        }

        const MoveList moves = config.use_ordering ? order_moves(b, legal, hint) : legal;
        const float alpha_orig = alpha;
        MoveCode best = kNoMove;
        path.push_back(b.hash());
        for (std::size_t i = 0; i < moves.size(); ++i) {
            const Move& m = moves[i];
            const float v = -ab(b.after(m), depth - 1, ply + 1, -beta, -alpha, pv_node && i == 0);
            if (aborted) {
                path.pop_back();
                return 0.0f;
            }
            if (v >= beta) {
                path.pop_back();
                if (config.use_tt) tt->store(b.hash(), depth, to_tt(beta, ply), Bound::Lower, encode_move(m));
                return beta;
            }
            if (v > alpha) {
                alpha = v;
                best = encode_move(m);
                pv[ply][ply] = m;
                for (int j = ply + 1; j < pv_len[ply + 1]; ++j) pv[ply][j] = pv[ply + 1][j];
                pv_len[ply] = std::max(pv_len[ply + 1], ply + 1);
            }
        }
        path.pop_back();
        if (config.use_tt)
            tt->store(b.hash(), depth, to_tt(alpha, ply), alpha > alpha_orig ? Bound::Exact : Bound::Upper, best);
        return alpha;
    }
};

Searcher::Searcher(const Evaluator& evaluator, const PositionClassifier* classifier, SearchConfig config)
    : evaluator_(evaluator), classifier_(classifier), config_(config) {
    config_.validate();
}

Searcher::~Searcher() = default;

void Searcher::ensure_tt() {
    if (!tt_ || tt_->capacity() != config_.tt_entries) tt_ = std::make_unique<TranspositionTable>(config_.tt_entries);
}

TranspositionTable& Searcher::tt() {
    ensure_tt();
    return *tt_;
}

void Searcher::new_game() {
    if (tt_) tt_->clear();
}

float Searcher::alphabeta(const Board& board, int depth, float alpha, float beta) {
    config_.validate();
    ensure_tt();
    Shared shared;
    Worker w(evaluator_, classifier_, config_, tt_.get(), shared);
    const float v = w.ab(board, depth, 0, alpha, beta, true);
    last_nodes_ += w.nodes;
    return v;
}

SearchResult Searcher::search(const Board& root, const std::vector<std::uint64_t>& history,
                              const std::atomic<bool>* stop, const IterationCallback& on_iteration) {
    config_.validate();
    ensure_tt();
    const auto start = std::chrono::steady_clock::now();
    const MoveList legal = chess::legal_moves(root);
    if (legal.empty())
        throw SearchError(chess::in_check(root, root.side_to_move()) ? "root position is checkmate"
                                                                      : "root position is stalemate");
    tt_->new_generation();

    Shared shared;
    shared.external_stop = stop;
    shared.node_limit = config_.max_nodes;
    if (config_.movetime) shared.deadline = start + *config_.movetime;

    const unsigned n_threads = std::max(1u, std::min<unsigned>(config_.threads, static_cast<unsigned>(legal.size())));
    std::vector<std::unique_ptr<Worker>> workers;
    for (unsigned t = 0; t < n_threads; ++t) {
        workers.push_back(std::make_unique<Worker>(evaluator_, classifier_, config_, tt_.get(), shared));
        workers.back()->path = history;
    }

    SearchResult result;
    result.bestmove = legal[0];
    MoveCode root_hint = kNoMove;
    if (config_.use_tt)
        if (const auto e = tt_->probe(root.hash())) root_hint = e->move;

    for (int depth = 1; depth <= config_.max_depth; ++depth) {
        const MoveList moves = config_.use_ordering ? order_moves(root, legal, root_hint) : legal;

        struct Best {
            float value = -kInfinity;
            std::size_t index = SIZE_MAX;
            std::vector<Move> pv;
        };
        std::vector<Best> best(n_threads);

        auto run = [&](unsigned t) {
            Worker& w = *workers[t];
            w.path.push_back(root.hash());
            float alpha = -kInfinity;
            for (std::size_t i = t; i < moves.size(); i += n_threads) {
                const float v = -w.ab(root.after(moves[i]), depth - 1, 1, -kInfinity, -alpha, i == 0);
                if (w.aborted) break;
                if (v > alpha) {
                    alpha = v;
                    best[t].value = v;
                    best[t].index = i;
                    best[t].pv.assign(1, moves[i]);
                    for (int j = 1; j < w.pv_len[1]; ++j) best[t].pv.push_back(w.pv[1][j]);
                }
            }
            w.path.pop_back();
        };
        if (n_threads == 1) {
            run(0);
        } else {
            std::vector<std::thread> pool;
            for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(run, t);
            run(0);
            for (auto& th : pool) th.join();
        }

        bool aborted = false;
        for (const auto& w : workers) aborted |= w->aborted;
        // Highest value wins; among equal values the lowest root index.
        const Best* winner = nullptr;
        for (const auto& b : best) {
            if (b.index == SIZE_MAX) continue;
            if (!winner || b.value > winner->value || (b.value == winner->value && b.index < winner->index))
                winner = &b;
        }
        if (aborted || !winner) {
            // A partial first iteration is still better than nothing.
            if (result.depth == 0 && winner) {
                result.bestmove = moves[winner->index];
                result.value = winner->value;
                result.pv = winner->pv;
            }
            break;
        }

        result.bestmove = moves[winner->index];
        result.value = winner->value;
        result.pv = winner->pv;
        result.depth = depth;
        root_hint = encode_move(result.bestmove);
        if (config_.use_tt) tt_->store(root.hash(), depth, result.value, Bound::Exact, root_hint);

        if (on_iteration) {
            std::uint64_t nodes = 0;
            for (const auto& w : workers) nodes += w->nodes;
            const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            on_iteration({depth, to_uci_score(result.value), nodes, elapsed, result.pv});
        }
    }

    for (const auto& w : workers) {
        result.nodes += w->nodes;
        result.gate_prunes += w->gate_prunes;
    }
    last_nodes_ = result.nodes;
    result.score = to_uci_score(result.value);
    result.cp = result.score.mate ? (result.value > 0 ? models::kMateSentinel : -models::kMateSentinel)
                                  : result.score.value;
    result.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.nps = result.elapsed_s > 0 ? static_cast<double>(result.nodes) / result.elapsed_s : 0.0;
    return result;
}

SearchFacade::SearchFacade(std::unique_ptr<Evaluator> evaluator, std::unique_ptr<PositionClassifier> classifier,
                           SearchConfig config, std::string name)
    : evaluator_(std::move(evaluator)),
      classifier_(std::move(classifier)),
      searcher_(*evaluator_, classifier_.get(), config),
      name_(std::move(name)) {}

std::vector<uci::UciOption> SearchFacade::options() const {
    const auto& c = searcher_.config();
    char tau[32];
    std::snprintf(tau, sizeof tau, "%g", static_cast<double>(c.prune_tau));
    const auto hash_mb = std::max<std::size_t>(1, c.tt_entries * 16 / (1024 * 1024));
    return {{"Threads", "spin", std::to_string(c.threads), "1", "64"},
            {"Hash", "spin", std::to_string(hash_mb), "1", "4096"},
            {"PruneTau", "string", tau, "", ""}};
}

bool SearchFacade::set_option(const std::string& name, const std::string& value) {
    auto& c = searcher_.config();
    if (name == "PruneTau") {
        try {
            std::size_t used = 0;
            const float tau = std::stof(value, &used);
            if (used != value.size() || !(tau >= 0.0f && tau <= 1.0f)) return false;
            c.prune_tau = tau;
            return true;
        } catch (const std::exception&) {
            return false;
        }
    }
    int v = 0;
    const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || p != value.data() + value.size()) return false;
    if (name == "Threads" && v >= 1 && v <= 64) {
        c.threads = static_cast<unsigned>(v);
        return true;
    }
    if (name == "Hash" && v >= 1 && v <= 4096) {
        c.tt_entries = static_cast<std::size_t>(v) * 1024 * 1024 / 16;
        return true;
    }
    return false;
}

Move SearchFacade::go(const Board& root, const std::vector<std::uint64_t>& history, const uci::GoParams& params,
                      const std::atomic<bool>& stop,
                      const std::function<void(const uci::IterationReport&)>& on_iteration) {
    SearchConfig saved = searcher_.config();
    auto& c = searcher_.config();
    if (params.depth) c.max_depth = std::clamp(*params.depth, 1, kMaxSearchDepth);
    if (params.infinite || ((params.movetime_ms || params.nodes) && !params.depth)) c.max_depth = kMaxSearchDepth;
    if (params.movetime_ms) c.movetime = std::chrono::milliseconds(*params.movetime_ms);
    if (params.nodes) c.max_nodes = *params.nodes;
    SearchResult r;
    try {
        r = searcher_.search(root, history, &stop, on_iteration);
    } catch (...) {
        searcher_.config() = saved;
        throw;
    }
    searcher_.config() = saved;
    return r.bestmove;
}

}  // namespace llchess::search
