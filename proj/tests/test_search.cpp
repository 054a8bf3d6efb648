#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "llchess/chess/fen.hpp"
#include "llchess/search/search.hpp"
#include "oracle/mate_positions.hpp"
#include "oracle/minimax.hpp"
#include "support.hpp"

using namespace llchess;
using namespace llchess::search;

namespace {

SearchConfig plain(int depth) {
    SearchConfig c;
    c.max_depth = depth;
    c.use_ordering = false;
    c.use_tt = false;
    c.use_gate = false;
    c.tt_entries = 1 << 16;
    return c;
}

class ConstantEvaluator final : public Evaluator {
public:
    explicit ConstantEvaluator(float v) : v_(v) {}
    float evaluate(const chess::Board&) const override { return v_; }

private:
    float v_;
};

// Sure of the outcome whenever one side has at least a rook more material.
class MaterialClassifier final : public PositionClassifier {
public:
    models::ClassProbabilities classify(const chess::Board& b) const override {
        const int cp = refengine_like(b);
        if (cp >= 500) return {0.0f, 0.0f, 1.0f};
        if (cp <= -500) return {1.0f, 0.0f, 0.0f};
        return {0.1f, 0.8f, 0.1f};
    }
    static int refengine_like(const chess::Board& b) {
        static const int value[6] = {100, 300, 300, 500, 900, 0};
        int cp = 0;
        for (int k = 0; k < 6; ++k) {
            cp += value[k] * __builtin_popcountll(b.pieces(chess::Color::White, static_cast<chess::PieceKind>(k)));
            cp -= value[k] * __builtin_popcountll(b.pieces(chess::Color::Black, static_cast<chess::PieceKind>(k)));
        }
        return cp;
    }
};

}  // namespace

TEST(Search, PlainAlphaBetaEqualsMinimax) {
    const ClassicalEvaluator eval;
    const auto boards = testing_support::random_positions(21, 40, 2, 60);
    for (int depth = 1; depth <= 3; ++depth) {
        for (const auto& b : boards) {
            Searcher s(eval, nullptr, plain(depth));
            const auto r = s.search(b);
            const auto o = oracle::minimax_root(b, depth, eval);
            ASSERT_EQ(r.value, o.value) << chess::serialize_fen(b) << " depth " << depth;
            ASSERT_EQ(r.bestmove, o.best.front()) << chess::serialize_fen(b) << " depth " << depth;
            ASSERT_LE(r.nodes, o.nodes + 1 + depth * o.nodes);
        }
    }
}

TEST(Search, EnhancementsKeepRootValues) {
    const ClassicalEvaluator eval;
    int reduced = 0, total = 0;
    for (const auto& b : testing_support::random_positions(22, 40, 2, 60)) {
        Searcher base(eval, nullptr, plain(3));
        auto cfg = plain(3);
        cfg.use_ordering = cfg.use_tt = true;
        Searcher fast(eval, nullptr, cfg);
        const float a = base.alphabeta(b, 3);
        const float f = fast.alphabeta(b, 3);
        ASSERT_EQ(a, f) << chess::serialize_fen(b);
        ++total;
        reduced += fast.last_nodes() < base.last_nodes();
    }
    EXPECT_GE(reduced * 100, total * 95);
}

TEST(Search, ThreadsAgreeWithSingleThread) {
    const ClassicalEvaluator eval;
    for (const auto& b : testing_support::random_positions(23, 20, 2, 60)) {
        auto cfg = plain(3);
        Searcher one(eval, nullptr, cfg);
        cfg.threads = 4;
        Searcher four(eval, nullptr, cfg);
        const auto r1 = one.search(b);
        const auto r4 = four.search(b);
        EXPECT_EQ(r1.value, r4.value);
        EXPECT_EQ(r1.bestmove, r4.bestmove);
    }
}

TEST(Search, GateAtTauOneIsInert) {
    const ClassicalEvaluator eval;
    const MaterialClassifier cls;
    for (const auto& b : testing_support::random_positions(24, 20, 10, 80)) {
        auto cfg = plain(4);
        cfg.use_ordering = cfg.use_tt = true;
        Searcher off(eval, nullptr, cfg);
        cfg.use_gate = true;
        cfg.prune_tau = 1.0f;
        Searcher on(eval, &cls, cfg);
        const auto a = off.search(b);
        const auto g = on.search(b);
        EXPECT_EQ(a.value, g.value);
        EXPECT_EQ(a.bestmove, g.bestmove);
        EXPECT_EQ(a.nodes, g.nodes);
        EXPECT_EQ(a.pv, g.pv);
        EXPECT_EQ(g.gate_prunes, 0u);
    }
}

// Always certain that black is winning; the gate fires at every eligible node.
class CertainClassifier final : public PositionClassifier {
public:
    models::ClassProbabilities classify(const chess::Board&) const override { return {1.0f, 0.0f, 0.0f}; }
};

TEST(Search, GateNeverInventsMates) {
    const ClassicalEvaluator eval;
    const CertainClassifier cls;
    for (const auto& b : testing_support::random_positions(25, 30, 10, 80)) {
        SearchConfig cfg;
        cfg.max_depth = 4;
        cfg.prune_tau = 0.5f;
        Searcher gated(eval, &cls, cfg);
        const auto r = gated.search(b);
        EXPECT_GT(r.gate_prunes, 0u);
        EXPECT_TRUE(chess::is_legal(b, r.bestmove));
        cfg.use_gate = false;
        Searcher plain_search(eval, nullptr, cfg);
        if (!is_mate_value(plain_search.search(b).value)) EXPECT_LE(std::fabs(r.value), 1.0f) << chess::serialize_fen(b);
    }
}

TEST(Search, GateRules) {
    const MaterialClassifier cls;
    SearchConfig cfg;
    const auto white_up = chess::parse_fen("4k3/8/8/8/8/8/8/Q3K3 w - - 0 1");
    const auto black_to_move = chess::parse_fen("4k3/8/8/8/8/8/8/Q3K3 b - - 0 1");
    EXPECT_EQ(classifier_gate(white_up, 1, false, false, cls, cfg), GateVerdict::FailHigh);
    EXPECT_EQ(classifier_gate(black_to_move, 2, false, false, cls, cfg), GateVerdict::FailLow);
    EXPECT_EQ(classifier_gate(white_up, 3, false, false, cls, cfg), GateVerdict::None);
    EXPECT_EQ(classifier_gate(white_up, 0, false, false, cls, cfg), GateVerdict::None);
    EXPECT_EQ(classifier_gate(white_up, 1, true, false, cls, cfg), GateVerdict::None);
    EXPECT_EQ(classifier_gate(white_up, 1, false, true, cls, cfg), GateVerdict::None);
    cfg.prune_tau = 1.0f;
    EXPECT_EQ(classifier_gate(white_up, 1, false, false, cls, cfg), GateVerdict::None);
}

TEST(Search, MvvLvaOrdering) {
    const auto b = chess::parse_fen("r3k3/8/8/3q4/4P3/2N5/8/R3K3 w Q - 0 1");
    const auto ordered = order_moves(b, chess::legal_moves(b));
    ASSERT_GE(ordered.size(), 3u);
    EXPECT_EQ(ordered[0].uci(), "e4d5");
    EXPECT_EQ(ordered[1].uci(), "c3d5");
    EXPECT_EQ(ordered[2].uci(), "a1a8");
    const auto hinted = order_moves(b, chess::legal_moves(b), encode_move(chess::parse_uci_move(b, "e1f2")));
    EXPECT_EQ(hinted[0].uci(), "e1f2");
    EXPECT_EQ(hinted[1].uci(), "e4d5");
    // Quiet moves keep generation order.
    std::vector<std::string> quiet_gen, quiet_ord;
    for (const auto& m : chess::legal_moves(b))
        if (!m.is_capture()) quiet_gen.push_back(m.uci());
    for (const auto& m : ordered)
        if (!m.is_capture()) quiet_ord.push_back(m.uci());
    EXPECT_EQ(quiet_gen, quiet_ord);
}

TEST(TranspositionTable, CapacityOneCollision) {
    TranspositionTable tt(1);
    tt.store(0x1111, 5, 0.25f, Bound::Exact, 77);
    ASSERT_TRUE(tt.probe(0x1111));
    EXPECT_EQ(tt.probe(0x1111)->value, 0.25f);
    EXPECT_EQ(tt.probe(0x1111)->move, 77);
    tt.store(0x2222, 2, -0.5f, Bound::Lower, 9);  // shallower, same generation: kept out
    EXPECT_TRUE(tt.probe(0x1111));
    EXPECT_FALSE(tt.probe(0x2222));
    tt.new_generation();
    tt.store(0x2222, 2, -0.5f, Bound::Lower, 9);  // older entry yields
    EXPECT_FALSE(tt.probe(0x1111));
    ASSERT_TRUE(tt.probe(0x2222));
    EXPECT_EQ(tt.probe(0x2222)->bound, Bound::Lower);
    EXPECT_TRUE(TranspositionTable::usable_for_cutoff(*tt.probe(0x2222), 2));
    EXPECT_FALSE(TranspositionTable::usable_for_cutoff(*tt.probe(0x2222), 3));
    tt.store(0x2222, 1, 0.1f, Bound::Upper, kNoMove);  // same key: replaced, move kept
    EXPECT_EQ(tt.probe(0x2222)->move, 9);
    EXPECT_EQ(tt.probe(0x2222)->depth, 1);
    tt.clear();
    EXPECT_FALSE(tt.probe(0x2222));
}

TEST(TranspositionTable, MateValuesSurvive) {
    TranspositionTable tt(64);
    tt.store(42, 3, mated_in(7), Bound::Exact, 1);
    EXPECT_EQ(tt.probe(42)->value, mated_in(7));
}

TEST(Search, MateScores) {
    EXPECT_EQ(to_uci_score(-mated_in(1)).mate, true);
    EXPECT_EQ(to_uci_score(-mated_in(1)).value, 1);
    EXPECT_EQ(to_uci_score(mated_in(2)).value, -1);
    EXPECT_EQ(to_uci_score(-mated_in(3)).value, 2);
    EXPECT_EQ(to_uci_score(0.1f).mate, false);
    EXPECT_EQ(to_uci_score(0.1f).value, 500);
    EXPECT_GT(-mated_in(1), -mated_in(3));
}

TEST(Search, FindsMates) {
    const ClassicalEvaluator eval;
    for (const auto& b : oracle::mate_positions(31, 10, 1)) {
        Searcher s(eval, nullptr, SearchConfig{.max_depth = 1});
        const auto r = s.search(b);
        EXPECT_TRUE(chess::is_checkmate(b.after(r.bestmove))) << chess::serialize_fen(b);
        EXPECT_TRUE(r.score.mate && r.score.value == 1);
    }
    for (const auto& b : oracle::mate_positions(32, 4, 2)) {
        Searcher s(eval, nullptr, SearchConfig{.max_depth = 3});
        const auto r = s.search(b);
        EXPECT_TRUE(oracle::move_forces_mate(b, r.bestmove, 2)) << chess::serialize_fen(b);
        EXPECT_TRUE(r.score.mate && r.score.value == 2);
    }
}

TEST(Search, GateKeepsMates) {
    const ClassicalEvaluator eval;
    const MaterialClassifier cls;
    for (const auto& b : oracle::mate_positions(33, 8, 2)) {
        SearchConfig cfg;
        cfg.max_depth = 3;
        cfg.prune_tau = 0.5f;
        Searcher s(eval, &cls, cfg);
        const auto r = s.search(b);
        EXPECT_TRUE(oracle::move_forces_mate(b, r.bestmove, 2)) << chess::serialize_fen(b);
        EXPECT_TRUE(r.score.mate && r.score.value == 2) << chess::serialize_fen(b);
    }
}

TEST(Search, FiftyMoveRuleScoresDraw) {
    const ClassicalEvaluator eval;
    Searcher s(eval, nullptr, plain(1));
    EXPECT_EQ(s.search(chess::parse_fen("4k3/8/8/8/8/8/8/Q3K3 w - - 99 80")).value, 0.0f);
    EXPECT_GT(s.search(chess::parse_fen("4k3/8/8/8/8/8/8/Q3K3 w - - 0 80")).value, 0.1f);
}

TEST(Search, RepetitionIsADraw) {
    const ConstantEvaluator white_better(0.5f);
    chess::Board b = chess::Board::startpos();
    std::vector<std::uint64_t> history;
    for (const char* m : {"g1f3", "g8f6", "f3g1"}) {
        history.push_back(b.hash());
        b = chess::apply_move(b, chess::parse_uci_move(b, m));
    }
    Searcher s(white_better, nullptr, plain(1));
    const auto with_history = s.search(b, history);
    EXPECT_EQ(with_history.value, 0.0f);
    EXPECT_EQ(with_history.bestmove.uci(), "f6g8");
    EXPECT_EQ(s.search(b).value, -0.5f);
}

TEST(Search, StopAndLimits) {
    const ClassicalEvaluator eval;
    const auto b = chess::parse_fen("r1bqkb1r/pppp1ppp/2n2n2/4p3/2B1P3/5N2/PPPP1PPP/RNBQK2R w KQkq - 4 4");
    std::atomic<bool> stop{true};
    SearchConfig cfg;
    cfg.max_depth = 30;
    Searcher s(eval, nullptr, cfg);
    const auto r = s.search(b, {}, &stop);
    EXPECT_TRUE(chess::is_legal(b, r.bestmove));
    EXPECT_EQ(r.depth, 0);

    cfg.max_nodes = 5000;
    Searcher n(eval, nullptr, cfg);
    const auto rn = n.search(b);
    EXPECT_LE(rn.nodes, 5000u + 64u);
    EXPECT_TRUE(chess::is_legal(b, rn.bestmove));

    cfg.max_nodes.reset();
    cfg.movetime = std::chrono::milliseconds(50);
    Searcher t(eval, nullptr, cfg);
    const auto start = std::chrono::steady_clock::now();
    const auto rt = t.search(b);
    EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::milliseconds(500));
    EXPECT_GE(rt.depth, 1);

    EXPECT_THROW(Searcher(eval, nullptr, plain(1)).search(chess::parse_fen("k7/8/1Q6/8/8/8/8/7K b - - 0 1")),
                 SearchError);
    SearchConfig bad;
    bad.max_depth = 0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Evaluator, StaticEvalTerminals) {
    const ClassicalEvaluator eval;
    EXPECT_EQ(static_eval(chess::parse_fen("rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR w KQkq - 1 3"), eval), -1.0f);
    EXPECT_EQ(static_eval(chess::parse_fen("k7/8/1Q6/8/8/8/8/7K b - - 0 1"), eval), 0.0f);
    const float v = eval.evaluate(chess::Board::startpos());
    EXPECT_GT(v, -0.1f);
    EXPECT_LT(v, 0.1f);
}
