#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "llchess/bench/agreement.hpp"
#include "llchess/bench/filtered.hpp"
#include "llchess/bench/report.hpp"
#include "llchess/chess/fen.hpp"
#include "llchess/refengine/classical.hpp"
#include "support.hpp"

using namespace llchess;
using namespace llchess::bench;
namespace fs = std::filesystem;
using chess::Color;

namespace {

RefScore cp(int v) { return {false, v}; }
RefScore mate(int v) { return {true, v}; }

// Scores positions by static material and picks the first legal move that does not mate.
class StaticAnalyzer final : public uci::Analyzer {
public:
    std::vector<std::pair<std::string, int>>* calls = nullptr;
    uci::EngineScore analyze(const std::string& fen, int depth) override {
        if (calls) calls->emplace_back(fen, depth);
        const auto b = chess::parse_fen(fen);
        uci::EngineScore s;
        s.depth = depth;
        const int white = refengine::evaluate_cp(b);
        s.value = b.side_to_move() == Color::White ? white : -white;
        for (const auto& m : chess::legal_moves(b))
            if (!chess::is_checkmate(b.after(m))) return s.bestmove = m.uci(), s;
        s.bestmove = chess::legal_moves(b)[0].uci();
        return s;
    }
};

}  // namespace

TEST(Verdicts, Fixtures) {
    EXPECT_EQ(judge("e2e4", "e2e4", cp(-900), cp(50), Color::White, 30), Verdict::AgreeExact);
    EXPECT_EQ(judge("a", "b", cp(20), cp(50), Color::White, 30), Verdict::AgreeEqualStrength);
    EXPECT_EQ(judge("a", "b", cp(19), cp(50), Color::White, 30), Verdict::Disagree);
    EXPECT_EQ(judge("a", "b", cp(-80), cp(-50), Color::Black, 30), Verdict::AgreeEqualStrength);
    EXPECT_EQ(judge("a", "b", cp(-19), cp(-50), Color::Black, 30), Verdict::Disagree);
    // Our move rated better than the reference's own choice.
    EXPECT_EQ(judge("a", "b", cp(400), cp(50), Color::White, 30), Verdict::AgreeEqualStrength);
    EXPECT_EQ(judge("a", "b", cp(-400), cp(-50), Color::Black, 30), Verdict::AgreeEqualStrength);
    // Mates by the mover are interchangeable; mates against the mover are not equal to anything else.
    EXPECT_EQ(judge("a", "b", mate(5), mate(2), Color::White, 30), Verdict::AgreeEqualStrength);
    EXPECT_EQ(judge("a", "b", mate(-5), mate(-2), Color::Black, 30), Verdict::AgreeEqualStrength);
    EXPECT_EQ(judge("a", "b", cp(3000), mate(2), Color::White, 30), Verdict::Disagree);
    EXPECT_EQ(judge("a", "b", mate(-3), cp(-2000), Color::White, 30), Verdict::Disagree);
    EXPECT_EQ(judge("a", "b", mate(3), cp(-2000), Color::Black, 30), Verdict::Disagree);
    EXPECT_EQ(judge("a", "b", mate(-3), mate(-8), Color::White, 30), Verdict::AgreeEqualStrength);
    EXPECT_EQ(judge("a", "b", mate(4), cp(100), Color::White, 30), Verdict::AgreeEqualStrength);
}

TEST(Verdicts, ScoreText) {
    EXPECT_EQ(cp(-42).to_string(), "cp:-42");
    EXPECT_EQ(mate(3).to_string(), "mate:3");
    EXPECT_EQ(RefScore::parse("mate:-7"), mate(-7));
    EXPECT_EQ(RefScore::parse("cp:15"), cp(15));
    EXPECT_THROW(RefScore::parse("pawns:2"), std::invalid_argument);
    uci::EngineScore s;
    s.kind = uci::EngineScore::Kind::Mate;
    s.value = 2;
    EXPECT_EQ(white_relative(s, Color::Black), mate(-2));
    s.kind = uci::EngineScore::Kind::Cp;
    s.value = -70;
    EXPECT_EQ(white_relative(s, Color::Black), cp(70));
}

TEST(Agreement, RecordedFixtureReplays) {
    std::ifstream in(testing_support::data_dir() / "benchmark_recorded.tsv");
    const auto records = replay_recorded(in, 30);
    ASSERT_EQ(records.size(), 47u);
    const auto s = summarize(records);
    EXPECT_EQ(s.agree_exact + s.agree_equal, 40u);
    EXPECT_EQ(s.disagree, 7u);
    EXPECT_NEAR(s.agreement * 100.0, 85.1, 0.05);
}

TEST(Agreement, FenListValidation) {
    std::istringstream ok("# comment\n\n" + std::string(chess::kStartFen) + "\n");
    EXPECT_EQ(read_fen_list(ok).size(), 1u);
    std::istringstream bad("not a fen\n");
    EXPECT_THROW(read_fen_list(bad), std::exception);
    std::ifstream shipped(testing_support::data_dir() / "benchmark_positions.txt");
    EXPECT_EQ(read_fen_list(shipped).size(), 47u);
}

TEST(Agreement, RunsWithChildAnalysesAndQuarantine) {
    std::vector<std::string> fens = {
        std::string(chess::kStartFen),
        "6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1",
        "6k1/5ppp/8/8/8/8/8/R5K1 b - - 0 1",
    };
    std::vector<std::pair<std::string, int>> calls;
    const uci::AnalyzerFactory factory = [&] {
        auto a = std::make_unique<StaticAnalyzer>();
        a->calls = &calls;
        return std::unique_ptr<uci::Analyzer>(std::move(a));
    };
    const MovePicker picker = [](const chess::Board& b, int depth) {
        EXPECT_EQ(depth, 3);
        const auto moves = chess::legal_moves(b);
        if (chess::serialize_fen(b).find(" b ") != std::string::npos) throw std::runtime_error("no black moves today");
        for (const auto& m : moves)
            if (chess::is_checkmate(b.after(m))) return OurChoice{m.uci(), 10000};
        return OurChoice{moves[1].uci(), 0};
    };
    AgreementConfig cfg;
    cfg.our_depth = 3;
    cfg.ref_depth = 6;
    const auto records = run_agreement(fens, picker, factory, cfg);
    ASSERT_EQ(records.size(), 3u);
    EXPECT_FALSE(records[0].quarantined);
    EXPECT_EQ(records[0].ref_best_move, chess::legal_moves(chess::Board::startpos())[0].uci());
    EXPECT_EQ(records[1].our_move, "a1a8");
    EXPECT_EQ(records[1].ref_eval_our, mate(1));  // terminal child, scored locally
    EXPECT_TRUE(records[2].quarantined);
    EXPECT_NE(records[2].error.find("our engine"), std::string::npos);
    // Root analyses at ref depth, children one shallower.
    int root = 0, child = 0;
    for (const auto& [fen, depth] : calls) {
        EXPECT_TRUE(depth == 6 || depth == 5) << depth;
        (depth == 6 ? root : child) += 1;
    }
    EXPECT_EQ(root, 2);
    EXPECT_EQ(child, 1);
    const auto s = summarize(records);
    EXPECT_EQ(s.samples, 3u);
    EXPECT_EQ(s.quarantined, 1u);
}

TEST(Agreement, BrokenReferenceIsRetriedThenQuarantined) {
    int made = 0;
    const uci::AnalyzerFactory factory = [&]() -> std::unique_ptr<uci::Analyzer> {
        ++made;
        throw uci::EngineError("cannot start");
    };
    const MovePicker picker = [](const chess::Board& b, int) { return OurChoice{chess::legal_moves(b)[0].uci(), 0}; };
    const std::vector<std::string> fens = {std::string(chess::kStartFen)};
    const auto records = run_agreement(fens, picker, factory, {});
    EXPECT_TRUE(records[0].quarantined);
    EXPECT_EQ(made, 2);
    EXPECT_EQ(summarize(records).agreement, 0.0);
}

TEST(Report, ByteIdenticalAndComplete) {
    std::ifstream in(testing_support::data_dir() / "benchmark_recorded.tsv");
    const auto records = replay_recorded(in, 30);
    AgreementConfig cfg;
    cfg.our_depth = 4;
    cfg.ref_depth = 12;
    const auto dir = fs::temp_directory_path() / ("llchess_report_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    emit_report(dir / "a", records, cfg, "ref");
    emit_report(dir / "b", records, cfg, "ref");
    EXPECT_EQ(testing_support::slurp(dir / "a.json"), testing_support::slurp(dir / "b.json"));
    EXPECT_EQ(testing_support::slurp(dir / "a.tsv"), testing_support::slurp(dir / "b.tsv"));
    const auto json = testing_support::slurp(dir / "a.json");
    EXPECT_NE(json.find("\"samples\": 47"), std::string::npos);
    EXPECT_NE(json.find("\"child_depth\": 11"), std::string::npos);
    const auto tsv = records_tsv(records);
    EXPECT_EQ(std::count(tsv.begin(), tsv.end(), '\n'), 48);
    EXPECT_THROW(emit_report(dir / "c", {}, cfg, "ref"), std::invalid_argument);
    fs::remove_all(dir);
}

TEST(Filtered, ViewsAndMonotoneExample) {
    using models::PositionClass;
    const std::vector<models::Centipawns> cps = {-400, -160, -120, 0, 120, 160, 190, 260, 600, 150};
    const std::vector<PositionClass> pred = {
        PositionClass::BlackWinning, PositionClass::Drawish,      PositionClass::Drawish,
        PositionClass::Drawish,      PositionClass::WhiteWinning, PositionClass::Drawish,
        PositionClass::WhiteWinning, PositionClass::WhiteWinning, PositionClass::WhiteWinning,
        PositionClass::WhiteWinning};
    const auto a = filtered_accuracy(pred, cps);
    EXPECT_EQ(a.n_unfiltered, 10u);
    EXPECT_DOUBLE_EQ(a.unfiltered, 6.0 / 10.0);
    // [115, 185] drops -160, -120, 120, 160, 150.
    EXPECT_EQ(a.n_boundary_removed, 5u);
    EXPECT_DOUBLE_EQ(a.boundary_removed, 5.0 / 5.0);
    EXPECT_EQ(a.n_drawish_removed, 3u);
    EXPECT_DOUBLE_EQ(a.drawish_removed, 1.0);
    const std::vector<models::Centipawns> small = {10};
    const std::vector<PositionClass> one = {PositionClass::Drawish};
    EXPECT_THROW(filtered_accuracy(one, small), std::invalid_argument);
    EXPECT_THROW(filtered_accuracy(pred, small), std::invalid_argument);
    EXPECT_NE(filtered_json(a).find("drawish_removed"), std::string::npos);
}
