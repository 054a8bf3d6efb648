#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <unistd.h>

#include "llchess/chess/fen.hpp"
#include "llchess/dataset/pgn.hpp"
#include "llchess/dataset/pipeline.hpp"
#include "llchess/dataset/san.hpp"
#include "llchess/refengine/classical.hpp"
#include "support.hpp"

using namespace llchess;
using namespace llchess::dataset;
namespace fs = std::filesystem;

namespace {

// Deterministic stand-in for an engine: material balance from the side to move,
// failing on demand for chosen positions.
class MaterialAnalyzer final : public uci::Analyzer {
public:
    explicit MaterialAnalyzer(std::set<std::string> poison = {}, int fail_times = 0)
        : poison_(std::move(poison)), fail_times_(fail_times) {}
    uci::EngineScore analyze(const std::string& fen, int depth) override {
        if (poison_.count(fen)) {
            std::lock_guard lock(failures_mutex());
            if (failures()[fen]++ < fail_times_) throw uci::EngineError("poisoned " + fen);
        }
        const auto b = chess::parse_fen(fen);
        const int white = refengine::evaluate_cp(b);
        uci::EngineScore s;
        s.value = b.side_to_move() == chess::Color::White ? white : -white;
        s.depth = depth;
        s.bestmove = chess::legal_moves(b)[0].uci();
        return s;
    }
    static std::map<std::string, int>& failures() {
        static std::map<std::string, int> f;
        return f;
    }
    static std::mutex& failures_mutex() {
        static std::mutex m;
        return m;
    }

private:
    std::set<std::string> poison_;
    int fail_times_;
};

uci::AnalyzerFactory material_factory(std::set<std::string> poison = {}, int fail_times = 0) {
    return [=] { return std::make_unique<MaterialAnalyzer>(poison, fail_times); };
}

fs::path temp_dir(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("llchess_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST(San, ParsesAndPrints) {
    const auto b = chess::Board::startpos();
    EXPECT_EQ(parse_san(b, "Nf3").uci(), "g1f3");
    EXPECT_EQ(parse_san(b, "e4!?").uci(), "e2e4");
    EXPECT_THROW(parse_san(b, "Ke2"), chess::IllegalMove);
    const auto promo = chess::parse_fen("r3k3/1P6/8/8/8/8/8/4K3 w q - 0 1");
    EXPECT_EQ(parse_san(promo, "bxa8=Q+").uci(), "b7a8q");
    EXPECT_EQ(to_san(promo, chess::parse_uci_move(promo, "b7a8q")), "bxa8=Q+");
    const auto knights = chess::parse_fen("4k3/8/8/8/8/8/8/N1N1K3 w - - 0 1");
    EXPECT_EQ(to_san(knights, chess::parse_uci_move(knights, "a1b3")), "Nab3");
    const auto castle = chess::parse_fen("4k3/8/8/8/8/8/8/4K2R w K - 0 1");
    EXPECT_EQ(parse_san(castle, "O-O").uci(), "e1g1");
    EXPECT_EQ(to_san(castle, chess::parse_uci_move(castle, "e1g1")), "O-O");
}

TEST(Pgn, ThreeGameFixture) {
    std::ifstream in(testing_support::data_dir() / "three_games.pgn");
    std::vector<chess::Board> boards;
    IngestStats stats;
    ingest_pgn(in, [&](const chess::Board& b) { boards.push_back(b); }, stats);
    EXPECT_EQ(stats.games, 3u);
    EXPECT_EQ(stats.games_skipped, 1u);
    ASSERT_EQ(stats.errors.size(), 1u);
    EXPECT_EQ(stats.positions, 7u + 4u);
    ASSERT_EQ(boards.size(), 11u);
    EXPECT_TRUE(chess::is_checkmate(boards[6]));
    EXPECT_EQ(chess::serialize_fen(boards[10]), "8/8/4k3/4P3/8/8/8/4K3 w - - 1 3");
}

TEST(Pgn, ReaderKeepsMainlineAndTags) {
    std::ifstream in(testing_support::data_dir() / "three_games.pgn");
    PgnReader reader(in);
    const auto g = reader.next();
    ASSERT_TRUE(g);
    EXPECT_EQ(g->tags.at("Event"), "Fixture one");
    EXPECT_EQ(g->moves, (std::vector<std::string>{"e4", "e5", "Bc4", "Nc6", "Qh5", "Nf6", "Qxf7#"}));
    EXPECT_EQ(g->result, "1-0");
    const auto g2 = reader.next();
    ASSERT_TRUE(g2);
    EXPECT_EQ(chess::serialize_fen(game_start(*g2)), "4k3/8/8/8/8/8/4P3/4K3 w - - 0 1");
}

TEST(Pgn, WriteThenReadBack) {
    const auto start = chess::Board::startpos();
    std::vector<chess::Move> moves;
    chess::Board b = start;
    for (const char* m : {"e2e4", "c7c5", "g1f3", "d7d6"}) {
        moves.push_back(chess::parse_uci_move(b, m));
        b = b.after(moves.back());
    }
    std::ostringstream out;
    write_pgn(out, {{"Event", "t"}}, start, moves, "*");
    std::istringstream in(out.str());
    PgnReader reader(in);
    const auto g = reader.next();
    ASSERT_TRUE(g);
    EXPECT_EQ(g->moves, (std::vector<std::string>{"e4", "c5", "Nf3", "d6"}));
    EXPECT_EQ(chess::serialize_fen(replay(*g).back()), chess::serialize_fen(b));
}

TEST(SampleStore, TsvRoundTripAndValidation) {
    const LabeledSample s{std::string(chess::kStartFen), -42, SampleSource::Expanded, 8};
    EXPECT_EQ(to_tsv_line(s), std::string(chess::kStartFen) + "\t-42\texpanded\t8");
    EXPECT_EQ(parse_tsv_line(to_tsv_line(s)), s);
    EXPECT_THROW(parse_tsv_line("bad fen\t0\toriginal\t12"), SampleFormatError);
    EXPECT_THROW(parse_tsv_line(std::string(chess::kStartFen) + "\t10001\toriginal\t12"), SampleFormatError);
    EXPECT_THROW(parse_tsv_line(std::string(chess::kStartFen) + "\t1\tcopied\t12"), SampleFormatError);
    EXPECT_THROW(parse_tsv_line(std::string(chess::kStartFen) + "\t1\toriginal"), SampleFormatError);
}

TEST(SampleStore, FeatureCacheRoundTrip) {
    const auto dir = temp_dir("cache");
    std::vector<LabeledSample> samples;
    for (const auto& b : testing_support::random_positions(2, 50, 0, 40))
        samples.push_back({chess::serialize_fen(b), refengine::evaluate_cp(b), SampleSource::Original, 4});
    samples[3].cp = -10000;
    write_feature_cache(dir / "c.bin", samples);
    EXPECT_EQ(fs::file_size(dir / "c.bin"), samples.size() * kCacheRecordBytes);
    const auto corpus = read_feature_cache(dir / "c.bin");
    const auto direct = encode_samples(samples);
    ASSERT_EQ(corpus.size(), samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        EXPECT_EQ(corpus.cp(i), samples[i].cp);
        EXPECT_TRUE(std::equal(corpus.features(i).begin(), corpus.features(i).end(), direct.features(i).begin()));
    }
    fs::resize_file(dir / "c.bin", fs::file_size(dir / "c.bin") - 5);
    EXPECT_THROW(read_feature_cache(dir / "c.bin"), SampleFormatError);
    fs::remove_all(dir);
}

TEST(Stats, HistogramBins) {
    EXPECT_EQ(CorpusStats::bin_of(-10000), 0);
    EXPECT_EQ(CorpusStats::bin_of(10000), 49);
    EXPECT_EQ(CorpusStats::bin_of(0), 25);
    EXPECT_DOUBLE_EQ(CorpusStats::bin_edge(0), -10001.0);
    EXPECT_DOUBLE_EQ(CorpusStats::bin_edge(50), 10001.0);
    std::vector<LabeledSample> s = {{std::string(chess::kStartFen), 200, SampleSource::Original, 1},
                                    {std::string(chess::kStartFen), -200, SampleSource::Expanded, 1},
                                    {std::string(chess::kStartFen), 0, SampleSource::Original, 1}};
    const auto st = compute_stats(s, 7);
    EXPECT_EQ(st.total, 3u);
    EXPECT_EQ(st.class_counts, (std::array<std::uint64_t, 3>{1, 1, 1}));
    EXPECT_EQ(st.duplicates_removed, 7u);
    EXPECT_DOUBLE_EQ(st.mean_cp, 0.0);
    EXPECT_NE(stats_to_json(st).find("\"duplicates_removed\": 7"), std::string::npos);
}

TEST(Pipeline, DedupIgnoresClocks) {
    const auto a = chess::parse_fen("4k3/8/8/8/8/8/8/4K2R w K - 0 1");
    const auto b = chess::parse_fen("4k3/8/8/8/8/8/8/4K2R w K - 9 40");
    const auto c = chess::parse_fen("4k3/8/8/8/8/8/8/4K2R w - - 0 1");
    std::size_t removed = 0;
    const std::vector<chess::Board> in = {a, b, c, a};
    EXPECT_EQ(dedup(in, &removed).size(), 2u);
    EXPECT_EQ(removed, 2u);
}

TEST(Pipeline, WhiteRelativeScores) {
    uci::EngineScore s;
    s.value = 120;
    EXPECT_EQ(white_relative_cp(s, chess::Color::Black), -120);
    s.value = 9000;
    EXPECT_EQ(white_relative_cp(s, chess::Color::White), 9000);
    s.kind = uci::EngineScore::Kind::Mate;
    s.value = 3;
    EXPECT_EQ(white_relative_cp(s, chess::Color::Black), -10000);
    s.value = -2;
    EXPECT_EQ(white_relative_cp(s, chess::Color::Black), 10000);
}

TEST(Pipeline, LabelingRetriesThenQuarantines) {
    const auto boards = testing_support::random_positions(4, 30, 2, 30);
    const std::string flaky = chess::serialize_fen(boards[5]);
    const std::string broken = chess::serialize_fen(boards[9]);
    MaterialAnalyzer::failures().clear();
    auto factory = [&] {
        struct Mixed final : uci::Analyzer {
            MaterialAnalyzer flaky_once, always;
            std::string f, b;
            Mixed(std::string f_, std::string b_)
                : flaky_once({f_}, 1), always({b_}, 1000), f(std::move(f_)), b(std::move(b_)) {}
            uci::EngineScore analyze(const std::string& fen, int depth) override {
                return fen == b ? always.analyze(fen, depth) : flaky_once.analyze(fen, depth);
            }
        };
        return std::unique_ptr<uci::Analyzer>(new Mixed(flaky, broken));
    };
    LabelStats stats;
    const auto out = label_positions(boards, factory, {6, 3}, stats);
    ASSERT_EQ(out.size(), boards.size());
    EXPECT_FALSE(out[9].has_value());
    EXPECT_TRUE(out[5].has_value());
    EXPECT_EQ(stats.quarantined, 1u);
    EXPECT_GE(stats.retried, 2u);
    ASSERT_EQ(stats.quarantine_log.size(), 1u);
    EXPECT_EQ(stats.quarantine_log[0].substr(0, broken.size()), broken);
    for (std::size_t i = 0; i < boards.size(); ++i)
        if (out[i]) {
            EXPECT_EQ(out[i]->fen, chess::serialize_fen(boards[i]));
            EXPECT_EQ(out[i]->cp, refengine::evaluate_cp(boards[i]));
            EXPECT_EQ(out[i]->depth, 6);
        }
}

TEST(Pipeline, TerminalPositionsScoredLocally) {
    const std::vector<chess::Board> boards = {
        chess::parse_fen("rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR w KQkq - 1 3"),
        chess::parse_fen("k7/8/1Q6/8/8/8/8/7K b - - 0 1")};
    LabelStats stats;
    auto never = [] () -> std::unique_ptr<uci::Analyzer> { throw uci::EngineError("should not be called"); };
    const auto out = label_positions(boards, never, {}, stats);
    ASSERT_TRUE(out[0] && out[1]);
    EXPECT_EQ(out[0]->cp, -10000);
    EXPECT_EQ(out[1]->cp, 0);
}

TEST(Pipeline, SplitIsExactPartition) {
    std::vector<LabeledSample> s;
    for (const auto& b : testing_support::random_positions(6, 101, 1, 30))
        s.push_back({chess::serialize_fen(b), 0, SampleSource::Original, 1});
    const auto split = split_samples(s, 0.88, 3);
    EXPECT_EQ(split.train.size(), 89u);
    EXPECT_EQ(split.test.size(), 12u);
    std::multiset<std::string> all, parts;
    for (const auto& x : s) all.insert(x.fen);
    for (const auto& x : split.train) parts.insert(x.fen);
    for (const auto& x : split.test) parts.insert(x.fen);
    EXPECT_EQ(all, parts);
    EXPECT_EQ(split_samples(s, 0.88, 3).train, split.train);
    EXPECT_NE(split_samples(s, 0.88, 4).train, split.train);
}

TEST(Pipeline, ExpansionRecordsLineage) {
    std::vector<LabeledSample> s;
    Deduplicator corpus;
    for (const auto& b : testing_support::random_positions(7, 40, 1, 30)) {
        if (!corpus.insert(b)) continue;
        s.push_back({chess::serialize_fen(b), 0, SampleSource::Original, 1});
    }
    LabelStats stats;
    const auto r = expand(s, 0.5, 9, material_factory(), {}, corpus, stats);
    EXPECT_EQ(r.samples.size() + r.duplicates + r.skipped_terminal, (s.size() + 1) / 2);
    ASSERT_EQ(r.lineage.size(), r.samples.size());
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        EXPECT_EQ(r.samples[i].source, SampleSource::Expanded);
        EXPECT_EQ(r.lineage[i].child_fen, r.samples[i].fen);
        const auto parent = chess::parse_fen(r.lineage[i].parent_fen);
        EXPECT_EQ(chess::serialize_fen(chess::apply_move(parent, chess::parse_uci_move(parent, r.lineage[i].move))),
                  r.samples[i].fen);
    }
}

TEST(Pipeline, EndToEndDeterministic) {
    auto run = [](const fs::path& dir, unsigned workers) {
        PipelineConfig cfg;
        cfg.pgn_files = {testing_support::data_dir() / "three_games.pgn"};
        cfg.out_dir = dir;
        cfg.seed = 5;
        cfg.label = {3, workers};
        cfg.write_cache = true;
        return run_pipeline(cfg, material_factory());
    };
    const auto a = temp_dir("pipe_a"), b = temp_dir("pipe_b");
    const auto ra = run(a, 1);
    run(b, 4);
    EXPECT_EQ(ra.unique_positions, 11u);
    EXPECT_EQ(ra.train + ra.test, ra.unique_positions + ra.expanded);
    for (const char* f : {"train.tsv", "test.tsv", "stats.json", "lineage.tsv", "quarantine.tsv", "train.bin", "test.bin"})
        EXPECT_EQ(testing_support::slurp(a / f), testing_support::slurp(b / f)) << f;
    fs::remove_all(a);
    fs::remove_all(b);
}
