#include "llchess/dataset/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <thread>

#include "llchess/chess/fen.hpp"
#include "llchess/chess/movegen.hpp"
#include "llchess/nn/network.hpp"

namespace llchess::dataset {

using chess::Board;

bool Deduplicator::insert(const Board& board) {
    const bool fresh = seen_.insert(encoding::feature_key(board)).second;
    if (!fresh) ++removed_;
    return fresh;
}

bool Deduplicator::contains(const Board& board) const { return seen_.contains(encoding::feature_key(board)); }

std::vector<Board> dedup(std::span<const Board> boards, std::size_t* removed) {
    Deduplicator d;
    std::vector<Board> out;
    for (const auto& b : boards)
        if (d.insert(b)) out.push_back(b);
    if (removed) *removed = d.removed();
    return out;
}

models::Centipawns white_relative_cp(const uci::EngineScore& score, chess::Color side_to_move) {
    models::Centipawns stm;
    if (score.kind == uci::EngineScore::Kind::Mate)
        stm = score.value > 0 ? models::kMateSentinel : -models::kMateSentinel;
    else
        stm = std::clamp(score.value, -models::kMateSentinel, models::kMateSentinel);
    return side_to_move == chess::Color::White ? stm : -stm;
}

namespace {

std::optional<models::Centipawns> terminal_cp(const Board& board) {
    if (!chess::legal_moves(board).empty()) return std::nullopt;
    if (!chess::in_check(board, board.side_to_move())) return 0;
    return board.side_to_move() == chess::Color::White ? -models::kMateSentinel : models::kMateSentinel;
}

}  // namespace

std::vector<std::optional<LabeledSample>> label_positions(std::span<const Board> boards,
                                                          const uci::AnalyzerFactory& factory,
                                                          const LabelConfig& config, LabelStats& stats,
                                                          SampleSource source) {
    std::vector<std::optional<LabeledSample>> out(boards.size());
    std::vector<std::string> failure(boards.size());
    std::vector<char> retried(boards.size(), 0);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        std::unique_ptr<uci::Analyzer> analyzer;
        for (std::size_t i = next++; i < boards.size(); i = next++) {
            const Board& board = boards[i];
            const std::string fen = chess::serialize_fen(board);
            if (const auto cp = terminal_cp(board)) {
                out[i] = LabeledSample{fen, *cp, source, config.depth};
                continue;
            }
            for (int attempt = 0; attempt < 2 && !out[i]; ++attempt) {
                try {
                    if (!analyzer) analyzer = factory();
                    const auto score = analyzer->analyze(fen, config.depth);
                    out[i] = LabeledSample{fen, white_relative_cp(score, board.side_to_move()), source, config.depth};
                } catch (const std::exception& e) {
                    analyzer.reset();
                    failure[i] = e.what();
                    if (attempt == 0) retried[i] = 1;
                }
            }
        }
    };

    const unsigned n_workers = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(boards.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < boards.size(); ++i) {
        stats.retried += retried[i];
        if (out[i]) {
            ++stats.labeled;
        } else {
            ++stats.quarantined;
            stats.quarantine_log.push_back(chess::serialize_fen(boards[i]) + '\t' + failure[i]);
        }
    }
    return out;
}

ExpandResult expand(std::span<const LabeledSample> samples, double fraction, std::uint64_t seed,
                    const uci::AnalyzerFactory& factory, const LabelConfig& config, Deduplicator& corpus,
                    LabelStats& stats) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("expand fraction must be in [0, 1]");
    ExpandResult result;
    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(nn::detail::mix(seed, 0xE4));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    const auto take = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(samples.size())));
    order.resize(take);
    std::sort(order.begin(), order.end());

    std::vector<Board> children;
    std::vector<LineageEntry> lineage;
    for (const std::size_t idx : order) {
        const Board parent = chess::parse_fen(samples[idx].fen);
        const auto moves = chess::legal_moves(parent);
        // Each parent draws from its own stream so the choice does not depend on the others.
        std::mt19937_64 move_rng(nn::detail::mix(seed, parent.hash()));
        if (moves.empty()) {
            ++result.skipped_terminal;
            continue;
        }
        const auto& m = moves[move_rng() % moves.size()];
        const Board child = parent.after(m);
        if (!corpus.insert(child)) {
            ++result.duplicates;
            continue;
        }
        children.push_back(child);
        lineage.push_back({samples[idx].fen, m.uci(), chess::serialize_fen(child)});
    }
    const auto labeled = label_positions(children, factory, config, stats, SampleSource::Expanded);
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        if (!labeled[i]) continue;
        result.samples.push_back(*labeled[i]);
        result.lineage.push_back(lineage[i]);
    }
    return result;
}

Split split_samples(std::span<const LabeledSample> samples, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) throw std::invalid_argument("train fraction must be in [0, 1]");
    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(nn::detail::mix(seed, 0x5B));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(samples.size())));
    Split s;
    s.train.reserve(n_train);
    s.test.reserve(samples.size() - n_train);
    for (std::size_t i = 0; i < order.size(); ++i) (i < n_train ? s.train : s.test).push_back(samples[order[i]]);
    return s;
}

PipelineReport run_pipeline(const PipelineConfig& config, const uci::AnalyzerFactory& factory) {
    PipelineReport report;
    Deduplicator corpus;
    std::vector<Board> unique;
    for (const auto& path : config.pgn_files) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path.string());
        ingest_pgn(
            in,
            [&](const Board& b) {
                if (config.max_positions && unique.size() >= config.max_positions) return;
                if (corpus.insert(b)) unique.push_back(b);
            },
            report.ingest);
    }
    report.unique_positions = unique.size();
    report.duplicates_removed = corpus.removed();

    const auto labeled = label_positions(unique, factory, config.label, report.label);
    std::vector<LabeledSample> samples;
    samples.reserve(labeled.size());
    for (const auto& s : labeled)
        if (s) samples.push_back(*s);

    const auto expanded =
        expand(samples, config.expand_fraction, config.seed, factory, config.label, corpus, report.label);
    report.expanded = expanded.samples.size();
    samples.insert(samples.end(), expanded.samples.begin(), expanded.samples.end());

    const Split split = split_samples(samples, config.train_fraction, config.seed);
    report.train = split.train.size();
    report.test = split.test.size();
    report.stats = compute_stats(samples, corpus.removed());

    std::filesystem::create_directories(config.out_dir);
    write_samples(config.out_dir / "train.tsv", split.train);
    write_samples(config.out_dir / "test.tsv", split.test);
    {
        std::ofstream out(config.out_dir / "stats.json", std::ios::binary | std::ios::trunc);
        out << stats_to_json(report.stats);
    }
    {
        std::ofstream out(config.out_dir / "lineage.tsv", std::ios::binary | std::ios::trunc);
        for (const auto& e : expanded.lineage) out << e.parent_fen << '\t' << e.move << '\t' << e.child_fen << '\n';
    }
    {
        std::ofstream out(config.out_dir / "quarantine.tsv", std::ios::binary | std::ios::trunc);
        for (const auto& q : report.label.quarantine_log) out << q << '\n';
    }
    if (config.write_cache) {
        write_feature_cache(config.out_dir / "train.bin", split.train);
        write_feature_cache(config.out_dir / "test.bin", split.test);
    }
    return report;
}

}  // namespace llchess::dataset
