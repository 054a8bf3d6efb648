#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "llchess/chess/board.hpp"
#include "llchess/dataset/pgn.hpp"
#include "llchess/dataset/sample_store.hpp"
#include "llchess/encoding/features.hpp"
#include "llchess/uci/client.hpp"

namespace llchess::dataset {

// Uniqueness is keyed on the encoded features, so en passant and clocks are ignored.
class Deduplicator {
public:
    // True if the position was not seen before.
    bool insert(const chess::Board& board);
    bool contains(const chess::Board& board) const;
    std::size_t size() const { return seen_.size(); }
    std::size_t removed() const { return removed_; }

private:
    std::unordered_set<encoding::FeatureKey, encoding::FeatureKeyHash> seen_;
    std::size_t removed_ = 0;
};

// First occurrence kept.
std::vector<chess::Board> dedup(std::span<const chess::Board> boards, std::size_t* removed = nullptr);

// Engine scores are relative to the side to move; mates map to +-10000.
models::Centipawns white_relative_cp(const uci::EngineScore& score, chess::Color side_to_move);

struct LabelConfig {
    int depth = kDefaultLabelDepth;
    unsigned workers = 1;
};

struct LabelStats {
    std::size_t labeled = 0;
    std::size_t retried = 0;
    std::size_t quarantined = 0;
    std::vector<std::string> quarantine_log;  // "FEN<TAB>reason"
};

// Labels every board with one analyzer per worker. A failed analysis restarts the
// worker's analyzer and is retried once; a second failure quarantines the position
// (nullopt). Checkmate and stalemate are scored without consulting the engine.
// Output order matches input order regardless of worker count.
std::vector<std::optional<LabeledSample>> label_positions(std::span<const chess::Board> boards,
                                                          const uci::AnalyzerFactory& factory,
                                                          const LabelConfig& config, LabelStats& stats,
                                                          SampleSource source = SampleSource::Original);

struct LineageEntry {
    std::string parent_fen;
    std::string move;  // UCI text
    std::string child_fen;
};

struct ExpandResult {
    std::vector<LabeledSample> samples;
    std::vector<LineageEntry> lineage;
    std::size_t skipped_terminal = 0;
    std::size_t duplicates = 0;
};

// Picks round(fraction * n) samples by a seeded shuffle, plays one uniformly random
// legal move in each, and labels the unseen children. `corpus` is updated with the
// accepted children.
ExpandResult expand(std::span<const LabeledSample> samples, double fraction, std::uint64_t seed,
                    const uci::AnalyzerFactory& factory, const LabelConfig& config, Deduplicator& corpus,
                    LabelStats& stats);

struct Split {
    std::vector<LabeledSample> train;
    std::vector<LabeledSample> test;
};

// Exact partition: round(train_fraction * n) samples go to train, chosen by a seeded shuffle.
Split split_samples(std::span<const LabeledSample> samples, double train_fraction, std::uint64_t seed);

struct PipelineConfig {
    std::vector<std::filesystem::path> pgn_files;
    std::filesystem::path out_dir;
    double expand_fraction = 0.5;
    double train_fraction = 0.88;  // 22M train / 3M test
    std::uint64_t seed = 1;
    LabelConfig label;
    std::size_t max_positions = 0;  // 0 keeps every unique position
    bool write_cache = false;
};

struct PipelineReport {
    IngestStats ingest;
    std::size_t unique_positions = 0;
    std::size_t duplicates_removed = 0;
    LabelStats label;
    std::size_t expanded = 0;
    std::size_t train = 0;
    std::size_t test = 0;
    CorpusStats stats;
};

// ingest -> dedup -> label -> expand -> split. Writes train.tsv, test.tsv,
// stats.json, lineage.tsv and quarantine.tsv (plus train.bin/test.bin) into out_dir.
PipelineReport run_pipeline(const PipelineConfig& config, const uci::AnalyzerFactory& factory);

}  // namespace llchess::dataset
