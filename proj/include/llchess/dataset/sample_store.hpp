#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "llchess/models/zoo.hpp"

namespace llchess::dataset {

enum class SampleSource : std::uint8_t { Original, Expanded };
const char* to_string(SampleSource s);

inline constexpr int kDefaultLabelDepth = 12;

struct LabeledSample {
    std::string fen;
    models::Centipawns cp = 0;  // white-relative, |cp| <= 10000
    SampleSource source = SampleSource::Original;
    int depth = kDefaultLabelDepth;

    friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

class SampleFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Store format: one record per line, "FEN<TAB>cp<TAB>source<TAB>depth\n",
// source is "original" or "expanded".
std::string to_tsv_line(const LabeledSample& s);
// Validates the record: strict FEN, |cp| <= 10000, depth >= 1.
LabeledSample parse_tsv_line(std::string_view line);

void write_samples(const std::filesystem::path& path, std::span<const LabeledSample> samples);
std::vector<LabeledSample> read_samples(const std::filesystem::path& path);

// Packed cache: per sample 775 feature bytes then the cp as little-endian int64.
inline constexpr std::size_t kCacheRecordBytes = 775 + 8;
void write_feature_cache(const std::filesystem::path& path, std::span<const LabeledSample> samples);
models::EncodedCorpus read_feature_cache(const std::filesystem::path& path);

models::EncodedCorpus encode_samples(std::span<const LabeledSample> samples);

// Centipawn histogram with 50 equal bins spanning [-10001, 10001].
struct CorpusStats {
    static constexpr int kBins = 50;
    static constexpr double kLow = -10001.0;
    static constexpr double kHigh = 10001.0;

    std::array<std::uint64_t, kBins> histogram{};
    std::array<std::uint64_t, models::kClassCount> class_counts{};
    std::uint64_t total = 0;
    std::uint64_t original = 0;
    std::uint64_t expanded = 0;
    std::uint64_t duplicates_removed = 0;
    double mean_cp = 0.0;
    double stddev_cp = 0.0;

    static int bin_of(models::Centipawns cp);
    static double bin_edge(int i) { return kLow + (kHigh - kLow) * i / kBins; }
};

CorpusStats compute_stats(std::span<const LabeledSample> samples, std::uint64_t duplicates_removed = 0);
std::string stats_to_json(const CorpusStats& stats);

}  // namespace llchess::dataset
