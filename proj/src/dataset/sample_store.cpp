#include "llchess/dataset/sample_store.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <algorithm>
#include <fstream>

#include "llchess/chess/fen.hpp"

namespace llchess::dataset {
namespace {

int parse_int_field(std::string_view s, const char* what) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw SampleFormatError(std::string("bad ") + what + " field '" + std::string(s) + "'");
    return v;
}

}  // namespace

const char* to_string(SampleSource s) { return s == SampleSource::Original ? "original" : "expanded"; }

std::string to_tsv_line(const LabeledSample& s) {
    return s.fen + '\t' + std::to_string(s.cp) + '\t' + to_string(s.source) + '\t' + std::to_string(s.depth);
}

LabeledSample parse_tsv_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::array<std::string_view, 4> f;
    std::size_t n = 0, start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == '\t') {
            if (n == f.size()) throw SampleFormatError("too many fields");
            f[n++] = line.substr(start, i - start);
            start = i + 1;
        }
    }
    if (n != 4) throw SampleFormatError("expected 4 tab-separated fields, got " + std::to_string(n));
    LabeledSample s;
    s.fen = std::string(f[0]);
    try {
        chess::parse_fen(s.fen);
    } catch (const chess::PositionError& e) {
        throw SampleFormatError(std::string("invalid FEN: ") + e.what());
    }
    s.cp = parse_int_field(f[1], "cp");
    if (std::abs(s.cp) > models::kMateSentinel) throw SampleFormatError("cp outside [-10000, 10000]");
    if (f[2] == "original")
        s.source = SampleSource::Original;
    else if (f[2] == "expanded")
        s.source = SampleSource::Expanded;
    else
        throw SampleFormatError("bad source field '" + std::string(f[2]) + "'");
    s.depth = parse_int_field(f[3], "depth");
    if (s.depth < 1) throw SampleFormatError("depth must be >= 1");
    return s;
}

void write_samples(const std::filesystem::path& path, std::span<const LabeledSample> samples) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& s : samples) out << to_tsv_line(s) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<LabeledSample> read_samples(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<LabeledSample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            out.push_back(parse_tsv_line(line));
        } catch (const SampleFormatError& e) {
            throw SampleFormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void write_feature_cache(const std::filesystem::path& path, std::span<const LabeledSample> samples) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& s : samples) {
        const auto features = encoding::encode(chess::parse_fen(s.fen));
        out.write(reinterpret_cast<const char*>(features.data()), features.size());
        const std::int64_t cp = s.cp;
        char buf[8];
        for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((static_cast<std::uint64_t>(cp) >> (8 * i)) & 0xFF);
        out.write(buf, 8);
    }
}

models::EncodedCorpus read_feature_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    models::EncodedCorpus corpus;
    std::array<char, kCacheRecordBytes> rec;
    while (in.read(rec.data(), rec.size())) {
        encoding::FeatureVector f;
        std::memcpy(f.data(), rec.data(), f.size());
        std::uint64_t raw = 0;
        for (int i = 0; i < 8; ++i) raw |= static_cast<std::uint64_t>(static_cast<unsigned char>(rec[775 + i])) << (8 * i);
        corpus.add(f, static_cast<models::Centipawns>(static_cast<std::int64_t>(raw)));
    }
    if (in.gcount() != 0) throw SampleFormatError("feature cache truncated: " + path.string());
    return corpus;
}

models::EncodedCorpus encode_samples(std::span<const LabeledSample> samples) {
    models::EncodedCorpus corpus;
    for (const auto& s : samples) corpus.add(chess::parse_fen(s.fen), s.cp);
    return corpus;
}

int CorpusStats::bin_of(models::Centipawns cp) {
    const double width = (kHigh - kLow) / kBins;
    const int b = static_cast<int>(std::floor((cp - kLow) / width));
    return std::clamp(b, 0, kBins - 1);
}

CorpusStats compute_stats(std::span<const LabeledSample> samples, std::uint64_t duplicates_removed) {
    CorpusStats st;
    st.duplicates_removed = duplicates_removed;
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& s : samples) {
        ++st.histogram[static_cast<std::size_t>(CorpusStats::bin_of(s.cp))];
        ++st.class_counts[static_cast<std::size_t>(models::label(s.cp))];
        ++st.total;
        ++(s.source == SampleSource::Original ? st.original : st.expanded);
        sum += s.cp;
        sum_sq += static_cast<double>(s.cp) * s.cp;
    }
    if (st.total) {
        st.mean_cp = sum / static_cast<double>(st.total);
        st.stddev_cp = std::sqrt(std::max(0.0, sum_sq / static_cast<double>(st.total) - st.mean_cp * st.mean_cp));
    }
    return st;
}

std::string stats_to_json(const CorpusStats& st) {
    nlohmann::ordered_json j;
    j["total"] = st.total;
    j["original"] = st.original;
    j["expanded"] = st.expanded;
    j["duplicates_removed"] = st.duplicates_removed;
    j["mean_cp"] = st.mean_cp;
    j["stddev_cp"] = st.stddev_cp;
    j["classes"] = {{"black_winning", st.class_counts[0]},
                    {"drawish", st.class_counts[1]},
                    {"white_winning", st.class_counts[2]}};
    auto bins = nlohmann::ordered_json::array();
    for (int i = 0; i < CorpusStats::kBins; ++i)
        bins.push_back({{"lo", CorpusStats::bin_edge(i)}, {"hi", CorpusStats::bin_edge(i + 1)}, {"count", st.histogram[i]}});
    j["histogram"] = bins;
    return j.dump(2) + "\n";
}

}  // namespace llchess::dataset
