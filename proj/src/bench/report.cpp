#include "llchess/bench/report.hpp"

#include <fstream>

#include "json.hpp"

namespace llchess::bench {

std::string summary_json(std::span<const AgreementRecord> records, const AgreementConfig& config,
                         const std::string& reference_name) {
    const AgreementSummary s = summarize(records);
    nlohmann::ordered_json j;
    j["agreement"] = s.agreement;
    j["samples"] = s.samples;
    j["quarantined"] = s.quarantined;
    j["judged"] = s.samples - s.quarantined;
    j["agree_exact"] = s.agree_exact;
    j["agree_equal_strength"] = s.agree_equal;
    j["disagree"] = s.disagree;
    j["config"] = {{"our_depth", config.our_depth},
                   {"ref_depth", config.ref_depth},
                   {"child_depth", std::max(1, config.ref_depth - config.child_depth_offset)},
                   {"eps_cp", config.eps_cp},
                   {"reference", reference_name}};
    return j.dump(2) + "\n";
}

std::string records_tsv(std::span<const AgreementRecord> records) {
    std::string out = "fen\tour_move\tour_cp\tref_best\tref_eval_our\tref_eval_best\tverdict\n";
    for (const auto& r : records) {
        out += r.fen + '\t' + r.our_move + '\t' + std::to_string(r.our_value_cp) + '\t';
        if (r.quarantined) {
            out += "\t\t\tquarantined: " + r.error + '\n';
            continue;
        }
        out += r.ref_best_move + '\t' + r.ref_eval_our.to_string() + '\t' + r.ref_eval_best.to_string() + '\t' +
               to_string(r.verdict) + '\n';
    }
    return out;
}

void emit_report(const std::filesystem::path& prefix, std::span<const AgreementRecord> records,
                 const AgreementConfig& config, const std::string& reference_name) {
    if (records.empty()) throw std::invalid_argument("no agreement records to report");
    auto json_path = prefix;
    json_path += ".json";
    auto tsv_path = prefix;
    tsv_path += ".tsv";
    if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());
    std::ofstream(json_path, std::ios::binary | std::ios::trunc) << summary_json(records, config, reference_name);
    std::ofstream(tsv_path, std::ios::binary | std::ios::trunc) << records_tsv(records);
}

std::string filtered_json(const FilteredAccuracy& a) {
    nlohmann::ordered_json j;
    j["unfiltered"] = {{"accuracy", a.unfiltered}, {"samples", a.n_unfiltered}};
    j["boundary_removed"] = {{"accuracy", a.boundary_removed}, {"samples", a.n_boundary_removed}};
    j["drawish_removed"] = {{"accuracy", a.drawish_removed}, {"samples", a.n_drawish_removed}};
    return j.dump(2) + "\n";
}

}  // namespace llchess::bench
