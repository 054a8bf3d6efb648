#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "llchess/bench/agreement.hpp"
#include "llchess/bench/filtered.hpp"

namespace llchess::bench {

std::string summary_json(std::span<const AgreementRecord> records, const AgreementConfig& config,
                         const std::string& reference_name);
// Header plus one row per record in input order.
std::string records_tsv(std::span<const AgreementRecord> records);
// Writes <prefix>.json and <prefix>.tsv. Throws std::invalid_argument for no records.
void emit_report(const std::filesystem::path& prefix, std::span<const AgreementRecord> records,
                 const AgreementConfig& config, const std::string& reference_name);

std::string filtered_json(const FilteredAccuracy& acc);

}  // namespace llchess::bench
