#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "amb/harness.hpp"

namespace amb {

/// Column order of every series CSV.
inline constexpr const char* kSeriesCsvHeader = "episode,inst_regret,cum_regret,decided_count,eliminated_pairs,seed";
inline constexpr const char* kSummaryCsvHeader = "episode,runs,mean,median,q10,q90";

/// Series rows grouped by seed in input order; floats use 17 significant digits.
std::string series_to_csv(std::span<const RegretSeries> series);
/// Inverse of series_to_csv. Metadata not in the CSV (hash, K, diagnostics)
/// is left default, except num_episodes which is taken from the last row.
std::vector<RegretSeries> series_from_csv(const std::string& text);

/// JSON variant carrying the same rows plus the run metadata.
std::string series_to_json(std::span<const RegretSeries> series);
std::vector<RegretSeries> series_from_json(const std::string& text);

std::string summary_to_csv(const RegretSummary& summary);

/// Writes `text` to `path`, throwing std::runtime_error that names the path.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace amb
