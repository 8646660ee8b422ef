#pragma once

#include "hubprior/class_balance.hpp"
#include "hubprior/geometry.hpp"
#include "hubprior/hubness.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace hubprior {

// CSV files start with a "# run=<id> ..." comment line naming the run that
// produced them, followed by a header row. Readers skip '#' lines.

/// hubs.csv: index,m
std::string hubs_csv(const HubProfile& profile, const std::string& run_id);
/// hist.csv: m,count
std::string histogram_csv(const HubProfile& profile, const std::string& run_id);
/// spectrum.csv: rank,index,m
std::string spectrum_csv(const HubProfile& profile, const std::string& run_id);
/// selection csv: rank,batch,index,m
std::string selection_csv(const SelectionResult& selection, const std::string& run_id);
/// distance histogram csv: bin_lo,bin_hi,count
std::string distance_histogram_csv(const DistanceHistogram& hist, const std::string& run_id);

/// Parses hubs.csv. k comes from the comment line when present, else it is
/// recovered as sum(m) / n.
HubProfile parse_hubs_csv(const std::string& text);
HubProfile read_hubs_csv(const std::filesystem::path& path);

/// Parses class_index,count rows (optional header). Missing classes below
/// the largest index count as zero; duplicates are an error.
std::vector<std::uint64_t> parse_class_counts(const std::string& text);
std::vector<std::uint64_t> read_class_counts(const std::filesystem::path& path);

nlohmann::json to_json(const HubStats& stats);
nlohmann::json to_json(const TruncationReport& report, bool per_latent = true);
nlohmann::json to_json(const DistanceHistogram& hist);
nlohmann::json to_json(const CentralClusteringReport& report);
nlohmann::json to_json(const ClassHistogram& hist);

/// Canonical JSON text: sorted keys, two-space indent, trailing newline.
std::string dump_json(const nlohmann::json& value);

} // namespace hubprior
