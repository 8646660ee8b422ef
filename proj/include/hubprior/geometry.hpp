#pragma once

#include "hubprior/hubness.hpp"
#include "hubprior/latent.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace hubprior {

struct DistanceSummary {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

DistanceSummary summarize(std::span<const double> distances);

/// Per-latent distances before and after w' = c + psi (w - c).
struct TruncationReport {
    double psi = 1.0;
    /// Truncation centre as actually applied (rounded to latent precision).
    std::vector<double> mean_vector;
    std::vector<double> pre_distance;
    std::vector<double> post_distance;
    DistanceSummary pre_summary;
    DistanceSummary post_summary;
};

/// Per-coordinate arithmetic mean, accumulated in double.
std::vector<double> empirical_mean(const LatentSet& set);

/// Euclidean distance of every latent to `reference`, in input order.
std::vector<double> distances_to(const LatentSet& set, std::span<const double> reference);

/**
 * Truncation trick: maps every latent w to c + psi (w - c). The centre c is
 * `mean` rounded to float so that psi = 0 and psi = 1 are exact. The input
 * set is not modified; the result has raw normalization.
 *
 * Throws Error(DimensionMismatch) if mean.size() != dims and Error(Config)
 * unless 0 <= psi <= 1.
 */
std::pair<LatentSet, TruncationReport> truncate(const LatentSet& set, std::span<const double> mean, double psi);

enum class DistanceReference { AllMean, HubMean };
enum class GroupKind { Random, Hubs, Truncated };

const char* reference_name(DistanceReference ref);
const char* group_name(GroupKind group);

struct DistanceHistogram {
    DistanceReference reference = DistanceReference::AllMean;
    GroupKind group = GroupKind::Random;
    /// Only meaningful for GroupKind::Truncated.
    double psi = 1.0;
    std::vector<double> bin_edges;
    std::vector<std::size_t> counts;
    std::size_t size = 0;
    DistanceSummary summary;
};

/// Freedman-Diaconis edges over `values`: width 2 IQR n^(-1/3), spanning
/// [min, max]. Falls back to a single bin when the width degenerates and
/// caps the bin count at `max_bins`.
std::vector<double> freedman_diaconis_edges(std::span<const double> values, std::size_t max_bins = 1000);

/// Bins `values` on `edges`; the last bin is closed on the right.
std::vector<std::size_t> bin_counts(std::span<const double> values, std::span<const double> edges);

struct CentralClusteringReport {
    std::size_t t = 0;
    std::size_t hub_count = 0;
    std::vector<double> all_mean;
    std::vector<double> hub_mean;
    /// One histogram per (reference, group); all share the same edges.
    std::vector<DistanceHistogram> histograms;

    const DistanceHistogram& find(DistanceReference ref, GroupKind group, double psi = 1.0) const;
};

/**
 * Distances of random latents (the whole set), hub latents (m >= t) and
 * truncated copies of the set (one per psi, towards the all-latent mean)
 * to both the all-latent mean and the hub mean. Bin edges are computed
 * once on the pooled distances.
 *
 * Throws Error(EmptyHubSet) when no latent reaches t.
 */
CentralClusteringReport central_clustering_report(const LatentSet& set, const HubProfile& profile, std::size_t t,
                                                  std::span<const double> psis);

} // namespace hubprior
