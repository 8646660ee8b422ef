#pragma once

#include "hubprior/knn.hpp"
#include "hubprior/latent.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hubprior {

using HubValue = std::uint32_t;

struct HubStats {
    HubValue max = 0;
    double mean = 0.0;
    double median = 0.0;
    /// Adjusted Fisher-Pearson sample skewness (G1); 0 when undefined.
    double skewness = 0.0;
};

inline constexpr const char* kSkewnessEstimator = "adjusted-fisher-pearson";

/**
 * Hub values for one (set, k) pair: m[i] counts how many k-NN lists contain
 * latent i. Since every latent donates exactly k votes, sum(m) == k * n.
 */
struct HubProfile {
    std::size_t k = 0;
    std::vector<HubValue> hub_values;
    std::map<HubValue, std::size_t> histogram;
    HubStats stats;

    std::size_t n() const noexcept { return hub_values.size(); }
};

/// Builds a profile from raw hub values (histogram and stats derived).
HubProfile make_profile(std::size_t k, std::vector<HubValue> hub_values);

/// Counts neighbor-list appearances. Throws Error(IndexOutOfRange) if any
/// neighbor index is >= n.
HubProfile hub_values(const KnnResult& knn, std::size_t n, std::size_t threads = 1);

HubStats compute_stats(std::span<const HubValue> values);

enum class SelectionRule { ThresholdHq, ThresholdLq, Top };

const char* selection_rule_name(SelectionRule rule);

/// A selected latent: batch ordinal plus index within that batch.
struct SelectedLatent {
    std::size_t batch = 0;
    std::size_t index = 0;
    HubValue m = 0;

    friend bool operator==(const SelectedLatent&, const SelectedLatent&) = default;
};

struct SelectionResult {
    SelectionRule rule = SelectionRule::ThresholdHq;
    /// t for ThresholdHq and Top, t_lq for ThresholdLq.
    std::size_t threshold = 0;
    /// n' for Top; unused otherwise.
    std::size_t requested = 0;
    std::vector<SelectedLatent> entries;
    std::size_t batches_drawn = 1;
    /// Copies of the selected rows, in entry order. Always set by select_top.
    std::optional<LatentSet> latents;

    /// Indices within batch 0 (only meaningful for single-batch rules).
    std::vector<std::size_t> indices() const;
};

/// Every latent with m >= t, by descending m then ascending index.
SelectionResult select_hq(const HubProfile& profile, std::size_t t);

/// Every latent with m <= t_lq, by ascending m then ascending index.
SelectionResult select_lq(const HubProfile& profile, std::size_t t_lq);

/// All indices by descending m, ties by ascending index.
std::vector<std::size_t> spectrum(const HubProfile& profile);

/// One latent set with its hub profile, as consumed by select_top.
struct HubBatch {
    LatentSet set;
    HubProfile profile;
};

/// Supplies batches on demand; std::nullopt means the stream is exhausted.
using BatchSource = std::function<std::optional<HubBatch>()>;

/**
 * Top-n' selection with on-demand batches.
 *
 * If the first batch already holds at least n' latents with m > t, its top
 * n' by descending m are returned. Otherwise all m > t latents of the first
 * batch are kept and further batches are drawn, each contributing its m > t
 * latents in descending-m order, until exactly n' are collected. Throws
 * Error(BatchExhaustion) if the source runs dry first.
 */
SelectionResult select_top(const BatchSource& source, std::size_t t, std::size_t n_prime);

/**
 * Batch source drawing N(0, I) sets with seeds base.seed, base.seed + 1, ...
 * and computing hub values with the given k. `max_batches` bounds the
 * stream (0 = unbounded).
 */
BatchSource gaussian_batches(SamplerConfig base, std::size_t k, KnnOptions knn = {}, std::size_t max_batches = 0);

} // namespace hubprior
