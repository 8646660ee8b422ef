#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hubprior {

/// Discrete distribution over C classes; probs sum to 1 within 1e-6.
struct ClassHistogram {
    std::vector<double> probs;
    std::string label;

    std::size_t classes() const noexcept { return probs.size(); }
};

/// Normalized class frequencies. Throws Error(AllZero) if no count is positive.
ClassHistogram from_counts(std::span<const std::uint64_t> counts, std::string label = {});

/// Validates and wraps probabilities (non-negative, summing to 1 +- 1e-6).
ClassHistogram from_probabilities(std::vector<double> probs, std::string label = {});

/// Earth mover's distance with class i placed at position i:
/// sum over i of |CDF_p(i) - CDF_q(i)|.
double wasserstein_1d(const ClassHistogram& p, const ClassHistogram& q);

/// 0.5 * sum |p_i - q_i|.
double total_variation(const ClassHistogram& p, const ClassHistogram& q);

enum class ClassMetric { Wasserstein1, TotalVariation };

const char* metric_name(ClassMetric metric);

double class_distance(ClassMetric metric, const ClassHistogram& p, const ClassHistogram& q);

} // namespace hubprior
