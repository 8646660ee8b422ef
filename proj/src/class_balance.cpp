#include "hubprior/class_balance.hpp"

#include "hubprior/error.hpp"

#include <cmath>
#include <string>

namespace hubprior {

namespace {

void check_classes(const ClassHistogram& p, const ClassHistogram& q) {
    if (p.classes() != q.classes()) {
        throw Error(ErrorCode::ClassCountMismatch, "histograms have " + std::to_string(p.classes()) + " and " +
                                                       std::to_string(q.classes()) + " classes");
    }
}

} // namespace

ClassHistogram from_counts(std::span<const std::uint64_t> counts, std::string label) {
    long double total = 0;
    for (auto c : counts) {
        total += c;
    }
    if (total <= 0) {
        throw Error(ErrorCode::AllZero, "class counts contain no positive entry");
    }
    ClassHistogram h;
    h.label = std::move(label);
    h.probs.reserve(counts.size());
    for (auto c : counts) {
        h.probs.push_back(static_cast<double>(c / total));
    }
    return h;
}

ClassHistogram from_probabilities(std::vector<double> probs, std::string label) {
    if (probs.empty()) {
        throw Error(ErrorCode::AllZero, "empty class distribution");
    }
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw Error(ErrorCode::Config, "class probabilities must be finite and non-negative");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
        throw Error(ErrorCode::Config, "class probabilities sum to " + std::to_string(sum));
    }
    return ClassHistogram{std::move(probs), std::move(label)};
}

double wasserstein_1d(const ClassHistogram& p, const ClassHistogram& q) {
    check_classes(p, q);
    double cdf_gap = 0.0;
    double total = 0.0;
    // The last CDF difference is 0 up to rounding and moves no mass.
    for (std::size_t i = 0; i + 1 < p.classes(); ++i) {
        cdf_gap += p.probs[i] - q.probs[i];
        total += std::abs(cdf_gap);
    }
    return total;
}

double total_variation(const ClassHistogram& p, const ClassHistogram& q) {
    check_classes(p, q);
    double total = 0.0;
    for (std::size_t i = 0; i < p.classes(); ++i) {
        total += std::abs(p.probs[i] - q.probs[i]);
    }
    return 0.5 * total;
}

const char* metric_name(ClassMetric metric) {
    return metric == ClassMetric::Wasserstein1 ? "w1" : "tv";
}

double class_distance(ClassMetric metric, const ClassHistogram& p, const ClassHistogram& q) {
    return metric == ClassMetric::Wasserstein1 ? wasserstein_1d(p, q) : total_variation(p, q);
}

} // namespace hubprior
