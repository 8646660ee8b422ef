#include "hubprior/geometry.hpp"

#include "hubprior/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hubprior {

namespace {

void check_dims(const LatentSet& set, std::span<const double> vec) {
    if (vec.size() != set.dims()) {
        throw Error(ErrorCode::DimensionMismatch, "reference has " + std::to_string(vec.size()) +
                                                      " components, latents have " + std::to_string(set.dims()));
    }
}

// Linear-interpolated quantile of sorted data.
double quantile(std::span<const double> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

DistanceHistogram make_histogram(DistanceReference ref, GroupKind group, double psi, std::vector<double> values,
                                 std::span<const double> edges) {
    DistanceHistogram h;
    h.reference = ref;
    h.group = group;
    h.psi = psi;
    h.bin_edges.assign(edges.begin(), edges.end());
    h.counts = bin_counts(values, edges);
    h.size = values.size();
    h.summary = summarize(values);
    return h;
}

} // namespace

DistanceSummary summarize(std::span<const double> distances) {
    DistanceSummary s;
    if (distances.empty()) {
        return s;
    }
    s.min = distances.front();
    s.max = distances.front();
    double sum = 0.0;
    for (double d : distances) {
        s.min = std::min(s.min, d);
        s.max = std::max(s.max, d);
        sum += d;
    }
    s.mean = sum / static_cast<double>(distances.size());
    return s;
}

std::vector<double> empirical_mean(const LatentSet& set) {
    if (set.count() == 0) {
        throw Error(ErrorCode::EmptySet, "mean of an empty set");
    }
    std::vector<double> mean(set.dims(), 0.0);
    for (std::size_t i = 0; i < set.count(); ++i) {
        const auto row = set.row(i);
        for (std::size_t j = 0; j < mean.size(); ++j) {
            mean[j] += row[j];
        }
    }
    for (double& v : mean) {
        v /= static_cast<double>(set.count());
    }
    return mean;
}

std::vector<double> distances_to(const LatentSet& set, std::span<const double> reference) {
    check_dims(set, reference);
    std::vector<double> out(set.count());
    for (std::size_t i = 0; i < set.count(); ++i) {
        const auto row = set.row(i);
        double sum = 0.0;
        for (std::size_t j = 0; j < reference.size(); ++j) {
            const double diff = static_cast<double>(row[j]) - reference[j];
            sum += diff * diff;
        }
        out[i] = std::sqrt(sum);
    }
    return out;
}

std::pair<LatentSet, TruncationReport> truncate(const LatentSet& set, std::span<const double> mean, double psi) {
    check_dims(set, mean);
    if (!(psi >= 0.0 && psi <= 1.0)) {
        throw Error(ErrorCode::Config, "psi must lie in [0, 1]");
    }
    TruncationReport report;
    report.psi = psi;
    report.mean_vector.reserve(mean.size());
    for (double v : mean) {
        report.mean_vector.push_back(static_cast<float>(v));
    }
    const auto& centre = report.mean_vector;

    const std::size_t dims = set.dims();
    std::vector<float> out(set.data().size());
    for (std::size_t i = 0; i < set.count(); ++i) {
        const auto row = set.row(i);
        for (std::size_t j = 0; j < dims; ++j) {
            out[i * dims + j] = static_cast<float>(centre[j] + psi * (static_cast<double>(row[j]) - centre[j]));
        }
    }
    LatentSet truncated(dims, std::move(out), Normalization::Raw, set.seed());
    truncated.set_notes(set.notes());

    report.pre_distance = distances_to(set, centre);
    report.post_distance = distances_to(truncated, centre);
    report.pre_summary = summarize(report.pre_distance);
    report.post_summary = summarize(report.post_distance);
    return {std::move(truncated), std::move(report)};
}

const char* reference_name(DistanceReference ref) {
    return ref == DistanceReference::AllMean ? "all_mean" : "hub_mean";
}

const char* group_name(GroupKind group) {
    switch (group) {
    case GroupKind::Random: return "random";
    case GroupKind::Hubs: return "hubs";
    case GroupKind::Truncated: return "truncated";
    }
    return "unknown";
}

std::vector<double> freedman_diaconis_edges(std::span<const double> values, std::size_t max_bins) {
    if (values.empty()) {
        throw Error(ErrorCode::EmptySet, "histogram of no values");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front();
    const double hi = sorted.back();
    const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));

    std::size_t bins = 1;
    if (width > 0.0 && hi > lo) {
        bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
        bins = std::clamp<std::size_t>(bins, 1, std::max<std::size_t>(max_bins, 1));
    }
    const double span = hi > lo ? hi - lo : 1.0;
    std::vector<double> edges(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) {
        edges[b] = lo + span * static_cast<double>(b) / static_cast<double>(bins);
    }
    edges.back() = hi > lo ? hi : lo + 1.0;
    return edges;
}

std::vector<std::size_t> bin_counts(std::span<const double> values, std::span<const double> edges) {
    if (edges.size() < 2) {
        throw Error(ErrorCode::Config, "histogram needs at least two edges");
    }
    std::vector<std::size_t> counts(edges.size() - 1, 0);
    for (double v : values) {
        if (v < edges.front() || v > edges.back()) {
            continue;
        }
        auto it = std::upper_bound(edges.begin(), edges.end(), v);
        auto bin = static_cast<std::size_t>(std::distance(edges.begin(), it)) - 1;
        ++counts[std::min(bin, counts.size() - 1)];
    }
    return counts;
}

const DistanceHistogram& CentralClusteringReport::find(DistanceReference ref, GroupKind group, double psi) const {
    for (const auto& h : histograms) {
        if (h.reference == ref && h.group == group && (group != GroupKind::Truncated || h.psi == psi)) {
            return h;
        }
    }
    throw Error(ErrorCode::Internal, std::string("no histogram for ") + reference_name(ref) + "/" + group_name(group));
}

CentralClusteringReport central_clustering_report(const LatentSet& set, const HubProfile& profile, std::size_t t,
                                                  std::span<const double> psis) {
    if (profile.n() != set.count()) {
        throw Error(ErrorCode::DimensionMismatch, "hub profile does not match latent set");
    }
    const SelectionResult hubs = select_hq(profile, t);
    if (hubs.entries.empty()) {
        throw Error(ErrorCode::EmptyHubSet, "no latent has hub value >= " + std::to_string(t));
    }
    const LatentSet hub_set = set.subset(hubs.indices());

    CentralClusteringReport report;
    report.t = t;
    report.hub_count = hub_set.count();
    report.all_mean = empirical_mean(set);
    report.hub_mean = empirical_mean(hub_set);

    struct Group {
        GroupKind kind;
        double psi;
        std::vector<double> to_all;
        std::vector<double> to_hub;
    };
    std::vector<Group> groups;
    groups.push_back({GroupKind::Random, 1.0, distances_to(set, report.all_mean), distances_to(set, report.hub_mean)});
    groups.push_back(
        {GroupKind::Hubs, 1.0, distances_to(hub_set, report.all_mean), distances_to(hub_set, report.hub_mean)});
    for (double psi : psis) {
        auto [truncated, tr] = truncate(set, report.all_mean, psi);
        groups.push_back({GroupKind::Truncated, psi, distances_to(truncated, report.all_mean),
                          distances_to(truncated, report.hub_mean)});
    }

    std::vector<double> pooled;
    for (const auto& g : groups) {
        pooled.insert(pooled.end(), g.to_all.begin(), g.to_all.end());
        pooled.insert(pooled.end(), g.to_hub.begin(), g.to_hub.end());
    }
    const std::vector<double> edges = freedman_diaconis_edges(pooled);

    for (auto& g : groups) {
        report.histograms.push_back(
            make_histogram(DistanceReference::AllMean, g.kind, g.psi, std::move(g.to_all), edges));
    }
    for (auto& g : groups) {
        report.histograms.push_back(
            make_histogram(DistanceReference::HubMean, g.kind, g.psi, std::move(g.to_hub), edges));
    }
    return report;
}

} // namespace hubprior
