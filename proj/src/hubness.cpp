#include "hubprior/hubness.hpp"

#include "hubprior/error.hpp"
#include "hubprior/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>

namespace hubprior {

namespace {

void sort_descending(std::vector<SelectedLatent>& entries) {
    std::sort(entries.begin(), entries.end(), [](const SelectedLatent& a, const SelectedLatent& b) {
        if (a.m != b.m) {
            return a.m > b.m;
        }
        if (a.batch != b.batch) {
            return a.batch < b.batch;
        }
        return a.index < b.index;
    });
}

std::vector<SelectedLatent> above(const HubProfile& profile, std::size_t batch, std::size_t t) {
    std::vector<SelectedLatent> out;
    for (std::size_t i = 0; i < profile.n(); ++i) {
        if (profile.hub_values[i] > t) {
            out.push_back({batch, i, profile.hub_values[i]});
        }
    }
    sort_descending(out);
    return out;
}

} // namespace

HubStats compute_stats(std::span<const HubValue> values) {
    HubStats stats;
    const std::size_t n = values.size();
    if (n == 0) {
        return stats;
    }
    double sum = 0.0;
    for (HubValue v : values) {
        stats.max = std::max(stats.max, v);
        sum += v;
    }
    stats.mean = sum / static_cast<double>(n);

    std::vector<HubValue> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    stats.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (static_cast<double>(sorted[n / 2 - 1]) + sorted[n / 2]);

    double m2 = 0.0;
    double m3 = 0.0;
    for (HubValue v : values) {
        const double dev = static_cast<double>(v) - stats.mean;
        m2 += dev * dev;
        m3 += dev * dev * dev;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    if (n >= 3 && m2 > 0.0) {
        const double g1 = m3 / std::pow(m2, 1.5);
        const double nd = static_cast<double>(n);
        stats.skewness = std::sqrt(nd * (nd - 1.0)) / (nd - 2.0) * g1;
    }
    return stats;
}

HubProfile make_profile(std::size_t k, std::vector<HubValue> values) {
    HubProfile profile;
    profile.k = k;
    profile.hub_values = std::move(values);
    for (HubValue m : profile.hub_values) {
        ++profile.histogram[m];
    }
    profile.stats = compute_stats(profile.hub_values);
    return profile;
}

HubProfile hub_values(const KnnResult& knn, std::size_t n, std::size_t threads) {
    if (knn.n() != n) {
        throw Error(ErrorCode::DimensionMismatch,
                    "k-NN result covers " + std::to_string(knn.n()) + " latents, expected " + std::to_string(n));
    }
    const auto all = knn.all_neighbors();
    for (std::uint32_t idx : all) {
        if (idx >= n) {
            throw Error(ErrorCode::IndexOutOfRange, "neighbor index " + std::to_string(idx) + " >= n");
        }
    }

    if (threads == 0) {
        threads = default_threads();
    }
    const std::size_t chunk = std::max<std::size_t>(1, (n + threads - 1) / threads);
    std::vector<std::vector<HubValue>> local(threads);
    parallel_chunks(n, chunk, threads, [&](std::size_t worker, std::size_t begin, std::size_t end) {
        auto& counts = local[worker];
        if (counts.empty()) {
            counts.assign(n, 0);
        }
        for (std::size_t i = begin; i < end; ++i) {
            for (std::uint32_t j : knn.neighbors(i)) {
                ++counts[j];
            }
        }
    });

    std::vector<HubValue> m(n, 0);
    for (const auto& counts : local) {
        for (std::size_t i = 0; i < counts.size(); ++i) {
            m[i] += counts[i];
        }
    }
    return make_profile(knn.k(), std::move(m));
}

const char* selection_rule_name(SelectionRule rule) {
    switch (rule) {
    case SelectionRule::ThresholdHq: return "threshold_hq";
    case SelectionRule::ThresholdLq: return "threshold_lq";
    case SelectionRule::Top: return "top";
    }
    return "unknown";
}

std::vector<std::size_t> SelectionResult::indices() const {
    std::vector<std::size_t> out;
    out.reserve(entries.size());
    for (const auto& e : entries) {
        out.push_back(e.index);
    }
    return out;
}

SelectionResult select_hq(const HubProfile& profile, std::size_t t) {
    if (t == 0) {
        throw Error(ErrorCode::Config, "hub threshold t must be >= 1");
    }
    SelectionResult result;
    result.rule = SelectionRule::ThresholdHq;
    result.threshold = t;
    for (std::size_t i = 0; i < profile.n(); ++i) {
        if (profile.hub_values[i] >= t) {
            result.entries.push_back({0, i, profile.hub_values[i]});
        }
    }
    sort_descending(result.entries);
    return result;
}

SelectionResult select_lq(const HubProfile& profile, std::size_t t_lq) {
    SelectionResult result;
    result.rule = SelectionRule::ThresholdLq;
    result.threshold = t_lq;
    for (std::size_t i = 0; i < profile.n(); ++i) {
        if (profile.hub_values[i] <= t_lq) {
            result.entries.push_back({0, i, profile.hub_values[i]});
        }
    }
    std::stable_sort(result.entries.begin(), result.entries.end(),
                     [](const SelectedLatent& a, const SelectedLatent& b) { return a.m < b.m; });
    return result;
}

std::vector<std::size_t> spectrum(const HubProfile& profile) {
    std::vector<std::size_t> order(profile.n());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return profile.hub_values[a] > profile.hub_values[b];
    });
    return order;
}

SelectionResult select_top(const BatchSource& source, std::size_t t, std::size_t n_prime) {
    if (n_prime == 0) {
        throw Error(ErrorCode::Config, "n' must be >= 1");
    }
    SelectionResult result;
    result.rule = SelectionRule::Top;
    result.threshold = t;
    result.requested = n_prime;
    result.batches_drawn = 0;

    std::optional<std::size_t> dims;
    Normalization normalization = Normalization::Raw;
    std::vector<float> rows;

    auto take = [&](const HubBatch& batch, const std::vector<SelectedLatent>& picked, std::size_t limit) {
        if (!dims) {
            dims = batch.set.dims();
            normalization = batch.set.normalization();
        } else if (*dims != batch.set.dims()) {
            throw Error(ErrorCode::DimensionMismatch, "batches disagree on latent dims");
        }
        for (std::size_t i = 0; i < picked.size() && result.entries.size() < limit; ++i) {
            result.entries.push_back(picked[i]);
            const auto row = batch.set.row(picked[i].index);
            rows.insert(rows.end(), row.begin(), row.end());
        }
    };

    auto draw = [&]() {
        auto batch = source();
        if (!batch) {
            throw Error(ErrorCode::BatchExhaustion, "batch source exhausted after " +
                                                        std::to_string(result.batches_drawn) + " batches with " +
                                                        std::to_string(result.entries.size()) + " of " +
                                                        std::to_string(n_prime) + " latents collected");
        }
        if (batch->profile.n() != batch->set.count()) {
            throw Error(ErrorCode::DimensionMismatch, "hub profile does not match its latent set");
        }
        ++result.batches_drawn;
        return std::move(*batch);
    };

    const HubBatch first = draw();
    take(first, above(first.profile, 0, t), n_prime);
    while (result.entries.size() < n_prime) {
        const HubBatch next = draw();
        take(next, above(next.profile, result.batches_drawn - 1, t), n_prime);
    }

    // Later batches were appended after earlier ones; restore a global
    // descending-m order and carry the copied rows along.
    std::vector<std::size_t> order(result.entries.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return result.entries[a].m > result.entries[b].m;
    });
    std::vector<SelectedLatent> entries;
    std::vector<float> ordered_rows;
    entries.reserve(order.size());
    ordered_rows.reserve(rows.size());
    for (std::size_t pos : order) {
        entries.push_back(result.entries[pos]);
        ordered_rows.insert(ordered_rows.end(), rows.begin() + pos * *dims, rows.begin() + (pos + 1) * *dims);
    }
    result.entries = std::move(entries);
    result.latents.emplace(*dims, std::move(ordered_rows), normalization);
    return result;
}

BatchSource gaussian_batches(SamplerConfig base, std::size_t k, KnnOptions knn, std::size_t max_batches) {
    auto drawn = std::make_shared<std::size_t>(0);
    return [base, k, knn, max_batches, drawn]() -> std::optional<HubBatch> {
        if (max_batches != 0 && *drawn >= max_batches) {
            return std::nullopt;
        }
        SamplerConfig cfg = base;
        cfg.seed = base.seed + *drawn;
        ++*drawn;
        LatentSet set = sample_latents(cfg);
        HubProfile profile = hub_values(knn_exact(set, k, knn), set.count(), knn.threads);
        return HubBatch{std::move(set), std::move(profile)};
    };
}

} // namespace hubprior
