// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include "hubprior/class_balance.hpp"
#include "hubprior/error.hpp"
#include "hubprior/geometry.hpp"
#include "hubprior/hubness.hpp"
#include "hubprior/knn.hpp"
#include "hubprior/latent.hpp"
#include "hubprior/latent_io.hpp"
#include "hubprior/pipeline.hpp"

#include "support.hpp"
#include "transport_oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace hubprior;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            detail << "failed: " << what << "; ";
        }
        pass = pass && ok;
    }
};

std::uint64_t total(const HubProfile& p) {
    return std::accumulate(p.hub_values.begin(), p.hub_values.end(), std::uint64_t{0});
}

HubProfile gaussian_profile(std::size_t d, std::size_t n, std::uint64_t seed, std::size_t k, LatentSet* keep = nullptr) {
    LatentSet set = sample_latents({d, n, seed, Normalization::Raw});
    HubProfile p = hub_values(knn_exact(set, k), n);
    if (keep) {
        *keep = std::move(set);
    }
    return p;
}

// Shared seed-0 run (d=512, n=10000, k=5) used by several criteria.
struct DefaultRun {
    LatentSet set{1, {0.0f}};
    HubProfile profile;
};

const DefaultRun& default_run() {
    static const DefaultRun run = [] {
        DefaultRun r;
        r.profile = gaussian_profile(512, 10000, 0, 5, &r.set);
        return r;
    }();
    return run;
}

void conservation(Outcome& o) {
    const auto start = Clock::now();
    std::size_t cases = 0;
    for (std::size_t d : {8, 64, 512}) {
        for (std::size_t n : {100, 1000, 10000}) {
            const LatentSet set = sample_latents({d, n, d * 31 + n, Normalization::Raw});
            if (n <= 1000) {
                for (std::size_t k = 1; k <= 10; ++k) {
                    o.require(total(hub_values(knn_exact(set, k), n)) == k * n, "sum m != k n");
                    ++cases;
                }
            } else {
                // at n = 10000 the k = 10 lists are computed once and cut to each k,
                // with direct runs at k = 1 and 5 as a check on the cut
                const KnnResult wide = knn_exact(set, 10);
                for (std::size_t k = 1; k <= 10; ++k) {
                    o.require(total(hub_values(wide.truncated(k), n)) == k * n, "sum m != k n");
                    ++cases;
                }
                for (std::size_t k : {1, 5}) {
                    const KnnResult direct = knn_exact(set, k);
                    const KnnResult cut = wide.truncated(k);
                    o.require(std::equal(direct.all_neighbors().begin(), direct.all_neighbors().end(),
                                         cut.all_neighbors().begin()),
                              "truncated lists differ from a direct run");
                }
            }
        }
    }
    const double secs = seconds_since(start);
    o.require(secs < 120.0, "grid took longer than 2 min");
    o.detail << cases << " (d,n,k) cases in " << secs << " s";
}

void oracle_equivalence(Outcome& o) {
    const auto start = Clock::now();
    std::mt19937_64 rng(2718);
    std::size_t mismatched = 0;
    const std::size_t instances = 120;
    for (std::size_t trial = 0; trial < instances; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(12, 500)(rng);
        const std::size_t d = std::uniform_int_distribution<std::size_t>(1, 64)(rng);
        const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
        const LatentSet set = trial % 4 == 3 ? sample_latents({d, n, trial, Normalization::Sphere})
                                             : testing::random_set(n, d, rng());
        const KnnResult a = knn_exact(set, k);
        const KnnResult b = knn_oracle(set, k);
        bool same = std::equal(a.all_neighbors().begin(), a.all_neighbors().end(), b.all_neighbors().begin());
        for (std::size_t i = 0; same && i < a.all_distances().size(); ++i) {
            same = testing::close_rel(a.all_distances()[i], b.all_distances()[i], 1e-5, 1e-12);
        }
        mismatched += same ? 0 : 1;
    }
    const double secs = seconds_since(start);
    o.require(mismatched == 0, "kernel differs from oracle");
    o.require(secs < 60.0, "took longer than 1 min");
    o.detail << instances << " instances, " << mismatched << " mismatched, " << secs << " s";
}

void hubness_emergence(Outcome& o) {
    const auto start = Clock::now();
    const HubProfile& p = default_run().profile;
    o.require(p.stats.skewness > 0.0, "skewness not positive");
    o.require(p.stats.max >= 25, "max m below 25");
    o.detail << "max m " << p.stats.max << ", skewness " << p.stats.skewness << ", median " << p.stats.median << ", "
             << seconds_since(start) << " s";
}

void central_clustering(Outcome& o) {
    const auto start = Clock::now();
    const std::vector<double> psis = {0.7, 0.8};
    std::size_t wins = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        LatentSet owned{1, {0.0f}};
        const LatentSet* set = &default_run().set;
        HubProfile profile;
        if (seed == 0) {
            profile = default_run().profile;
        } else {
            profile = gaussian_profile(512, 10000, seed, 5, &owned);
            set = &owned;
        }
        const auto report = central_clustering_report(*set, profile, 50, psis);
        const double hubs = report.find(DistanceReference::AllMean, GroupKind::Hubs).summary.mean;
        const double random = report.find(DistanceReference::AllMean, GroupKind::Random).summary.mean;
        wins += hubs < random ? 1 : 0;
        worst = std::max(worst, hubs / random);
    }
    o.require(wins == 10, "hub latents not closer to the mean in every run");
    o.detail << wins << "/10 seeds with hub Dist2Mean < random, worst ratio " << worst << ", "
             << seconds_since(start) << " s";
}

void truncation_exactness(Outcome& o) {
    const LatentSet set = sample_latents({512, 2000, 99, Normalization::Raw});
    const auto mean = empirical_mean(set);
    std::size_t checked = 0;
    for (double psi : {0.7, 0.8, 0.0, 1.0}) {
        const auto [out, report] = truncate(set, mean, psi);
        const auto post = distances_to(out, report.mean_vector);
        for (std::size_t i = 0; i < set.count(); ++i) {
            o.require(testing::close_rel(post[i], psi * report.pre_distance[i], 1e-5, 1e-9),
                      "post != psi * pre");
            ++checked;
        }
    }
    const auto [a, ra] = truncate(set, mean, 0.7);
    const auto [ab, rab] = truncate(a, mean, 0.8);
    const auto [direct, rd] = truncate(set, mean, 0.7 * 0.8);
    const auto d_ab = distances_to(ab, rd.mean_vector);
    const auto d_direct = distances_to(direct, rd.mean_vector);
    for (std::size_t i = 0; i < set.count(); ++i) {
        o.require(testing::close_rel(d_ab[i], d_direct[i], 1e-5, 1e-9), "composition law");
        o.require(testing::close_rel(d_ab[i], 0.56 * ra.pre_distance[i], 1e-5, 1e-9), "composition law");
    }
    o.detail << checked << " distances over psi in {0.7, 0.8, 0, 1}, composition 0.7 then 0.8 = 0.56";
}

void selection_semantics(Outcome& o) {
    const auto start = Clock::now();
    const HubProfile& p = default_run().profile;
    std::vector<std::size_t> all(p.n());
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (std::size_t t = 1; t <= p.stats.max + 1; ++t) {
        const auto hq = select_hq(p, t).indices();
        const auto next = select_hq(p, t + 1).indices();
        const std::set<std::size_t> wide(hq.begin(), hq.end());
        o.require(std::all_of(next.begin(), next.end(), [&](std::size_t i) { return wide.contains(i); }),
                  "select_hq not nested");
        auto joined = hq;
        const auto lq = select_lq(p, t - 1).indices();
        joined.insert(joined.end(), lq.begin(), lq.end());
        std::sort(joined.begin(), joined.end());
        o.require(joined == all, "hq(t) and lq(t-1) do not partition");
    }
    for (std::size_t t = 0; t < 20; ++t) {
        const auto small = select_lq(p, t).indices();
        const auto big = select_lq(p, t + 1).indices();
        const std::set<std::size_t> wide(big.begin(), big.end());
        o.require(std::all_of(small.begin(), small.end(), [&](std::size_t i) { return wide.contains(i); }),
                  "select_lq not nested");
    }

    const std::size_t t = 50;
    std::size_t qualifying = 0;
    for (HubValue m : p.hub_values) {
        qualifying += m > t ? 1 : 0;
    }
    const std::size_t n_prime = qualifying * 2 + 10;
    bool first = true;
    const BatchSource more = gaussian_batches({512, 10000, 1, Normalization::Raw}, 5, {}, 20);
    const BatchSource source = [&]() -> std::optional<HubBatch> {
        if (first) {
            first = false;
            return HubBatch{default_run().set, p};
        }
        return more();
    };
    const auto top = select_top(source, t, n_prime);
    o.require(top.entries.size() == n_prime, "top-n' did not return exactly n'");
    o.require(top.batches_drawn >= 2, "expected several batches");
    o.require(std::all_of(top.entries.begin(), top.entries.end(), [&](const SelectedLatent& e) { return e.m > t; }),
              "selected latent with m <= t");
    o.require(top.latents && top.latents->count() == n_prime, "latent rows missing");

    bool first_small = true;
    const BatchSource single = [&]() -> std::optional<HubBatch> {
        if (first_small) {
            first_small = false;
            return HubBatch{default_run().set, p};
        }
        return std::nullopt;
    };
    const auto top100 = select_top(single, t, 100);
    o.require(top100.batches_drawn == 1 && top100.entries.size() == 100, "n'=100 should fit in one batch");

    o.detail << "nesting and partition for t = 1.." << p.stats.max + 1 << "; top " << n_prime << " (t=" << t
             << ") drew " << top.batches_drawn << " batches, " << seconds_since(start) << " s";
}

void wasserstein(Outcome& o) {
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<std::uint64_t> pick(0, 1000);
    auto draw = [&] {
        std::vector<std::uint64_t> counts(10);
        for (auto& c : counts) {
            c = pick(rng) < 200 ? 0 : pick(rng);
        }
        counts[rng() % 10] += 1;
        return from_counts(counts);
    };
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto p = draw();
        const auto q = draw();
        const double cdf = wasserstein_1d(p, q);
        const double lp = testing::transport_cost(p.probs, q.probs);
        worst = std::max(worst, std::abs(cdf - lp));
        o.require(std::abs(cdf - lp) <= 1e-8, "CDF formula differs from transport optimum");
    }
    for (int i = 0; i < 200; ++i) {
        const auto p = draw();
        const auto q = draw();
        const auto r = draw();
        for (auto metric : {ClassMetric::Wasserstein1, ClassMetric::TotalVariation}) {
            const double pq = class_distance(metric, p, q);
            o.require(pq >= 0.0, "negative distance");
            o.require(class_distance(metric, p, p) == 0.0, "d(p, p) != 0");
            o.require(std::abs(pq - class_distance(metric, q, p)) <= 1e-12, "asymmetric");
            o.require(class_distance(metric, p, r) <= pq + class_distance(metric, q, r) + 1e-12, "triangle");
        }
    }
    o.detail << "100 C=10 pairs, max |cdf - lp| " << worst << "; axioms on 200 triples";
}

void scaling(Outcome& o) {
    auto timed = [](std::size_t n) {
        const LatentSet set = sample_latents({512, n, 4242, Normalization::Raw});
        const auto start = Clock::now();
        const HubProfile p = hub_values(knn_exact(set, 5), n);
        const double secs = seconds_since(start);
        return std::pair{secs, total(p)};
    };
    const auto [t1, s1] = timed(10000);
    const auto [t2, s2] = timed(20000);
    const double ratio = t2 / t1;
    o.require(s1 == 50000 && s2 == 100000, "conservation");
    o.require(ratio >= 3.0 && ratio <= 6.0, "time ratio outside [3, 6]");
    o.detail << "n=10000 " << t1 << " s, n=20000 " << t2 << " s, ratio " << ratio;
}

void determinism(Outcome& o) {
    testing::TempDir dir("acceptance");
    const nlohmann::json raw = {{"dims", 512}, {"count", 10000}, {"seed", 11}, {"k", 5},
                                {"t", 50},    {"t_lq", 1},      {"top", 100}};
    std::string manifests[2];
    for (int run = 0; run < 2; ++run) {
        PipelineConfig cfg = parse_pipeline_config(raw, dir.path());
        cfg.out_dir = dir.path() / ("run" + std::to_string(run));
        run_pipeline(cfg, raw);
        manifests[run] = read_file(cfg.out_dir / "manifest.json");
        o.require(verify_manifest(cfg.out_dir / "manifest.json").empty(), "manifest hashes do not verify");
    }
    o.require(!manifests[0].empty() && manifests[0] == manifests[1], "manifests differ");
    o.detail << "two runs, manifest " << manifests[0].size() << " bytes, identical: "
             << (manifests[0] == manifests[1] ? "yes" : "no");
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
        {"conservation law", conservation},
        {"oracle equivalence", oracle_equivalence},
        {"hubness emergence", hubness_emergence},
        {"central clustering", central_clustering},
        {"truncation exactness", truncation_exactness},
        {"selection semantics", selection_semantics},
        {"wasserstein correctness", wasserstein},
        {"scaling trend", scaling},
        {"determinism", determinism},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            check(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << std::endl;
        failed += o.pass ? 0 : 1;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
