#include "hubprior/cli.hpp"

#include "hubprior/class_balance.hpp"
#include "hubprior/digest.hpp"
#include "hubprior/error.hpp"
#include "hubprior/geometry.hpp"
#include "hubprior/hubness.hpp"
#include "hubprior/knn.hpp"
#include "hubprior/latent_io.hpp"
#include "hubprior/pipeline.hpp"
#include "hubprior/report_io.hpp"
#include "hubprior/rng.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace hubprior {

namespace fs = std::filesystem;

namespace {

/// Files written by the running command; removed unless committed.
class OutputGuard {
public:
    OutputGuard() = default;
    OutputGuard(const OutputGuard&) = delete;
    OutputGuard& operator=(const OutputGuard&) = delete;

    ~OutputGuard() {
        if (committed_) {
            return;
        }
        for (const auto& path : paths_) {
            std::error_code ec;
            fs::remove(path, ec);
        }
    }

    void track(const fs::path& path) { paths_.push_back(path); }

    void write(const fs::path& path, std::string_view bytes) {
        track(path);
        write_file(path, bytes);
    }

    void commit() { committed_ = true; }

private:
    std::vector<fs::path> paths_;
    bool committed_ = false;
};

struct LoadedLatents {
    LatentSet set;
    std::string sha256;
};

LoadedLatents load_latents(const fs::path& path) {
    const std::string bytes = read_file(path);
    return {decode_latents(bytes), sha256_hex(bytes)};
}

std::string input_hash(const fs::path& path) {
    return sha256_file(path);
}

std::string command_run_id(const std::string& command, nlohmann::json parameters, nlohmann::json inputs) {
    return run_id_for({{"command", command}, {"parameters", std::move(parameters)}, {"inputs", std::move(inputs)}});
}

void check_profile(const HubProfile& profile, const LatentSet& set) {
    if (profile.n() != set.count()) {
        throw Error(ErrorCode::DimensionMismatch, "hubs file lists " + std::to_string(profile.n()) +
                                                      " latents but the latent file holds " +
                                                      std::to_string(set.count()));
    }
}

std::vector<double> parse_psis(const std::string& text) {
    std::vector<double> psis;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double psi = 0.0;
        try {
            psi = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) {
            throw Error(ErrorCode::Usage, "bad psi value '" + item + "'");
        }
        psis.push_back(psi);
    }
    if (psis.empty()) {
        throw Error(ErrorCode::Usage, "--psis needs at least one value");
    }
    return psis;
}

void warn(std::ostream& err, const std::string& message) {
    err << nlohmann::json{{"warning", message}}.dump() << '\n';
}

struct Options {
    std::size_t threads = 0;

    // sample
    std::size_t dims = 0;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    bool sphere = false;

    // shared
    std::string in;
    std::string out;
    std::string hubs;

    // hubs
    std::size_t k = 5;
    std::size_t chunk = 256;
    std::string hist;

    // select
    std::size_t t = 0;
    std::size_t t_lq = 0;
    std::size_t top = 0;
    std::string result;
    std::string batch_factory = "none";
    std::size_t max_batches = 100;

    // truncate / stats
    double psi = 0.7;
    std::string mean_from;
    std::string report;
    std::string psis = "0.7,0.8";
    std::string hist_dir;

    // wasserstein
    std::string p;
    std::string q;
    std::string metric = "w1";

    // pipeline
    std::string config;
};

int cmd_sample(const Options& o, std::ostream& out, OutputGuard& guard) {
    const SamplerConfig cfg{o.dims, o.count, o.seed, o.sphere ? Normalization::Sphere : Normalization::Raw};
    const LatentSet set = sample_latents(cfg);
    guard.write(o.out, encode_latents(set));
    out << nlohmann::json{{"wrote", o.out},
                          {"dims", set.dims()},
                          {"count", set.count()},
                          {"seed", o.seed},
                          {"normalization", normalization_name(set.normalization())}}
               .dump()
        << '\n';
    return 0;
}

int cmd_hubs(const Options& o, std::ostream& out, OutputGuard& guard) {
    const auto [set, hash] = load_latents(o.in);
    const std::string run = command_run_id("hubs", {{"k", o.k}}, {{"in", hash}});
    const KnnResult knn = knn_exact(set, o.k, KnnOptions{o.chunk, o.threads});
    const HubProfile profile = hub_values(knn, set.count(), o.threads);
    guard.write(o.out, hubs_csv(profile, run));
    if (!o.hist.empty()) {
        guard.write(o.hist, histogram_csv(profile, run));
    }
    out << nlohmann::json{{"run_id", run}, {"n", profile.n()}, {"k", profile.k}, {"stats", to_json(profile.stats)}}
               .dump()
        << '\n';
    return 0;
}

int cmd_select(const Options& o, const CLI::App& sub, std::ostream& out, std::ostream& err, OutputGuard& guard) {
    const bool has_t = sub.count("--t") > 0;
    const bool has_lq = sub.count("--t-lq") > 0;
    const bool has_top = sub.count("--top") > 0;
    if (has_lq && (has_t || has_top)) {
        throw Error(ErrorCode::Usage, "--t-lq cannot be combined with --t or --top");
    }
    if (has_top && !has_t) {
        throw Error(ErrorCode::Usage, "--top requires --t");
    }
    if (!has_t && !has_lq) {
        throw Error(ErrorCode::Usage, "one of --t, --t-lq or --top N --t T is required");
    }
    if (o.batch_factory != "none" && !has_top) {
        throw Error(ErrorCode::Usage, "--batch-factory only applies to --top");
    }

    const auto [set, hash] = load_latents(o.in);
    const HubProfile profile = read_hubs_csv(o.hubs);
    check_profile(profile, set);

    nlohmann::json params = {{"batch_factory", o.batch_factory}};
    SelectionResult selection;
    if (has_top) {
        params["top"] = o.top;
        params["t"] = o.t;
        params["max_batches"] = o.max_batches;
        bool first = true;
        BatchSource more = [] { return std::optional<HubBatch>{}; };
        if (o.batch_factory == "gaussian" && o.max_batches > 1) {
            if (!set.seed()) {
                throw Error(ErrorCode::MetadataParse, "--batch-factory gaussian needs a seed in the input metadata");
            }
            const SamplerConfig next{set.dims(), set.count(), *set.seed() + 1, set.normalization()};
            more = gaussian_batches(next, profile.k, KnnOptions{o.chunk, o.threads}, o.max_batches - 1);
        }
        const BatchSource source = [&]() -> std::optional<HubBatch> {
            if (first) {
                first = false;
                return HubBatch{set, profile};
            }
            return more();
        };
        selection = select_top(source, o.t, o.top);
    } else if (has_t) {
        params["t"] = o.t;
        selection = select_hq(profile, o.t);
    } else {
        params["t_lq"] = o.t_lq;
        selection = select_lq(profile, o.t_lq);
    }

    const std::string run =
        command_run_id("select", params, {{"in", hash}, {"hubs", input_hash(o.hubs)}});
    const fs::path result_path = o.result.empty() ? fs::path(o.out + ".csv") : fs::path(o.result);
    guard.write(result_path, selection_csv(selection, run));
    if (selection.entries.empty()) {
        warn(err, "selection is empty; no latent file written" +
                      std::string(profile.k == 1 ? " (k = 1 rarely produces hubs)" : ""));
    } else {
        const LatentSet rows = selection.latents ? *selection.latents : set.subset(selection.indices());
        guard.write(o.out, encode_latents(rows));
    }
    out << nlohmann::json{{"run_id", run},
                          {"rule", selection_rule_name(selection.rule)},
                          {"selected", selection.entries.size()},
                          {"batches_drawn", selection.batches_drawn}}
               .dump()
        << '\n';
    return 0;
}

int cmd_spectrum(const Options& o, std::ostream& out, OutputGuard& guard) {
    const auto [set, hash] = load_latents(o.in);
    const HubProfile profile = read_hubs_csv(o.hubs);
    check_profile(profile, set);
    const std::string run = command_run_id("spectrum", nlohmann::json::object(),
                                           {{"in", hash}, {"hubs", input_hash(o.hubs)}});
    guard.write(o.out, spectrum_csv(profile, run));
    out << nlohmann::json{{"run_id", run}, {"n", profile.n()}}.dump() << '\n';
    return 0;
}

int cmd_truncate(const Options& o, std::ostream& out, OutputGuard& guard) {
    const auto [set, hash] = load_latents(o.in);
    nlohmann::json inputs = {{"in", hash}};
    std::vector<double> mean;
    if (o.mean_from.empty()) {
        mean = empirical_mean(set);
    } else {
        const auto [source, source_hash] = load_latents(o.mean_from);
        mean = empirical_mean(source);
        inputs["mean_from"] = source_hash;
    }
    const std::string run = command_run_id("truncate", {{"psi", o.psi}}, inputs);
    auto [truncated, report] = truncate(set, mean, o.psi);
    guard.write(o.out, encode_latents(truncated));
    nlohmann::json j = to_json(report);
    j["run_id"] = run;
    j["mean_source"] = o.mean_from.empty() ? "input" : "mean_from";
    guard.write(o.report, dump_json(j));
    out << nlohmann::json{{"run_id", run},
                          {"psi", o.psi},
                          {"pre_mean", report.pre_summary.mean},
                          {"post_mean", report.post_summary.mean}}
               .dump()
        << '\n';
    return 0;
}

int cmd_stats(const Options& o, std::ostream& out, OutputGuard& guard) {
    const auto [set, hash] = load_latents(o.in);
    const HubProfile profile = read_hubs_csv(o.hubs);
    check_profile(profile, set);
    const std::vector<double> psis = parse_psis(o.psis);
    const std::string run =
        command_run_id("stats", {{"t", o.t}, {"psis", psis}}, {{"in", hash}, {"hubs", input_hash(o.hubs)}});
    const CentralClusteringReport report = central_clustering_report(set, profile, o.t, psis);
    nlohmann::json j = to_json(report);
    j["run_id"] = run;
    guard.write(o.out, dump_json(j));
    if (!o.hist_dir.empty()) {
        fs::create_directories(o.hist_dir);
        for (const auto& h : report.histograms) {
            std::string name = std::string(reference_name(h.reference)) + "_" + group_name(h.group);
            if (h.group == GroupKind::Truncated) {
                std::ostringstream psi;
                psi << h.psi;
                name += "_" + psi.str();
            }
            guard.write(fs::path(o.hist_dir) / (name + ".csv"), distance_histogram_csv(h, run));
        }
    }
    out << nlohmann::json{{"run_id", run}, {"dist2mean", j["dist2mean"]}, {"hub_count", report.hub_count}}.dump()
        << '\n';
    return 0;
}

int cmd_wasserstein(const Options& o, std::ostream& out, OutputGuard& guard) {
    if (o.metric != "w1" && o.metric != "tv") {
        throw Error(ErrorCode::Usage, "--metric must be w1 or tv");
    }
    const ClassMetric metric = o.metric == "w1" ? ClassMetric::Wasserstein1 : ClassMetric::TotalVariation;
    const auto p_counts = read_class_counts(o.p);
    const auto q_counts = read_class_counts(o.q);
    const ClassHistogram p = from_counts(p_counts, fs::path(o.p).filename().string());
    const ClassHistogram q = from_counts(q_counts, fs::path(o.q).filename().string());
    const double distance = class_distance(metric, p, q);
    const std::string run = command_run_id("wasserstein", {{"metric", metric_name(metric)}},
                                           {{"p", input_hash(o.p)}, {"q", input_hash(o.q)}});
    const nlohmann::json j = {{"run_id", run},
                              {"metric", metric_name(metric)},
                              {"ground_metric", metric == ClassMetric::Wasserstein1 ? "|i - j|" : "none"},
                              {"distance", distance},
                              {"p", to_json(p)},
                              {"q", to_json(q)}};
    guard.write(o.out, dump_json(j));
    out << nlohmann::json{{"run_id", run}, {"metric", metric_name(metric)}, {"distance", distance}}.dump() << '\n';
    return 0;
}

int cmd_pipeline(const Options& o, std::ostream& out, OutputGuard& guard) {
    nlohmann::json raw;
    try {
        raw = nlohmann::json::parse(read_file(o.config));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Config, std::string("config is not valid JSON: ") + e.what());
    }
    PipelineConfig cfg = parse_pipeline_config(raw, fs::path(o.config).parent_path());
    if (o.threads != 0) {
        cfg.threads = o.threads;
    }
    const RunManifest manifest = run_pipeline(cfg, raw, [&](const fs::path& p) { guard.track(p); });
    out << nlohmann::json{{"run_id", manifest.run_id},
                          {"manifest", (cfg.out_dir / "manifest.json").string()},
                          {"results", manifest.results}}
               .dump()
        << '\n';
    return 0;
}

void report_error(std::ostream& err, std::string_view code, std::string_view category, std::string_view message) {
    err << nlohmann::json{{"error", code}, {"category", category}, {"message", message}}.dump() << '\n';
}

const char* category_name(ErrorCategory c) {
    switch (c) {
    case ErrorCategory::Usage: return "usage";
    case ErrorCategory::Data: return "data";
    case ErrorCategory::Internal: return "internal";
    }
    return "internal";
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hubness-prior latent sampling toolkit", "hubprior"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)");

    auto* sample = app.add_subcommand("sample", "Draw N(0, I) latents into a LatentFile");
    sample->add_option("--dims", o.dims)->required()->check(CLI::PositiveNumber);
    sample->add_option("--count", o.count)->required()->check(CLI::PositiveNumber);
    sample->add_option("--seed", o.seed)->required();
    sample->add_flag("--sphere", o.sphere, "Rescale every latent to norm sqrt(dims)");
    sample->add_option("--out", o.out)->required();

    auto* hubs = app.add_subcommand("hubs", "Compute per-latent hub values");
    hubs->add_option("--in", o.in)->required();
    hubs->add_option("--k", o.k)->required()->check(CLI::PositiveNumber);
    hubs->add_option("--out", o.out)->required();
    hubs->add_option("--hist", o.hist, "Also write the m,count histogram");
    hubs->add_option("--chunk", o.chunk, "Queries per k-NN chunk")->check(CLI::PositiveNumber);

    auto* select = app.add_subcommand("select", "Select latents by hub value");
    select->add_option("--in", o.in)->required();
    select->add_option("--hubs", o.hubs)->required();
    select->add_option("--t", o.t, "Keep m >= t (with --top: accumulate m > t)")->check(CLI::PositiveNumber);
    select->add_option("--t-lq", o.t_lq, "Keep m <= t_lq");
    select->add_option("--top", o.top, "Return exactly N latents")->check(CLI::PositiveNumber);
    select->add_option("--batch-factory", o.batch_factory, "Extra batches for --top")
        ->check(CLI::IsMember({"none", "gaussian"}));
    select->add_option("--max-batches", o.max_batches)->check(CLI::PositiveNumber);
    select->add_option("--chunk", o.chunk)->check(CLI::PositiveNumber);
    select->add_option("--out", o.out)->required();
    select->add_option("--result", o.result, "Selection CSV (default <out>.csv)");

    auto* spec = app.add_subcommand("spectrum", "Rank all latents by hub value");
    spec->add_option("--in", o.in)->required();
    spec->add_option("--hubs", o.hubs)->required();
    spec->add_option("--out", o.out)->required();

    auto* trunc = app.add_subcommand("truncate", "Apply the truncation trick");
    trunc->add_option("--in", o.in)->required();
    trunc->add_option("--psi", o.psi)->required()->check(CLI::Range(0.0, 1.0));
    trunc->add_option("--mean-from", o.mean_from, "Take the mean from this LatentFile");
    trunc->add_option("--out", o.out)->required();
    trunc->add_option("--report", o.report)->required();

    auto* stats = app.add_subcommand("stats", "Central-clustering distance report");
    stats->add_option("--in", o.in)->required();
    stats->add_option("--hubs", o.hubs)->required();
    stats->add_option("--t", o.t)->required()->check(CLI::PositiveNumber);
    stats->add_option("--psis", o.psis, "Comma-separated psi values");
    stats->add_option("--out", o.out)->required();
    stats->add_option("--hist-dir", o.hist_dir, "Write one histogram CSV per group");

    auto* wd = app.add_subcommand("wasserstein", "Compare two class-count files");
    wd->add_option("--p", o.p)->required();
    wd->add_option("--q", o.q)->required();
    wd->add_option("--metric", o.metric)->check(CLI::IsMember({"w1", "tv"}));
    wd->add_option("--out", o.out)->required();

    auto* pipe = app.add_subcommand("pipeline", "Run sample -> hubs -> select -> stats from a JSON config");
    pipe->add_option("--config", o.config)->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        const auto* failed = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        report_error(err, "Usage", "usage", e.what());
        err << failed->help();
        return static_cast<int>(ErrorCategory::Usage);
    }

    OutputGuard guard;
    try {
        int status = 0;
        if (*sample) {
            status = cmd_sample(o, out, guard);
        } else if (*hubs) {
            status = cmd_hubs(o, out, guard);
        } else if (*select) {
            status = cmd_select(o, *select, out, err, guard);
        } else if (*spec) {
            status = cmd_spectrum(o, out, guard);
        } else if (*trunc) {
            status = cmd_truncate(o, out, guard);
        } else if (*stats) {
            status = cmd_stats(o, out, guard);
        } else if (*wd) {
            status = cmd_wasserstein(o, out, guard);
        } else if (*pipe) {
            status = cmd_pipeline(o, out, guard);
        }
        guard.commit();
        return status;
    } catch (const Error& e) {
        report_error(err, error_name(e.code()), category_name(e.category()), e.what());
        return static_cast<int>(e.category());
    } catch (const std::filesystem::filesystem_error& e) {
        report_error(err, "Io", "data", e.what());
        return static_cast<int>(ErrorCategory::Data);
    } catch (const std::exception& e) {
        report_error(err, "Internal", "internal", e.what());
        return static_cast<int>(ErrorCategory::Internal);
    }
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace hubprior
