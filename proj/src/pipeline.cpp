#include "hubprior/pipeline.hpp"

#include "hubprior/digest.hpp"
#include "hubprior/error.hpp"
#include "hubprior/geometry.hpp"
#include "hubprior/hubness.hpp"
#include "hubprior/knn.hpp"
#include "hubprior/latent_io.hpp"
#include "hubprior/report_io.hpp"

#include <set>

namespace hubprior {

namespace fs = std::filesystem;

namespace {

template <typename T>
T get_param(const nlohmann::json& config, const char* key, T fallback) {
    if (!config.contains(key)) {
        return fallback;
    }
    try {
        return config.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Config, std::string("config field '") + key + "': " + e.what());
    }
}

} // namespace

nlohmann::json PipelineConfig::parameters() const {
    return {{"dims", dims},
            {"count", count},
            {"seed", seed},
            {"sphere", sphere},
            {"k", k},
            {"t", t},
            {"t_lq", t_lq},
            {"psis", psis},
            {"top", top},
            {"max_batches", max_batches}};
}

PipelineConfig parse_pipeline_config(const nlohmann::json& config, const fs::path& base_dir) {
    if (!config.is_object()) {
        throw Error(ErrorCode::Config, "pipeline config must be a JSON object");
    }
    static const std::set<std::string> known = {"dims", "count", "seed", "sphere", "k",       "t",         "t_lq",
                                                "psis", "top",   "max_batches", "out_dir", "threads", "chunk_size"};
    for (const auto& item : config.items()) {
        if (!known.contains(item.key())) {
            throw Error(ErrorCode::Config, "unknown config field '" + item.key() + "'");
        }
    }

    PipelineConfig cfg;
    cfg.dims = get_param(config, "dims", cfg.dims);
    cfg.count = get_param(config, "count", cfg.count);
    cfg.seed = get_param(config, "seed", cfg.seed);
    cfg.sphere = get_param(config, "sphere", cfg.sphere);
    cfg.k = get_param(config, "k", cfg.k);
    cfg.t = get_param(config, "t", cfg.t);
    cfg.t_lq = get_param(config, "t_lq", cfg.t_lq);
    cfg.psis = get_param(config, "psis", cfg.psis);
    cfg.top = get_param(config, "top", cfg.top);
    cfg.max_batches = get_param(config, "max_batches", cfg.max_batches);
    cfg.threads = get_param(config, "threads", cfg.threads);
    cfg.chunk_size = get_param(config, "chunk_size", cfg.chunk_size);
    const fs::path out_dir = get_param<std::string>(config, "out_dir", ".");
    cfg.out_dir = out_dir.is_absolute() || base_dir.empty() ? out_dir : base_dir / out_dir;

    if (cfg.dims == 0 || cfg.count == 0) {
        throw Error(ErrorCode::Config, "dims and count must be >= 1");
    }
    if (cfg.k == 0 || cfg.k >= cfg.count) {
        throw Error(ErrorCode::KTooLarge, "k must satisfy 1 <= k < count");
    }
    if (cfg.t == 0) {
        throw Error(ErrorCode::Config, "t must be >= 1");
    }
    for (double psi : cfg.psis) {
        if (!(psi >= 0.0 && psi <= 1.0)) {
            throw Error(ErrorCode::Config, "every psi must lie in [0, 1]");
        }
    }
    if (cfg.max_batches == 0) {
        throw Error(ErrorCode::Config, "max_batches must be >= 1");
    }
    if (cfg.chunk_size == 0) {
        throw Error(ErrorCode::Config, "chunk_size must be >= 1");
    }
    return cfg;
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& o : outputs) {
        outs.push_back({{"name", o.name}, {"path", o.path}, {"sha256", o.sha256}});
    }
    return {{"tool", "hubprior"},
            {"manifest_version", 1},
            {"config", config},
            {"parameters", parameters},
            {"run_id", run_id},
            {"results", results},
            {"outputs", outs}};
}

std::string run_id_for(const nlohmann::json& record) {
    return sha256_hex(record.dump());
}

RunManifest run_pipeline(const PipelineConfig& cfg, const nlohmann::json& raw_config,
                         const std::function<void(const fs::path&)>& on_output) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) {
        throw Error(ErrorCode::Io, "cannot create output directory " + cfg.out_dir.string() + ": " + ec.message());
    }

    RunManifest manifest;
    manifest.config = raw_config;
    manifest.parameters = cfg.parameters();
    manifest.run_id = run_id_for({{"command", "pipeline"}, {"parameters", manifest.parameters}});
    manifest.results = nlohmann::json::object();
    const std::string& run = manifest.run_id;

    auto emit = [&](const std::string& name, const std::string& file, std::string_view bytes) {
        const fs::path path = cfg.out_dir / file;
        if (on_output) {
            on_output(path);
        }
        write_file(path, bytes);
        manifest.outputs.push_back({name, file, sha256_hex(bytes)});
    };

    const KnnOptions knn_options{cfg.chunk_size, cfg.threads};
    const SamplerConfig sampler{cfg.dims, cfg.count, cfg.seed,
                                cfg.sphere ? Normalization::Sphere : Normalization::Raw};

    // Step 1: sample and count hub values.
    const LatentSet latents = sample_latents(sampler);
    emit("latents", "latents.hubl", encode_latents(latents));

    const HubProfile profile = hub_values(knn_exact(latents, cfg.k, knn_options), latents.count(), cfg.threads);
    emit("hubs", "hubs.csv", hubs_csv(profile, run));
    emit("hist", "hist.csv", histogram_csv(profile, run));
    emit("spectrum", "spectrum.csv", spectrum_csv(profile, run));
    manifest.results["hub_stats"] = to_json(profile.stats);

    // Step 2: threshold selections.
    auto emit_selection = [&](const std::string& name, const SelectionResult& sel, const LatentSet* rows) {
        emit(name + "_selection", name + ".csv", selection_csv(sel, run));
        if (rows != nullptr) {
            emit(name + "_latents", name + ".hubl", encode_latents(*rows));
        }
        manifest.results[name] = {{"selected", sel.entries.size()}, {"batches_drawn", sel.batches_drawn}};
    };

    const SelectionResult hq = select_hq(profile, cfg.t);
    if (hq.entries.empty()) {
        emit_selection("hq", hq, nullptr);
    } else {
        const LatentSet rows = latents.subset(hq.indices());
        emit_selection("hq", hq, &rows);
    }
    const SelectionResult lq = select_lq(profile, cfg.t_lq);
    if (lq.entries.empty()) {
        emit_selection("lq", lq, nullptr);
    } else {
        const LatentSet rows = latents.subset(lq.indices());
        emit_selection("lq", lq, &rows);
    }

    if (cfg.top > 0) {
        bool first = true;
        BatchSource more = [] { return std::optional<HubBatch>{}; };
        if (cfg.max_batches > 1) {
            more = gaussian_batches(SamplerConfig{sampler.dims, sampler.count, sampler.seed + 1, sampler.normalization},
                                    cfg.k, knn_options, cfg.max_batches - 1);
        }
        BatchSource source = [&]() -> std::optional<HubBatch> {
            if (first) {
                first = false;
                return HubBatch{latents, profile};
            }
            return more();
        };
        const SelectionResult top = select_top(source, cfg.t, cfg.top);
        emit_selection("top", top, &*top.latents);
    }

    // Central clustering analysis.
    if (hq.entries.empty()) {
        manifest.results["stats"] = "skipped: no latent has m >= t";
    } else {
        const CentralClusteringReport report = central_clustering_report(latents, profile, cfg.t, cfg.psis);
        nlohmann::json j = to_json(report);
        j["run_id"] = run;
        emit("stats", "stats.json", dump_json(j));
        manifest.results["dist2mean"] = j["dist2mean"];
    }

    const fs::path manifest_path = cfg.out_dir / "manifest.json";
    if (on_output) {
        on_output(manifest_path);
    }
    write_file(manifest_path, dump_json(manifest.to_json()));
    return manifest;
}

std::vector<std::string> verify_manifest(const fs::path& manifest_path) {
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MetadataParse, std::string("manifest is not valid JSON: ") + e.what());
    }
    std::vector<std::string> bad;
    const fs::path dir = manifest_path.parent_path();
    for (const auto& out : manifest.at("outputs")) {
        const fs::path path = dir / out.at("path").get<std::string>();
        if (!fs::exists(path) || sha256_file(path) != out.at("sha256").get<std::string>()) {
            bad.push_back(out.at("name").get<std::string>());
        }
    }
    return bad;
}

} // namespace hubprior
