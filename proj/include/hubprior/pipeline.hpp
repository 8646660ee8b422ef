#pragma once

#include "hubprior/latent.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace hubprior {

/// Parameters of one sample -> hubs -> select -> stats run.
struct PipelineConfig {
    std::size_t dims = 512;
    std::size_t count = 10000;
    std::uint64_t seed = 0;
    bool sphere = false;
    std::size_t k = 5;
    std::size_t t = 50;
    std::size_t t_lq = 1;
    std::vector<double> psis = {0.7, 0.8};
    /// n' for top selection; 0 skips it.
    std::size_t top = 0;
    std::size_t max_batches = 100;
    std::filesystem::path out_dir = ".";
    /// Execution knobs; they never change outputs and are not hashed.
    std::size_t threads = 0;
    std::size_t chunk_size = 256;

    /// Output-determining parameters, as recorded in the manifest.
    nlohmann::json parameters() const;
};

/// Reads a config object. Unknown keys and out-of-range values raise
/// Error(Config). Relative out_dir is resolved against `base_dir`.
PipelineConfig parse_pipeline_config(const nlohmann::json& config, const std::filesystem::path& base_dir = {});

struct ManifestOutput {
    std::string name;
    /// Relative to the manifest's directory.
    std::string path;
    std::string sha256;
};

/// Reproducibility record of a pipeline run.
struct RunManifest {
    nlohmann::json config;
    nlohmann::json parameters;
    std::string run_id;
    nlohmann::json results;
    std::vector<ManifestOutput> outputs;

    nlohmann::json to_json() const;
};

/// sha256 over the canonical dump of `record`.
std::string run_id_for(const nlohmann::json& record);

/**
 * Runs the full pipeline into cfg.out_dir and writes manifest.json there.
 * Files written so far are passed to `on_output` (used by the CLI to clean
 * up after a failure). Returns the manifest.
 */
RunManifest run_pipeline(const PipelineConfig& cfg, const nlohmann::json& raw_config,
                         const std::function<void(const std::filesystem::path&)>& on_output = {});

/// Recomputes every output hash listed in a manifest file; returns the names
/// of mismatching or missing outputs.
std::vector<std::string> verify_manifest(const std::filesystem::path& manifest_path);

} // namespace hubprior
