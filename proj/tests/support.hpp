#pragma once

#include "hubprior/latent.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

namespace testing {

inline hubprior::LatentSet rows_to_set(std::initializer_list<std::initializer_list<float>> rows) {
    std::vector<float> data;
    std::size_t dims = 0;
    for (const auto& r : rows) {
        dims = r.size();
        data.insert(data.end(), r.begin(), r.end());
    }
    return hubprior::LatentSet(dims, std::move(data));
}

/// Uniform test data from std::mt19937_64, independent of the library's sampler.
inline hubprior::LatentSet random_set(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    std::vector<float> data(n * d);
    for (auto& v : data) {
        v = dist(rng);
    }
    return hubprior::LatentSet(d, std::move(data));
}

inline bool close_rel(double a, double b, double rel, double abs = 0.0) {
    return std::abs(a - b) <= std::max(abs, rel * std::max(std::abs(a), std::abs(b)));
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("hubprior-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

} // namespace testing
