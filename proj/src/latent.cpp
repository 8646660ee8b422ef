#include "hubprior/latent.hpp"

#include "hubprior/error.hpp"
#include "hubprior/rng.hpp"

#include <cmath>
#include <string>

namespace hubprior {

namespace {

constexpr double kSphereTolerance = 1e-5;

double row_norm(std::span<const float> row) {
    double sum = 0.0;
    for (float v : row) {
        sum += static_cast<double>(v) * static_cast<double>(v);
    }
    return std::sqrt(sum);
}

} // namespace

const char* normalization_name(Normalization mode) {
    return mode == Normalization::Sphere ? "sphere" : "raw";
}

double sphere_radius(std::size_t dims) {
    return std::sqrt(static_cast<double>(dims));
}

LatentSet::LatentSet(std::size_t dims, std::vector<float> data, Normalization normalization,
                     std::optional<std::uint64_t> seed)
    : dims_(dims), count_(0), data_(std::move(data)), normalization_(normalization), seed_(seed) {
    if (dims_ == 0) {
        throw Error(ErrorCode::Config, "latent dims must be positive");
    }
    if (data_.empty()) {
        throw Error(ErrorCode::EmptySet, "latent set must contain at least one vector");
    }
    if (data_.size() % dims_ != 0) {
        throw Error(ErrorCode::DimensionMismatch,
                    "data length " + std::to_string(data_.size()) + " is not a multiple of dims " +
                        std::to_string(dims_));
    }
    count_ = data_.size() / dims_;

    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            throw Error(ErrorCode::NonFinite, "non-finite component in latent " + std::to_string(i / dims_));
        }
    }

    if (normalization_ == Normalization::Sphere) {
        const double radius = sphere_radius(dims_);
        for (std::size_t i = 0; i < count_; ++i) {
            if (std::abs(row_norm(row(i)) - radius) > kSphereTolerance * radius) {
                throw Error(ErrorCode::NotOnSphere,
                            "latent " + std::to_string(i) + " is not on the sphere of radius sqrt(dims)");
            }
        }
    }
}

LatentSet LatentSet::subset(std::span<const std::size_t> indices) const {
    std::vector<float> out;
    out.reserve(indices.size() * dims_);
    for (std::size_t index : indices) {
        if (index >= count_) {
            throw Error(ErrorCode::IndexOutOfRange, "latent index " + std::to_string(index) + " out of range");
        }
        const auto r = row(index);
        out.insert(out.end(), r.begin(), r.end());
    }
    LatentSet result(dims_, std::move(out), normalization_, seed_);
    result.notes_ = notes_;
    return result;
}

LatentSet sample_latents(const SamplerConfig& cfg) {
    if (cfg.dims == 0 || cfg.count == 0) {
        throw Error(ErrorCode::Config, "sampler dims and count must both be >= 1");
    }
    BoxMuller gaussian(cfg.seed);
    std::vector<float> data(cfg.dims * cfg.count);
    for (auto& v : data) {
        v = static_cast<float>(gaussian());
    }
    LatentSet raw(cfg.dims, std::move(data), Normalization::Raw, cfg.seed);
    if (cfg.normalization == Normalization::Sphere) {
        return normalize_sphere(raw);
    }
    return raw;
}

LatentSet normalize_sphere(const LatentSet& set) {
    const std::size_t dims = set.dims();
    const double radius = sphere_radius(dims);
    std::vector<float> out(set.data().begin(), set.data().end());
    for (std::size_t i = 0; i < set.count(); ++i) {
        const double norm = row_norm(set.row(i));
        if (norm == 0.0) {
            throw Error(ErrorCode::ZeroVector, "latent " + std::to_string(i) + " is the zero vector");
        }
        const double scale = radius / norm;
        for (std::size_t j = 0; j < dims; ++j) {
            out[i * dims + j] = static_cast<float>(static_cast<double>(out[i * dims + j]) * scale);
        }
    }
    LatentSet result(dims, std::move(out), Normalization::Sphere, set.seed());
    result.set_notes(set.notes());
    return result;
}

} // namespace hubprior
