#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hubprior {

enum class Normalization : std::uint8_t { Raw = 0, Sphere = 1 };

const char* normalization_name(Normalization mode);

/// Radius used by sphere normalization: sqrt(dims).
double sphere_radius(std::size_t dims);

/**
 * An ordered, immutable collection of `count` latent vectors in R^dims,
 * stored row-major in 32-bit floats.
 *
 * Construction validates the invariants: count >= 1, dims >= 1, all values
 * finite, and (in sphere mode) every row has norm sqrt(dims) within 1e-5
 * relative.
 */
class LatentSet {
public:
    LatentSet(std::size_t dims, std::vector<float> data, Normalization normalization = Normalization::Raw,
              std::optional<std::uint64_t> seed = std::nullopt);

    std::size_t dims() const noexcept { return dims_; }
    std::size_t count() const noexcept { return count_; }
    Normalization normalization() const noexcept { return normalization_; }
    std::optional<std::uint64_t> seed() const noexcept { return seed_; }

    std::span<const float> data() const noexcept { return data_; }
    std::span<const float> row(std::size_t i) const noexcept { return {data_.data() + i * dims_, dims_}; }

    /// Free-form provenance string carried through file round trips.
    const std::string& notes() const noexcept { return notes_; }
    void set_notes(std::string notes) { notes_ = std::move(notes); }

    /// Copies the given rows, in order, into a new set.
    LatentSet subset(std::span<const std::size_t> indices) const;

    friend bool operator==(const LatentSet&, const LatentSet&) = default;

private:
    std::size_t dims_;
    std::size_t count_;
    std::vector<float> data_;
    Normalization normalization_;
    std::optional<std::uint64_t> seed_;
    std::string notes_;
};

struct SamplerConfig {
    std::size_t dims = 512;
    std::size_t count = 10000;
    std::uint64_t seed = 0;
    Normalization normalization = Normalization::Raw;
};

/// Draws `count` i.i.d. N(0, I_dims) vectors. Rows are filled in order from
/// one Box-Muller stream over xoshiro256** seeded with `cfg.seed`, so the
/// output is a pure function of the config. Throws Error(Config) for
/// dims == 0 or count == 0.
LatentSet sample_latents(const SamplerConfig& cfg);

/// Rescales every row to norm sqrt(dims). Throws Error(ZeroVector) naming
/// the first zero row.
LatentSet normalize_sphere(const LatentSet& set);

} // namespace hubprior
