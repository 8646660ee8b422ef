#pragma once

#include "hubprior/latent.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hubprior {

/**
 * Exact k-nearest-neighbor lists for every member of a latent set.
 *
 * Row i holds the k indices j != i closest to latent i under Euclidean
 * distance, nearest first. Equal distances are ordered by ascending index.
 */
class KnnResult {
public:
    KnnResult(std::size_t n, std::size_t k, std::vector<std::uint32_t> neighbors, std::vector<double> distances);

    std::size_t n() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }

    std::span<const std::uint32_t> neighbors(std::size_t i) const noexcept { return {neighbors_.data() + i * k_, k_}; }
    std::span<const double> distances(std::size_t i) const noexcept { return {distances_.data() + i * k_, k_}; }

    std::span<const std::uint32_t> all_neighbors() const noexcept { return neighbors_; }
    std::span<const double> all_distances() const noexcept { return distances_; }

    /// First `k` columns; a valid k-NN result for the smaller k.
    KnnResult truncated(std::size_t k) const;

private:
    std::size_t n_;
    std::size_t k_;
    std::vector<std::uint32_t> neighbors_;
    std::vector<double> distances_;
};

struct KnnOptions {
    /// Queries processed together against the full set.
    std::size_t chunk_size = 256;
    /// Worker threads; 0 means hardware concurrency.
    std::size_t threads = 0;
};

/// Squared Euclidean distance, float inputs, double accumulation.
double squared_distance(std::span<const float> a, std::span<const float> b);

/**
 * Chunked brute-force k-NN. Each chunk of queries is compared against the
 * whole set while a bounded heap per query keeps the best k; peak memory is
 * O(chunk * k + n * k). Output does not depend on thread count or chunk size.
 *
 * Throws Error(KTooLarge) unless 1 <= k < n.
 */
KnnResult knn_exact(const LatentSet& set, std::size_t k, const KnnOptions& options = {});

/// Reference implementation: full distance row per query, then a stable sort.
KnnResult knn_oracle(const LatentSet& set, std::size_t k);

} // namespace hubprior
