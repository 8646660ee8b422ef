#include "hubprior/knn.hpp"

#include "hubprior/error.hpp"
#include "hubprior/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <string>

namespace hubprior {

namespace {

// Rows of the reference set visited per tile; sized so a tile of 512-d
// float rows stays in L2 while a chunk of queries sweeps it.
constexpr std::size_t kTileRows = 128;
// Micro-kernel shape: queries x reference rows per call.
constexpr std::size_t kQueryBlock = 4;
constexpr std::size_t kRowBlock = 4;

struct Candidate {
    double dist2;
    std::uint32_t index;
};

// Strict "is nearer than": smaller distance, then smaller index.
inline bool nearer(const Candidate& a, const Candidate& b) {
    return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
}

/// Bounded max-heap holding the k nearest candidates seen so far.
class BestK {
public:
    explicit BestK(std::size_t k) : k_(k) { items_.reserve(k); }

    void clear() { items_.clear(); }

    void offer(double dist2, std::uint32_t index) {
        const Candidate c{dist2, index};
        if (items_.size() < k_) {
            items_.push_back(c);
            std::push_heap(items_.begin(), items_.end(), nearer);
        } else if (nearer(c, items_.front())) {
            std::pop_heap(items_.begin(), items_.end(), nearer);
            items_.back() = c;
            std::push_heap(items_.begin(), items_.end(), nearer);
        }
    }

    void write_sorted(std::uint32_t* indices, double* distances) {
        std::sort_heap(items_.begin(), items_.end(), nearer);
        for (std::size_t i = 0; i < items_.size(); ++i) {
            indices[i] = items_[i].index;
            distances[i] = std::sqrt(items_[i].dist2);
        }
    }

private:
    std::size_t k_;
    std::vector<Candidate> items_;
};

void check_k(const LatentSet& set, std::size_t k) {
    if (set.count() == 0) {
        throw Error(ErrorCode::EmptySet, "k-NN on an empty set");
    }
    if (k == 0 || k >= set.count()) {
        throw Error(ErrorCode::KTooLarge, "k = " + std::to_string(k) + " must satisfy 1 <= k < n = " +
                                              std::to_string(set.count()));
    }
    if (set.count() > std::numeric_limits<std::uint32_t>::max()) {
        throw Error(ErrorCode::Config, "latent set too large for 32-bit neighbor indices");
    }
}

} // namespace

KnnResult::KnnResult(std::size_t n, std::size_t k, std::vector<std::uint32_t> neighbors, std::vector<double> distances)
    : n_(n), k_(k), neighbors_(std::move(neighbors)), distances_(std::move(distances)) {
    if (neighbors_.size() != n_ * k_ || distances_.size() != n_ * k_) {
        throw Error(ErrorCode::DimensionMismatch, "k-NN result arrays do not match n * k");
    }
}

KnnResult KnnResult::truncated(std::size_t k) const {
    if (k == 0 || k > k_) {
        throw Error(ErrorCode::KTooLarge, "cannot truncate k-NN result to k = " + std::to_string(k));
    }
    std::vector<std::uint32_t> idx(n_ * k);
    std::vector<double> dist(n_ * k);
    for (std::size_t i = 0; i < n_; ++i) {
        std::copy_n(neighbors_.begin() + i * k_, k, idx.begin() + i * k);
        std::copy_n(distances_.begin() + i * k_, k, dist.begin() + i * k);
    }
    return KnnResult(n_, k, std::move(idx), std::move(dist));
}

namespace {

constexpr std::size_t kLanes = 8;
using Lanes = double __attribute__((vector_size(kLanes * sizeof(double))));

inline Lanes load_lanes(const double* p) {
    Lanes v;
    std::memcpy(&v, p, sizeof(v));
    return v;
}

/// Squared distances from `Q` queries to `R` rows. Lane l accumulates
/// dimensions congruent to l mod 8 and lanes are summed in order, so every
/// block shape gives bit-identical results for the same pair.
template <std::size_t Q, std::size_t R>
inline void squared_distances(const double* const* queries, const double* const* rows, std::size_t d, double* out) {
    Lanes acc[Q][R] = {};
    std::size_t i = 0;
    for (; i + kLanes <= d; i += kLanes) {
        Lanes row_lanes[R];
        for (std::size_t r = 0; r < R; ++r) {
            row_lanes[r] = load_lanes(rows[r] + i);
        }
        for (std::size_t q = 0; q < Q; ++q) {
            const Lanes query_lanes = load_lanes(queries[q] + i);
            for (std::size_t r = 0; r < R; ++r) {
                const Lanes diff = query_lanes - row_lanes[r];
                acc[q][r] += diff * diff;
            }
        }
    }
    for (std::size_t q = 0; q < Q; ++q) {
        for (std::size_t r = 0; r < R; ++r) {
            for (std::size_t l = 0, c = i; c < d; ++c, ++l) {
                const double diff = queries[q][c] - rows[r][c];
                acc[q][r][l] += diff * diff;
            }
            double sum = 0.0;
            for (std::size_t l = 0; l < kLanes; ++l) {
                sum += acc[q][r][l];
            }
            out[q * R + r] = sum;
        }
    }
}

std::vector<double> widen(std::span<const float> values) {
    return std::vector<double>(values.begin(), values.end());
}

} // namespace

double squared_distance(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::DimensionMismatch, "squared_distance on vectors of different length");
    }
    const std::vector<double> wa = widen(a);
    const std::vector<double> wb = widen(b);
    const double* qa = wa.data();
    const double* rb = wb.data();
    double out = 0.0;
    squared_distances<1, 1>(&qa, &rb, a.size(), &out);
    return out;
}

KnnResult knn_exact(const LatentSet& set, std::size_t k, const KnnOptions& options) {
    check_k(set, k);
    const std::size_t n = set.count();
    const std::size_t d = set.dims();
    std::vector<std::uint32_t> neighbors(n * k);
    std::vector<double> distances(n * k);
    // float -> double is exact; widening once keeps conversions out of the
    // O(n^2 d) loop.
    const std::vector<double> wide = widen(set.data());
    const double* base = wide.data();

    parallel_chunks(n, options.chunk_size, options.threads, [&](std::size_t, std::size_t q_begin, std::size_t q_end) {
        std::vector<BestK> heaps(q_end - q_begin, BestK(k));
        auto offer = [&](std::size_t q, std::size_t j, double d2) {
            if (q != j) {
                heaps[q - q_begin].offer(d2, static_cast<std::uint32_t>(j));
            }
        };

        for (std::size_t t_begin = 0; t_begin < n; t_begin += kTileRows) {
            const std::size_t t_end = std::min(n, t_begin + kTileRows);
            std::size_t q = q_begin;
            for (; q + kQueryBlock <= q_end; q += kQueryBlock) {
                const double* queries[kQueryBlock];
                for (std::size_t a = 0; a < kQueryBlock; ++a) {
                    queries[a] = base + (q + a) * d;
                }
                std::size_t j = t_begin;
                for (; j + kRowBlock <= t_end; j += kRowBlock) {
                    const double* rows[kRowBlock];
                    for (std::size_t r = 0; r < kRowBlock; ++r) {
                        rows[r] = base + (j + r) * d;
                    }
                    double d2[kQueryBlock * kRowBlock];
                    squared_distances<kQueryBlock, kRowBlock>(queries, rows, d, d2);
                    for (std::size_t a = 0; a < kQueryBlock; ++a) {
                        for (std::size_t r = 0; r < kRowBlock; ++r) {
                            offer(q + a, j + r, d2[a * kRowBlock + r]);
                        }
                    }
                }
                for (; j < t_end; ++j) {
                    const double* row = base + j * d;
                    double d2[kQueryBlock];
                    squared_distances<kQueryBlock, 1>(queries, &row, d, d2);
                    for (std::size_t a = 0; a < kQueryBlock; ++a) {
                        offer(q + a, j, d2[a]);
                    }
                }
            }
            for (; q < q_end; ++q) {
                const double* query = base + q * d;
                for (std::size_t j = t_begin; j < t_end; ++j) {
                    const double* row = base + j * d;
                    double d2 = 0.0;
                    squared_distances<1, 1>(&query, &row, d, &d2);
                    offer(q, j, d2);
                }
            }
        }
        for (std::size_t q = q_begin; q < q_end; ++q) {
            heaps[q - q_begin].write_sorted(neighbors.data() + q * k, distances.data() + q * k);
        }
    });

    return KnnResult(n, k, std::move(neighbors), std::move(distances));
}

KnnResult knn_oracle(const LatentSet& set, std::size_t k) {
    check_k(set, k);
    const std::size_t n = set.count();
    const std::size_t d = set.dims();
    std::vector<std::uint32_t> neighbors;
    std::vector<double> distances;
    neighbors.reserve(n * k);
    distances.reserve(n * k);

    std::vector<double> row(n);
    std::vector<std::uint32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto a = set.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            const auto b = set.row(j);
            double sum = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = static_cast<double>(a[c]) - static_cast<double>(b[c]);
                sum += diff * diff;
            }
            row[j] = sum;
        }
        std::iota(order.begin(), order.end(), 0u);
        // stable_sort keeps equal distances in ascending index order
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) { return row[x] < row[y]; });
        std::size_t taken = 0;
        for (std::uint32_t j : order) {
            if (j == i) {
                continue;
            }
            neighbors.push_back(j);
            distances.push_back(std::sqrt(row[j]));
            if (++taken == k) {
                break;
            }
        }
    }
    return KnnResult(n, k, std::move(neighbors), std::move(distances));
}

} // namespace hubprior
