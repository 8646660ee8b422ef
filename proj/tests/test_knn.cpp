#include "hubprior/error.hpp"
#include "hubprior/knn.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace hubprior;

namespace {

std::vector<std::uint32_t> row_of(const KnnResult& r, std::size_t i) {
    const auto s = r.neighbors(i);
    return {s.begin(), s.end()};
}

void check_same(const KnnResult& a, const KnnResult& b) {
    REQUIRE(a.n() == b.n());
    REQUIRE(a.k() == b.k());
    for (std::size_t i = 0; i < a.n(); ++i) {
        CHECK(row_of(a, i) == row_of(b, i));
        for (std::size_t j = 0; j < a.k(); ++j) {
            CHECK(testing::close_rel(a.distances(i)[j], b.distances(i)[j], 1e-5, 1e-12));
        }
    }
}

} // namespace

TEST_CASE("1-D nearest neighbors by inspection") {
    const LatentSet set = testing::rows_to_set({{0.0f}, {1.0f}, {10.0f}});
    for (const KnnResult& r : {knn_exact(set, 1), knn_oracle(set, 1)}) {
        CHECK(row_of(r, 0) == std::vector<std::uint32_t>{1});
        CHECK(row_of(r, 1) == std::vector<std::uint32_t>{0});
        CHECK(row_of(r, 2) == std::vector<std::uint32_t>{1});
        CHECK(r.distances(2)[0] == doctest::Approx(9.0));
    }
}

TEST_CASE("equal distances go to the lower index") {
    const LatentSet set = testing::rows_to_set({{0.0f}, {1.0f}, {2.0f}});
    for (const KnnResult& r : {knn_exact(set, 2), knn_oracle(set, 2)}) {
        CHECK(row_of(r, 1) == std::vector<std::uint32_t>{0, 2});
    }
}

TEST_CASE("a pair is mutually nearest") {
    const LatentSet set = testing::rows_to_set({{0.0f, 1.0f}, {3.0f, -1.0f}});
    const KnnResult r = knn_oracle(set, 1);
    CHECK(row_of(r, 0) == std::vector<std::uint32_t>{1});
    CHECK(row_of(r, 1) == std::vector<std::uint32_t>{0});
    check_same(r, knn_exact(set, 1));
}

TEST_CASE("duplicated points are neighbors at distance zero") {
    const LatentSet set = testing::rows_to_set({{0.5f, 0.5f}, {0.5f, 0.5f}, {3.0f, 3.0f}});
    for (const KnnResult& r : {knn_exact(set, 1), knn_oracle(set, 1)}) {
        CHECK(row_of(r, 0) == std::vector<std::uint32_t>{1});
        CHECK(row_of(r, 1) == std::vector<std::uint32_t>{0});
        CHECK(r.distances(0)[0] == 0.0);
        CHECK(r.distances(1)[0] == 0.0);
    }
}

TEST_CASE("k outside [1, n) is rejected") {
    const LatentSet set = testing::rows_to_set({{0.0f}, {1.0f}, {2.0f}});
    for (std::size_t k : {std::size_t{0}, std::size_t{3}, std::size_t{7}}) {
        try {
            knn_exact(set, k);
            FAIL("expected KTooLarge");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::KTooLarge);
        }
        CHECK_THROWS_AS(knn_oracle(set, k), Error);
    }
}

TEST_CASE("kernel equals oracle on random sets") {
    SUBCASE("n=200 d=16 k=7") { check_same(knn_exact(testing::random_set(200, 16, 1), 7), knn_oracle(testing::random_set(200, 16, 1), 7)); }
    SUBCASE("n=50 d=8 k=3") { check_same(knn_exact(testing::random_set(50, 8, 2), 3), knn_oracle(testing::random_set(50, 8, 2), 3)); }
    SUBCASE("odd dims exercise the lane tail") {
        const LatentSet set = testing::random_set(97, 13, 3);
        check_same(knn_exact(set, 5), knn_oracle(set, 5));
    }
    SUBCASE("quantized data forces exact ties") {
        std::mt19937_64 rng(4);
        std::uniform_int_distribution<int> pick(0, 2);
        std::vector<float> data(150 * 3);
        for (auto& v : data) {
            v = static_cast<float>(pick(rng));
        }
        const LatentSet set(3, std::move(data));
        check_same(knn_exact(set, 6), knn_oracle(set, 6));
    }
}

TEST_CASE("chunk size and thread count do not change the result") {
    const LatentSet set = testing::random_set(301, 24, 9);
    const KnnResult ref = knn_exact(set, 4, {256, 1});
    for (std::size_t chunk : {1, 7, 64, 1000}) {
        for (std::size_t threads : {1, 3}) {
            const KnnResult r = knn_exact(set, 4, {chunk, threads});
            CHECK(std::equal(r.all_neighbors().begin(), r.all_neighbors().end(), ref.all_neighbors().begin()));
            CHECK(std::equal(r.all_distances().begin(), r.all_distances().end(), ref.all_distances().begin()));
        }
    }
}

TEST_CASE("result invariants: self excluded, sorted, distinct, symmetric distances") {
    const LatentSet set = testing::random_set(120, 32, 11);
    const KnnResult r = knn_exact(set, 6);
    for (std::size_t i = 0; i < r.n(); ++i) {
        auto nb = row_of(r, i);
        CHECK(std::find(nb.begin(), nb.end(), i) == nb.end());
        CHECK(std::is_sorted(r.distances(i).begin(), r.distances(i).end()));
        std::sort(nb.begin(), nb.end());
        CHECK(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
        for (std::size_t a = 0; a < r.k(); ++a) {
            const std::uint32_t j = r.neighbors(i)[a];
            const auto back = r.neighbors(j);
            const auto it = std::find(back.begin(), back.end(), i);
            if (it != back.end()) {
                CHECK(testing::close_rel(r.distances(j)[it - back.begin()], r.distances(i)[a], 1e-6));
            }
        }
    }
}

TEST_CASE("permuting the input permutes the neighbor indices") {
    const LatentSet set = testing::random_set(150, 20, 21);
    std::vector<std::size_t> perm(set.count());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), std::mt19937_64(5));
    const LatentSet shuffled = set.subset(perm);

    std::vector<std::uint32_t> new_of_old(set.count());
    for (std::size_t p = 0; p < perm.size(); ++p) {
        new_of_old[perm[p]] = static_cast<std::uint32_t>(p);
    }
    const KnnResult a = knn_exact(set, 5);
    const KnnResult b = knn_exact(shuffled, 5);
    for (std::size_t p = 0; p < perm.size(); ++p) {
        const auto original = a.neighbors(perm[p]);
        const auto moved = b.neighbors(p);
        for (std::size_t j = 0; j < 5; ++j) {
            CHECK(moved[j] == new_of_old[original[j]]);
        }
    }
}

TEST_CASE("truncated keeps the k nearest columns") {
    const LatentSet set = testing::random_set(80, 10, 31);
    const KnnResult wide = knn_exact(set, 8);
    const KnnResult narrow = knn_exact(set, 3);
    check_same(wide.truncated(3), narrow);
    CHECK_THROWS_AS(wide.truncated(9), Error);
}

TEST_CASE("squared_distance") {
    const std::vector<float> a = {1.0f, 2.0f, 3.0f};
    const std::vector<float> b = {4.0f, 6.0f, 3.0f};
    CHECK(squared_distance(a, b) == 25.0);
    const std::vector<float> c = {1.0f};
    CHECK_THROWS_AS(squared_distance(a, c), Error);
}
