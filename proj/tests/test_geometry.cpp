#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gibbsgeom/geometry.hpp"
#include "gibbsgeom/grid_index.hpp"
#include "gibbsgeom/rng.hpp"

using namespace gibbsgeom;

namespace {

PointConfig random_config(int dim, std::size_t n, double half, RngStream& rng) {
    PointConfig cfg;
    cfg.dim = dim;
    for (std::size_t i = 0; i < n; ++i) {
        Point p;
        for (int a = 0; a < dim; ++a) p[a] = rng.uniform(-half, half);
        cfg.points.push_back(p);
    }
    return cfg;
}

} // namespace

TEST_CASE("ball volume closed forms") {
    CHECK(ball_volume(1, 1.0) == doctest::Approx(2.0));
    CHECK(ball_volume(2, 1.0) == doctest::Approx(std::numbers::pi));
    CHECK(ball_volume(3, 2.0) == doctest::Approx(32.0 * std::numbers::pi / 3.0));
    // scaling identity
    RngStream rng = RngStream::root(7);
    for (int d = 1; d <= 3; ++d)
        for (int i = 0; i < 20; ++i) {
            const double r = rng.uniform(0.0, 5.0);
            CHECK(ball_volume(d, r) ==
                  doctest::Approx(ball_volume(d, 1.0) * std::pow(r, d)).epsilon(1e-12));
        }
}

TEST_CASE("grid index matches brute force range and knn oracles") {
    RngStream rng = RngStream::root(11);
    for (int d = 1; d <= 3; ++d) {
        const auto cfg = random_config(d, 1000, 5.0, rng);
        const auto index = GridIndex::build(cfg, 0.9);
        for (int q = 0; q < 50; ++q) {
            Point c;
            for (int a = 0; a < d; ++a) c[a] = rng.uniform(-5.0, 5.0);
            const double radius = rng.uniform(0.0, 3.0);
            auto got = index.range_query(c, radius);
            auto want = brute_force_range(cfg.points, c, radius);
            CHECK(got == want);

            const int k = 1 + static_cast<int>(rng.next_u64() % 8);
            auto gk = index.knn_query(c, k);
            auto wk = brute_force_knn(cfg.points, c, k);
            CHECK(gk == wk);
        }
    }
}

TEST_CASE("grid index edge cases") {
    PointConfig cfg;
    cfg.dim = 2;
    CHECK(GridIndex::build(cfg, 1.0).size() == 0);

    cfg.points = {make_point(0.1, 0.1), make_point(0.2, 0.2), make_point(0.15, 0.12)};
    const auto index = GridIndex::build(cfg, 1.0);
    CHECK(index.range_query(make_point(0.0, 0.0), 10.0).size() == 3);
    CHECK(index.range_query(cfg.points[0], 0.0) == std::vector<int>{0});
    CHECK_THROWS_AS(index.knn_query(make_point(0, 0), 4), InsufficientPointsError);

    PointConfig bad;
    bad.dim = 2;
    bad.points = {make_point(std::numeric_limits<double>::quiet_NaN(), 0.0)};
    CHECK_THROWS_AS(GridIndex::build(bad, 1.0), ValidationError);
}

TEST_CASE("1d knn examples") {
    PointConfig cfg;
    cfg.dim = 1;
    cfg.points = {make_point(0), make_point(1), make_point(3)};
    const auto index = GridIndex::build(cfg, 1.0);
    CHECK(index.knn_query(cfg.points[0], 1, 0) == std::vector<int>{1});
    CHECK(index.knn_query(cfg.points[2], 2, 2) == std::vector<int>{1, 0});
}

TEST_CASE("voronoi cell of the cross configuration is the unit square") {
    PointConfig cfg;
    cfg.dim = 2;
    cfg.points = {make_point(0, 0), make_point(1, 0), make_point(-1, 0), make_point(0, 1),
                  make_point(0, -1)};
    const auto cell = voronoi_cell_2d(cfg, 0);
    CHECK(cell.bounded);
    CHECK(cell.clipped_area() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cell.finite_edge_length() == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("voronoi single site is unbounded with no finite edges") {
    PointConfig cfg;
    cfg.dim = 2;
    cfg.points = {make_point(0.3, -0.2)};
    const auto cell = voronoi_cell_2d(cfg, 0);
    CHECK_FALSE(cell.bounded);
    CHECK(cell.finite_edge_length() == doctest::Approx(0.0));
}

TEST_CASE("voronoi duplicate sites are rejected") {
    PointConfig cfg;
    cfg.dim = 2;
    cfg.points = {make_point(0, 0), make_point(0, 0)};
    CHECK_THROWS_AS(voronoi_cell_2d(cfg, 0), DegenerateSiteError);
}

TEST_CASE("voronoi cells clipped to the window tile it") {
    RngStream rng = RngStream::root(23);
    Window window;
    window.dim = 2;
    window.half_width = 1.0;
    const auto cfg = random_config(2, 20, 1.0, rng);
    const auto index = GridIndex::build(cfg, 0.4);
    double total = 0.0;
    for (std::size_t i = 0; i < cfg.size(); ++i)
        total += voronoi_cell_2d(cfg, static_cast<int>(i), &index, &window).clipped_area();
    CHECK(total == doctest::Approx(window.volume()).epsilon(1e-9));
}

TEST_CASE("voronoi with grid streaming equals brute force") {
    RngStream rng = RngStream::root(31);
    const auto cfg = random_config(2, 200, 3.0, rng);
    const auto index = GridIndex::build(cfg, 0.5);
    Window window;
    window.dim = 2;
    window.half_width = 3.0;
    for (std::size_t i = 0; i < cfg.size(); i += 17) {
        const auto a = voronoi_cell_2d(cfg, static_cast<int>(i), &index, &window);
        const auto b = voronoi_cell_2d(cfg, static_cast<int>(i), nullptr, &window);
        CHECK(a.clipped_area() == doctest::Approx(b.clipped_area()).epsilon(1e-10));
    }
}

TEST_CASE("disk free area against quasi Monte Carlo oracle") {
    RngStream rng = RngStream::root(41);
    for (int trial = 0; trial < 24; ++trial) {
        const double base = rng.uniform(0.4, 1.6);
        const double cover = rng.uniform(0.3, 1.2);
        const Vec2 c{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        std::vector<Vec2> covers;
        const int n = static_cast<int>(rng.next_u64() % 6);
        for (int i = 0; i < n; ++i)
            covers.push_back({c.x + rng.uniform(-2, 2), c.y + rng.uniform(-2, 2)});
        const double exact = disk_free_area(c, base, covers, cover);

        // dense-grid oracle
        const int g = 600;
        long inside = 0, free_cnt = 0;
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) {
                const double x = c.x + base * (2.0 * (i + 0.5) / g - 1.0);
                const double y = c.y + base * (2.0 * (j + 0.5) / g - 1.0);
                const double dx = x - c.x, dy = y - c.y;
                if (dx * dx + dy * dy > base * base) continue;
                ++inside;
                bool covered = false;
                for (const auto& q : covers) {
                    const double qx = x - q.x, qy = y - q.y;
                    if (qx * qx + qy * qy <= cover * cover) {
                        covered = true;
                        break;
                    }
                }
                if (!covered) ++free_cnt;
            }
        const double approx = std::numbers::pi * base * base * static_cast<double>(free_cnt) /
                              std::max(1L, inside);
        CHECK(exact == doctest::Approx(approx).epsilon(0.02));
    }
}

TEST_CASE("disk free area spec cases") {
    // no overlap
    CHECK(disk_free_area({0, 0}, 1.0, {}, 1.0) == doctest::Approx(std::numbers::pi));
    // coincident cover of the same radius swallows the base disk
    CHECK(disk_free_area({0, 0}, 1.0, {{0, 0}}, 1.0) == doctest::Approx(0.0));
    // tangent at center distance 2r: no overlap
    CHECK(disk_free_area({0, 0}, 1.0, {{2.0, 0.0}}, 1.0) == doctest::Approx(std::numbers::pi));
}

TEST_CASE("interval free length") {
    CHECK(interval_free_length(0.0, 1.0, {}, 0.5) == doctest::Approx(2.0));
    CHECK(interval_free_length(0.0, 1.0, {0.0}, 1.0) == doctest::Approx(0.0));
    CHECK(interval_free_length(0.0, 1.0, {1.0}, 0.5) == doctest::Approx(1.5));
    CHECK(interval_free_length(0.0, 1.0, {-0.75, 0.75}, 0.25) == doctest::Approx(1.0));
}

TEST_CASE("3d free volume sanity") {
    const double full = ball_free_volume_3d(Point{}, 1.0, {}, 0.5);
    CHECK(full == doctest::Approx(ball_volume(3, 1.0)).epsilon(0.02));
    const double none = ball_free_volume_3d(Point{}, 0.5, {Point{}}, 1.0);
    CHECK(none == doctest::Approx(0.0));
}
