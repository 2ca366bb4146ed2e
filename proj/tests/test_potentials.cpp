#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "gibbsgeom/potentials.hpp"
#include "gibbsgeom/rng.hpp"

using namespace gibbsgeom;

namespace {

std::vector<Point> random_points(int dim, std::size_t n, double half, RngStream& rng) {
    std::vector<Point> pts(n);
    for (auto& p : pts)
        for (int a = 0; a < dim; ++a) p[a] = rng.uniform(-half, half);
    return pts;
}

// Hard-core feasible set (the potentials assume internally feasible input).
std::vector<Point> separated_points(int dim, std::size_t n, double half, double min_dist,
                                    RngStream& rng) {
    std::vector<Point> pts;
    for (int attempt = 0; attempt < 4000 && pts.size() < n; ++attempt) {
        Point p;
        for (int a = 0; a < dim; ++a) p[a] = rng.uniform(-half, half);
        bool ok = true;
        for (const auto& q : pts)
            if (distance(p, q) <= min_dist) ok = false;
        if (ok) pts.push_back(p);
    }
    return pts;
}

std::vector<Point> in_ball(const std::vector<Point>& pts, const Point& x, double r) {
    std::vector<Point> out;
    for (const auto& p : pts)
        if (distance(p, x) <= r) out.push_back(p);
    return out;
}

struct Model {
    std::unique_ptr<Potential> pot;
    bool needs_separation = false;
    double separation = 0.0;
};

std::vector<Model> models(int dim) {
    std::vector<Model> ms;
    ms.push_back({std::make_unique<NullPotential>(dim), false, 0.0});
    ms.push_back({std::make_unique<StraussPotential>(dim, 0.7, 0.6), false, 0.0});
    ms.push_back({std::make_unique<HardcorePotential>(dim, 0.25), true, 0.5});
    ms.push_back({std::make_unique<AreaInteractionPotential>(dim, 0.8, 0.4), false, 0.0});
    ms.push_back({std::make_unique<PairPotential>(dim, 1.0, 2.5, 0.3), true, 0.3});
    ms.push_back({std::make_unique<TruncatedPoissonPotential>(dim, 0.5, 2), false, 0.0});
    return ms;
}

} // namespace

TEST_CASE("strauss examples") {
    StraussPotential pot(2, 0.5, 1.0);
    std::vector<Point> close{make_point(0.3, 0), make_point(-0.4, 0.2), make_point(3, 3)};
    CHECK(pot.add_one(make_point(0, 0), close) == doctest::Approx(1.0));
    CHECK(pot.add_one(make_point(0, 0), {}) == doctest::Approx(0.0));
}

TEST_CASE("hardcore examples") {
    HardcorePotential pot(2, 1.0); // exclusion 2
    CHECK(std::isinf(pot.add_one(make_point(0, 0), {make_point(1.5, 0)})));
    CHECK(pot.add_one(make_point(0, 0), {make_point(2.5, 0)}) == doctest::Approx(0.0));
    CHECK(pot.add_one(make_point(0, 0), {}) == doctest::Approx(0.0));
}

TEST_CASE("area interaction examples") {
    AreaInteractionPotential pot(2, 1.5, 0.5);
    CHECK(pot.add_one(make_point(0, 0), {}) ==
          doctest::Approx(1.5 * std::numbers::pi * 0.25).epsilon(1e-12));
    CHECK(pot.add_one(make_point(0, 0), {make_point(0, 0)}) == doctest::Approx(0.0));
    CHECK(pot.add_one(make_point(0, 0), {make_point(1.0, 0)}) ==
          doctest::Approx(1.5 * std::numbers::pi * 0.25).epsilon(1e-12));
    CHECK_THROWS_AS(AreaInteractionPotential(2, -0.5, 0.5), ValidationError);
}

TEST_CASE("pair potential examples") {
    PairPotential pot(2, 1.0, 2.0, 0.5);
    CHECK(pot.add_one(make_point(0, 0), {}) == doctest::Approx(0.0));
    CHECK(std::isinf(pot.add_one(make_point(0, 0), {make_point(0.3, 0)})));
    CHECK(pot.add_one(make_point(0, 0), {make_point(1.0, 0)}) ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    // tail bound is positive, finite past the hard core, and non-increasing
    CHECK(pot.tail_bound(1.0) > 0.0);
    CHECK(std::isfinite(pot.tail_bound(1.0)));
    CHECK(pot.tail_bound(2.0) < pot.tail_bound(1.0));
    CHECK(pot.reported_c1() > 0.0);
}

TEST_CASE("truncated poisson examples") {
    TruncatedPoissonPotential pot(2, 0.5, 1); // no ball of radius 0.5 may hold 2 points
    CHECK(pot.add_one(make_point(0, 0), {}) == doctest::Approx(0.0));
    CHECK(std::isinf(pot.add_one(make_point(0, 0), {make_point(0.9, 0)}))); // distance <= 2r
    CHECK(pot.add_one(make_point(0, 0), {make_point(1.1, 0)}) == doctest::Approx(0.0));
}

TEST_CASE("truncated poisson agrees with exhaustive subset oracle") {
    RngStream rng = RngStream::root(77);
    for (int dim = 1; dim <= 3; ++dim) {
        for (int k = 1; k <= 3; ++k) {
            TruncatedPoissonPotential pot(dim, 0.5, k);
            for (int trial = 0; trial < 120; ++trial) {
                const auto pts = random_points(dim, 3 + rng.next_u64() % 6, 1.0, rng);
                Point x;
                for (int a = 0; a < dim; ++a) x[a] = rng.uniform(-1.0, 1.0);

                // oracle: enumerate every k-subset of the full set, no ball restriction
                bool want = false;
                const std::size_t n = pts.size();
                if (n >= static_cast<std::size_t>(k)) {
                    std::vector<int> pick(static_cast<std::size_t>(k));
                    auto rec = [&](auto&& self, std::size_t start, int depth) -> void {
                        if (want) return;
                        if (depth == k) {
                            std::vector<Point> sub{x};
                            for (int i = 0; i < k; ++i)
                                sub.push_back(pts[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])]);
                            if (min_enclosing_ball(sub, dim).radius <= 0.5 * (1.0 + 1e-12)) want = true;
                            return;
                        }
                        for (std::size_t i = start; i < n; ++i) {
                            pick[static_cast<std::size_t>(depth)] = static_cast<int>(i);
                            self(self, i + 1, depth + 1);
                        }
                    };
                    rec(rec, 0, 0);
                }
                CHECK(pot.violates(x, pts) == want);
            }
        }
    }
}

TEST_CASE("min enclosing ball known cases") {
    // two points: diameter ball
    {
        std::vector<Point> pts{make_point(0, 0), make_point(2, 0)};
        const auto b = min_enclosing_ball(pts, 2);
        CHECK(b.radius == doctest::Approx(1.0));
        CHECK(b.center[0] == doctest::Approx(1.0));
    }
    // equilateral triangle: circumradius s/sqrt(3)
    {
        std::vector<Point> pts{make_point(0, 0), make_point(1, 0), make_point(0.5, std::sqrt(3) / 2)};
        CHECK(min_enclosing_ball(pts, 2).radius == doctest::Approx(1.0 / std::sqrt(3.0)));
    }
    // obtuse triangle: longest edge decides
    {
        std::vector<Point> pts{make_point(0, 0), make_point(4, 0), make_point(1, 0.2)};
        CHECK(min_enclosing_ball(pts, 2).radius == doctest::Approx(2.0).epsilon(1e-9));
    }
    // regular tetrahedron, edge sqrt(2): circumradius sqrt(3)/2*... = sqrt(3/8)*edge
    {
        std::vector<Point> pts{make_point(1, 1, 1), make_point(1, -1, -1), make_point(-1, 1, -1),
                               make_point(-1, -1, 1)};
        CHECK(min_enclosing_ball(pts, 3).radius == doctest::Approx(std::sqrt(3.0)));
    }
}

TEST_CASE("pair_add_one identities") {
    RngStream rng = RngStream::root(101);
    for (auto& m : models(2)) {
        for (int trial = 0; trial < 50; ++trial) {
            auto pts = m.needs_separation ? separated_points(2, 8, 2.0, m.separation * 1.01, rng)
                                          : random_points(2, 8, 2.0, rng);
            Point x = make_point(rng.uniform(-2, 2), rng.uniform(-2, 2));
            Point y = make_point(rng.uniform(-2, 2), rng.uniform(-2, 2));
            if (x == y) continue;
            const double lhs = pair_add_one(*m.pot, x, y, pts);
            const double rhs = pair_add_one(*m.pot, y, x, pts);
            if (std::isinf(lhs) || std::isinf(rhs)) {
                CHECK(std::isinf(lhs));
                CHECK(std::isinf(rhs));
            } else {
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
            }
        }
    }
    // spec cases
    NullPotential zero(2);
    CHECK(pair_add_one(zero, make_point(0, 0), make_point(1, 1), {}) == doctest::Approx(0.0));
    HardcorePotential hc(2, 1.0);
    CHECK(std::isinf(pair_add_one(hc, make_point(0, 0), make_point(1, 0), {})));
    StraussPotential st(2, 0.5, 1.0);
    CHECK(pair_add_one(st, make_point(0, 0), make_point(0.5, 0), {}) == doctest::Approx(0.5));
}

TEST_CASE("sandwich and envelope properties on randomized triples") {
    RngStream rng = RngStream::root(202);
    for (int dim = 1; dim <= 3; ++dim) {
        for (auto& m : models(dim)) {
            const int trials = dim == 3 ? 200 : 400;
            for (int t = 0; t < trials; ++t) {
                auto pts = m.needs_separation
                               ? separated_points(dim, 10, 2.0, m.separation * 1.01, rng)
                               : random_points(dim, 10, 2.0, rng);
                Point x;
                for (int a = 0; a < dim; ++a) x[a] = rng.uniform(-2, 2);
                const double r = rng.uniform(0.0, 3.0);
                const auto local = in_ball(pts, x, r);

                const double delta = m.pot->add_one(x, pts);
                const double lo = m.pot->add_one_lower(x, local, r);
                const double up = m.pot->add_one_upper(x, local, r);

                CHECK(lo >= -1e-12);
                CHECK(lo <= delta + 1e-9 * (1.0 + std::abs(delta)));
                if (!std::isinf(up)) CHECK(delta <= up + 1e-9 * (1.0 + std::abs(up)));

                // envelope gap bounded by psi
                const double gap = std::exp(-lo) - std::exp(-up);
                CHECK(gap >= -1e-12);
                CHECK(gap <= m.pot->psi(r) + 1e-9);

                // monotone envelopes on nested balls
                const double r2 = r * rng.uniform(1.0, 2.0) + 0.01;
                const auto local2 = in_ball(pts, x, r2);
                CHECK(std::exp(-m.pot->add_one_upper(x, local2, r2)) >=
                      std::exp(-up) - 1e-9);
                CHECK(std::exp(-m.pot->add_one_lower(x, local2, r2)) <=
                      std::exp(-lo) + 1e-9);
            }
        }
    }
}

TEST_CASE("psi is non-increasing with exponential envelope past the interaction scale") {
    for (int dim = 1; dim <= 3; ++dim) {
        for (auto& m : models(dim)) {
            const double c1 = m.pot->reported_c1();
            CHECK(c1 > 0.0);
            const double scale = m.pot->interaction_scale();
            double prev = 1.0;
            for (int i = 0; i <= 200; ++i) {
                const double r = 0.02 * i * std::max(scale, 0.5);
                const double p = m.pot->psi(r);
                CHECK(p >= 0.0);
                CHECK(p <= 1.0 + 1e-12);
                CHECK(p <= prev + 1e-12);
                prev = p;
                if (r >= scale && r <= 40.0 * std::max(scale, 0.5))
                    CHECK(p <= std::exp(-c1 * r) + 1e-12);
            }
        }
    }
}

TEST_CASE("hereditarity and empty-configuration finiteness") {
    RngStream rng = RngStream::root(303);
    for (auto& m : models(2)) {
        CHECK(std::isfinite(m.pot->add_one(Point{}, {})));
        for (int t = 0; t < 200; ++t) {
            auto pts = random_points(2, 6, 1.5, rng);
            Point x = make_point(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
            if (!std::isinf(m.pot->add_one(x, pts))) continue;
            // supersets keep the exclusion
            auto superset = pts;
            superset.push_back(make_point(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)));
            CHECK(std::isinf(m.pot->add_one(x, superset)));
        }
    }
}

TEST_CASE("translation invariance") {
    RngStream rng = RngStream::root(404);
    for (int dim = 1; dim <= 3; ++dim) {
        for (auto& m : models(dim)) {
            for (int t = 0; t < 60; ++t) {
                auto pts = m.needs_separation
                               ? separated_points(dim, 8, 1.5, m.separation * 1.01, rng)
                               : random_points(dim, 8, 1.5, rng);
                Point x, z;
                for (int a = 0; a < dim; ++a) {
                    x[a] = rng.uniform(-1.5, 1.5);
                    z[a] = rng.uniform(-3, 3);
                }
                auto shifted = pts;
                for (auto& p : shifted) p = p + z;
                const double d0 = m.pot->add_one(x, pts);
                const double d1 = m.pot->add_one(x + z, shifted);
                if (std::isinf(d0) || std::isinf(d1)) {
                    CHECK(std::isinf(d0));
                    CHECK(std::isinf(d1));
                } else {
                    CHECK(d0 == doctest::Approx(d1).epsilon(1e-7));
                }
            }
        }
    }
}

TEST_CASE("dependency radius matches the localization law") {
    // finite range: the quantile is the interaction scale for every u > 0
    StraussPotential st(2, 1.0, 0.8);
    CHECK(st.dependency_radius(0.5) == doctest::Approx(0.8));
    CHECK(st.dependency_radius(0.999) == doctest::Approx(0.8));
    NullPotential nil(2);
    CHECK(nil.dependency_radius(0.7) == doctest::Approx(0.0));
    // pair potential: smallest shell with tail bound below -log(u)
    PairPotential pp(2, 1.0, 2.0, 0.5);
    RngStream rng = RngStream::root(55);
    for (int t = 0; t < 200; ++t) {
        const double u = rng.uniform();
        const double eta = pp.dependency_radius(u);
        CHECK(pp.psi(eta) <= 1.0 - u + 1e-12);
        if (eta > 0.5) CHECK(pp.psi(eta - 0.5) >= 1.0 - u - 1e-12);
    }
}
