#include <doctest.h>

#include <cmath>

#include "gibbsgeom/rng.hpp"
#include "gibbsgeom/stats.hpp"

using namespace gibbsgeom;

TEST_CASE("pairwise sum is order-deterministic and accurate") {
    std::vector<double> xs(1000);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 1.0 / (1.0 + static_cast<double>(i));
    const double a = stats::pairwise_sum(xs);
    const double b = stats::pairwise_sum(xs);
    CHECK(a == b);
    long double exact = 0.0;
    for (double x : xs) exact += x;
    CHECK(a == doctest::Approx(static_cast<double>(exact)).epsilon(1e-14));
}

TEST_CASE("gamma_q against known chi-square values") {
    // P[chi2_1 > 3.841] ~ 0.05, P[chi2_10 > 23.209] ~ 0.01
    CHECK(stats::chi_square_sf(3.8415, 1) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(stats::chi_square_sf(23.209, 10) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK(stats::chi_square_sf(0.0, 5) == doctest::Approx(1.0));
}

TEST_CASE("poisson pmf sums to one") {
    double total = 0.0;
    for (std::uint64_t k = 0; k < 200; ++k) total += stats::poisson_pmf(k, 25.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rng poisson matches pmf via chi-square") {
    RngStream rng = RngStream::root(5);
    std::vector<std::uint64_t> counts(4000);
    for (auto& c : counts) c = rng.poisson(25.0);
    const auto res = stats::chi_square_poisson(counts, 25.0);
    CHECK(res.p_value > 0.01);
}

TEST_CASE("chi-square flags a wrong mean") {
    RngStream rng = RngStream::root(6);
    std::vector<std::uint64_t> counts(4000);
    for (auto& c : counts) c = rng.poisson(27.5);
    const auto res = stats::chi_square_poisson(counts, 25.0);
    CHECK(res.p_value < 1e-6);
}

TEST_CASE("anderson-darling accepts normal and rejects uniform") {
    RngStream rng = RngStream::root(7);
    std::vector<double> normal(2000), uniform(2000);
    for (std::size_t i = 0; i < normal.size(); ++i) {
        // Box-Muller
        const double u1 = rng.uniform(), u2 = rng.uniform();
        normal[i] = std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * M_PI * u2);
        uniform[i] = rng.uniform();
    }
    CHECK(stats::anderson_darling_normal(normal).normal_at_1pct);
    CHECK_FALSE(stats::anderson_darling_normal(uniform).normal_at_1pct);
    CHECK(stats::kolmogorov_distance_normal(normal) < 0.03);
    CHECK(stats::kolmogorov_distance_normal(uniform) > 0.05);
}

TEST_CASE("empirical tv distance") {
    std::vector<std::uint64_t> a{0, 0, 1, 1}, b{0, 0, 1, 1};
    CHECK(stats::empirical_tv_distance(a, b) == doctest::Approx(0.0));
    std::vector<std::uint64_t> c{2, 2, 2, 2};
    CHECK(stats::empirical_tv_distance(a, c) == doctest::Approx(1.0));
}

TEST_CASE("linear fit recovers a line") {
    std::vector<double> x{1, 2, 3, 4, 5}, y;
    for (double xi : x) y.push_back(3.0 + 2.0 * xi);
    const auto fit = stats::linear_fit(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(3.0));
    CHECK(fit.r2 == doctest::Approx(1.0));
}

TEST_CASE("log survival tail fit finds an exponential rate") {
    RngStream rng = RngStream::root(9);
    std::vector<double> xs(20000);
    for (auto& x : xs) x = rng.exponential() / 3.0; // rate 3
    const auto fit = stats::log_survival_tail_fit(xs);
    CHECK(fit.ok);
    CHECK(fit.slope == doctest::Approx(-3.0).epsilon(0.15));
    CHECK(fit.r2 > 0.95);
}

TEST_CASE("rng streams are reproducible and independent of interleaving") {
    RngStream root = RngStream::root(42);
    auto a1 = root.child("alpha");
    auto b1 = root.child("beta");
    const double x1 = a1.uniform();
    const double y1 = b1.uniform();

    RngStream root2 = RngStream::root(42);
    auto b2 = root2.child("beta");
    auto a2 = root2.child("alpha");
    CHECK(a2.uniform() == x1);
    CHECK(b2.uniform() == y1);

    // distinct children differ
    auto c1 = root.child(static_cast<std::uint64_t>(1));
    auto c2 = root.child(static_cast<std::uint64_t>(2));
    CHECK(c1.next_u64() != c2.next_u64());
}
