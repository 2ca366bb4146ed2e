#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gibbsgeom {

class RngStream;

namespace stats {

// Deterministic pairwise summation: result depends only on element order, so
// parallel producers writing into fixed slots reduce identically at any thread count.
double pairwise_sum(std::span<const double> xs);

double mean(std::span<const double> xs);
double variance(std::span<const double> xs); // unbiased, n-1
struct Moments {
    double mean = 0.0, variance = 0.0, skewness = 0.0, excess_kurtosis = 0.0;
};
Moments moments(std::span<const double> xs);

double normal_cdf(double x);

// Regularized incomplete gamma Q(a, x) = Gamma(a, x)/Gamma(a).
double gamma_q(double a, double x);

double chi_square_sf(double stat, int dof);

double poisson_log_pmf(std::uint64_t k, double mean);
double poisson_pmf(std::uint64_t k, double mean);

// Chi-square goodness of fit of observed counts against Poisson(mean); bins with
// expected count below `min_expected` are pooled into the tails.
struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};
ChiSquareResult chi_square_poisson(std::span<const std::uint64_t> observed_counts, double mean,
                                   double min_expected = 5.0);

// Anderson-Darling normality statistic on standardized data (case with estimated
// mean and variance); `corrected` applies the small-sample adjustment and the
// 1% critical value is 1.035.
struct ADResult {
    double a2 = 0.0;
    double a2_corrected = 0.0;
    bool normal_at_1pct = false;
};
ADResult anderson_darling_normal(std::vector<double> xs);

// Kolmogorov distance of standardized data to N(0,1).
double kolmogorov_distance_normal(std::vector<double> xs);
double bootstrap_ks_se(std::span<const double> xs, int n_boot, RngStream& rng);

// Total variation distance between empirical pmfs of two count samples.
double empirical_tv_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

// Weighted least squares y ~ a + b x.
struct LinearFit {
    double intercept = 0.0, slope = 0.0;
    double slope_se = 0.0;
    double r2 = 0.0;
    int n = 0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y,
                     std::span<const double> w = {});

// Empirical survival-function points over the upper half of the support, with
// log-survival and at-risk weights, ready for a tail-slope fit.
struct TailFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int n_points = 0;
    bool ok = false;
};
TailFit log_survival_tail_fit(std::vector<double> values);

} // namespace stats
} // namespace gibbsgeom
