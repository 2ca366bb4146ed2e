#include "gibbsgeom/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>

#include "gibbsgeom/errors.hpp"
#include "gibbsgeom/rng.hpp"

namespace gibbsgeom::stats {

double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    return pairwise_sum(xs) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    const double m = mean(xs);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = (xs[i] - m) * (xs[i] - m);
    return pairwise_sum(sq) / static_cast<double>(n - 1);
}

Moments moments(std::span<const double> xs) {
    Moments mo;
    const std::size_t n = xs.size();
    if (n == 0) return mo;
    mo.mean = mean(xs);
    if (n < 2) return mo;
    std::vector<double> c2(n), c3(n), c4(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = xs[i] - mo.mean;
        c2[i] = d * d;
        c3[i] = d * d * d;
        c4[i] = d * d * d * d;
    }
    const double m2 = pairwise_sum(c2) / static_cast<double>(n);
    const double m3 = pairwise_sum(c3) / static_cast<double>(n);
    const double m4 = pairwise_sum(c4) / static_cast<double>(n);
    mo.variance = m2 * static_cast<double>(n) / static_cast<double>(n - 1);
    if (m2 > 0.0) {
        mo.skewness = m3 / std::pow(m2, 1.5);
        mo.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return mo;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

double gamma_p_series(double a, double x) {
    double term = 1.0 / a, sum = term;
    for (int k = 1; k < 10000; ++k) {
        term *= x / (a + k);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    // Lentz's continued fraction for Q(a, x), valid for x > a + 1.
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw ValidationError("gamma_q: invalid arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_contfrac(a, x);
}

double chi_square_sf(double stat, int dof) {
    if (dof <= 0) return 1.0;
    return gamma_q(0.5 * dof, 0.5 * stat);
}

double poisson_log_pmf(std::uint64_t k, double mean_) {
    return -mean_ + static_cast<double>(k) * std::log(mean_) - std::lgamma(static_cast<double>(k) + 1.0);
}

double poisson_pmf(std::uint64_t k, double mean_) { return std::exp(poisson_log_pmf(k, mean_)); }

ChiSquareResult chi_square_poisson(std::span<const std::uint64_t> observed_counts, double mean_,
                                   double min_expected) {
    ChiSquareResult res;
    const std::size_t n = observed_counts.size();
    if (n == 0) return res;

    std::uint64_t max_k = 0;
    for (auto k : observed_counts) max_k = std::max(max_k, k);

    // Bin by count value; pool low-expectation bins from both tails.
    std::vector<double> expected(max_k + 2, 0.0);
    std::vector<double> observed(max_k + 2, 0.0);
    for (std::uint64_t k = 0; k <= max_k; ++k)
        expected[k] = static_cast<double>(n) * poisson_pmf(k, mean_);
    // Upper overflow bin holds the remaining tail mass.
    double tail = static_cast<double>(n);
    for (std::uint64_t k = 0; k <= max_k; ++k) tail -= expected[k];
    expected[max_k + 1] = std::max(tail, 0.0);
    for (auto k : observed_counts) observed[k] += 1.0;

    std::vector<std::pair<double, double>> bins; // (obs, exp)
    double acc_o = 0.0, acc_e = 0.0;
    for (std::size_t k = 0; k < expected.size(); ++k) {
        acc_o += observed[k];
        acc_e += expected[k];
        if (acc_e >= min_expected) {
            bins.emplace_back(acc_o, acc_e);
            acc_o = acc_e = 0.0;
        }
    }
    if (acc_e > 0.0 || acc_o > 0.0) {
        if (!bins.empty()) {
            bins.back().first += acc_o;
            bins.back().second += acc_e;
        } else {
            bins.emplace_back(acc_o, acc_e);
        }
    }

    if (bins.size() < 2) {
        res.dof = 0;
        res.p_value = 1.0;
        return res;
    }
    double stat = 0.0;
    for (auto& [o, e] : bins)
        if (e > 0.0) stat += (o - e) * (o - e) / e;
    res.statistic = stat;
    res.dof = static_cast<int>(bins.size()) - 1;
    res.p_value = chi_square_sf(stat, res.dof);
    return res;
}

ADResult anderson_darling_normal(std::vector<double> xs) {
    ADResult res;
    const std::size_t n = xs.size();
    if (n < 8) return res;
    const double m = mean(xs);
    const double sd = std::sqrt(variance(xs));
    if (!(sd > 0.0)) return res;
    std::sort(xs.begin(), xs.end());
    double a2 = -static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double zi = normal_cdf((xs[i] - m) / sd);
        const double zn = normal_cdf((xs[n - 1 - i] - m) / sd);
        const double li = std::log(std::max(zi, 1e-300));
        const double ln1 = std::log(std::max(1.0 - zn, 1e-300));
        a2 -= (2.0 * static_cast<double>(i + 1) - 1.0) / static_cast<double>(n) * (li + ln1);
    }
    res.a2 = a2;
    const double nn = static_cast<double>(n);
    res.a2_corrected = a2 * (1.0 + 0.75 / nn + 2.25 / (nn * nn));
    res.normal_at_1pct = res.a2_corrected < 1.035;
    return res;
}

double kolmogorov_distance_normal(std::vector<double> xs) {
    const std::size_t n = xs.size();
    if (n == 0) return 0.0;
    const double m = mean(xs);
    const double sd = std::sqrt(variance(xs));
    if (!(sd > 0.0)) return 1.0;
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = normal_cdf((xs[i] - m) / sd);
        d = std::max(d, std::abs(z - static_cast<double>(i) / static_cast<double>(n)));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / static_cast<double>(n) - z));
    }
    return d;
}

double bootstrap_ks_se(std::span<const double> xs, int n_boot, RngStream& rng) {
    const std::size_t n = xs.size();
    if (n < 2 || n_boot < 2) return 0.0;
    std::vector<double> stats(static_cast<std::size_t>(n_boot));
    std::vector<double> sample(n);
    for (int b = 0; b < n_boot; ++b) {
        for (std::size_t i = 0; i < n; ++i)
            sample[i] = xs[static_cast<std::size_t>(rng.next_u64() % n)];
        stats[static_cast<std::size_t>(b)] = kolmogorov_distance_normal(sample);
    }
    return std::sqrt(variance(stats));
}

double empirical_tv_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    std::map<std::uint64_t, double> pa, pb;
    for (auto k : a) pa[k] += 1.0 / static_cast<double>(a.size());
    for (auto k : b) pb[k] += 1.0 / static_cast<double>(b.size());
    double tv = 0.0;
    auto ia = pa.begin();
    auto ib = pb.begin();
    while (ia != pa.end() || ib != pb.end()) {
        if (ib == pb.end() || (ia != pa.end() && ia->first < ib->first)) {
            tv += ia->second;
            ++ia;
        } else if (ia == pa.end() || ib->first < ia->first) {
            tv += ib->second;
            ++ib;
        } else {
            tv += std::abs(ia->second - ib->second);
            ++ia;
            ++ib;
        }
    }
    return 0.5 * tv;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
    LinearFit fit;
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) return fit;
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        sw += wi;
        sx += wi * x[i];
        sy += wi * y[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        sxx += wi * (x[i] - mx) * (x[i] - mx);
        sxy += wi * (x[i] - mx) * (y[i] - my);
        syy += wi * (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) return fit;
    fit.n = static_cast<int>(n);
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        ss_res += wi * r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    if (n > 2) fit.slope_se = std::sqrt(ss_res / static_cast<double>(n - 2) / sxx);
    return fit;
}

TailFit log_survival_tail_fit(std::vector<double> values) {
    TailFit out;
    const std::size_t n = values.size();
    if (n < 20) return out;
    std::sort(values.begin(), values.end());
    const double median = values[n / 2];
    const double vmax = values.back();
    if (!(vmax > median)) return out;

    // Survival evaluated on a grid over (median, vmax); weights are the counts
    // still at risk, so the sparse far tail doesn't dominate the fit.
    const int grid = 24;
    std::vector<double> xs, ys, ws;
    for (int g = 0; g < grid; ++g) {
        const double r = median + (vmax - median) * (static_cast<double>(g) + 0.5) / grid;
        const auto it = std::upper_bound(values.begin(), values.end(), r);
        const std::size_t surv = static_cast<std::size_t>(values.end() - it);
        if (surv == 0) break;
        xs.push_back(r);
        ys.push_back(std::log(static_cast<double>(surv) / static_cast<double>(n)));
        ws.push_back(static_cast<double>(surv));
    }
    if (xs.size() < 4) return out;
    const auto fit = linear_fit(xs, ys, ws);
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.r2 = fit.r2;
    out.n_points = fit.n;
    out.ok = fit.n >= 4;
    return out;
}

} // namespace gibbsgeom::stats
