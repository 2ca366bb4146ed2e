#include "gibbsgeom/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "gibbsgeom/parallel.hpp"
#include "gibbsgeom/quadrature.hpp"

namespace gibbsgeom {

namespace {

void attach_marks(PointConfig& cfg, RngStream& s) {
    cfg.marks.resize(cfg.size());
    for (auto& m : cfg.marks) m = s.uniform();
}

// Inserted-origin evaluation: returns xi(0, X) under the x-not-in-X convention
// together with exp(-Delta(0, X)).
struct InsertionValue {
    double xi = 0.0;
    double weight = 0.0;
};

InsertionValue evaluate_insertion(const Potential& pot, const Functional& f, const PointConfig& sample,
                                  const Window& probe_window, RngStream& rep_stream) {
    PointConfig with0;
    with0.dim = sample.dim;
    with0.points.reserve(sample.size() + 1);
    with0.points.push_back(Point{});
    for (const auto& p : sample.points) with0.points.push_back(p);
    if (f.requires_marks()) attach_marks(with0, rep_stream);
    InsertionValue out;
    out.xi = f.evaluate(with0, &probe_window).values.at(0);
    const double delta = pot.add_one(Point{}, std::span<const Point>(sample.points));
    out.weight = std::exp(-delta);
    return out;
}

} // namespace

ConstantEstimate estimate_E(const Potential& pot, double tau, const Functional& f,
                            const InsertionConfig& cfg, RngStream stream) {
    Window probe;
    probe.dim = pot.dim();
    probe.half_width = cfg.probe_half_width;
    SamplerOptions opts = cfg.sampler;
    opts.thermodynamic = true;
    GibbsSampler sampler(probe, tau, pot, opts, stream.child("calibrate"));

    std::vector<double> vals(static_cast<std::size_t>(cfg.replications));
    parallel_for(vals.size(), cfg.threads, [&](std::size_t rep) {
        auto rs = stream.child("rep").child(rep);
        const PointConfig x = sampler.sample_points(rs.child("sample"));
        auto ms = rs.child("marks");
        const auto iv = evaluate_insertion(pot, f, x, probe, ms);
        vals[rep] = iv.xi * iv.weight;
    });

    ConstantEstimate est;
    est.replications = cfg.replications;
    est.value = stats::mean(vals);
    est.std_error = std::sqrt(stats::variance(vals) / vals.size());
    est.truncation_radius = cfg.probe_half_width;
    return est;
}

VEstimate estimate_V(const Potential& pot, double tau, const Functional& f, const VConfig& cfg,
                     RngStream stream) {
    const int dim = pot.dim();
    Window probe;
    probe.dim = dim;
    probe.half_width = cfg.probe_half_width;
    SamplerOptions opts = cfg.sampler;
    opts.thermodynamic = true;
    GibbsSampler sampler(probe, tau, pot, opts, stream.child("calibrate"));

    VEstimate out;
    double cutoff = cfg.cutoff;
    for (int attempt = 0;; ++attempt) {
        out.radii.clear();
        for (int j = 1; j <= cfg.n_radii; ++j)
            out.radii.push_back(cutoff * static_cast<double>(j) / cfg.n_radii);

        const std::size_t nr = out.radii.size();
        const std::size_t reps = static_cast<std::size_t>(cfg.replications);
        std::vector<double> a_vals(reps), e_vals(reps);
        std::vector<std::vector<double>> b_vals(nr, std::vector<double>(reps));

        parallel_for(reps, cfg.threads, [&](std::size_t rep) {
            auto rs = stream.child("rep").child(rep).child(static_cast<std::uint64_t>(attempt));
            const PointConfig x = sampler.sample_points(rs.child("sample"));
            auto ms = rs.child("marks");
            const auto iv = evaluate_insertion(pot, f, x, probe, ms);
            a_vals[rep] = iv.xi * iv.xi * iv.weight;
            e_vals[rep] = iv.xi * iv.weight;

            for (std::size_t j = 0; j < nr; ++j) {
                Point xj;
                xj[0] = out.radii[j];
                // xi(0, X u {x}) xi(x, X u {0}) exp(-Delta({0,x}, X))
                PointConfig both;
                both.dim = x.dim;
                both.points.push_back(Point{});
                both.points.push_back(xj);
                for (const auto& p : x.points) both.points.push_back(p);
                auto mj = rs.child("pairmarks").child(j);
                if (f.requires_marks()) attach_marks(both, mj);
                const auto vals = f.evaluate(both, &probe).values;
                const double pair_delta = pair_add_one(pot, Point{}, xj, std::span<const Point>(x.points));
                b_vals[j][rep] = vals.at(0) * vals.at(1) * std::exp(-pair_delta);
            }
        });

        out.e_hat.value = stats::mean(e_vals);
        out.e_hat.std_error = std::sqrt(stats::variance(e_vals) / e_vals.size());
        out.e_hat.replications = cfg.replications;
        out.sigma0 = stats::mean(a_vals);
        out.sigma0_se = std::sqrt(stats::variance(a_vals) / a_vals.size());

        const double e2 = out.e_hat.value * out.e_hat.value;
        out.sigma0x.assign(nr, 0.0);
        out.sigma0x_se.assign(nr, 0.0);
        for (std::size_t j = 0; j < nr; ++j) {
            out.sigma0x[j] = stats::mean(b_vals[j]) - e2;
            out.sigma0x_se[j] = std::sqrt(stats::variance(b_vals[j]) / reps);
        }

        // Fitted |sigma[0,x]| tail decides whether the cutoff suffices.
        std::vector<double> xs, ys;
        for (std::size_t j = nr / 2; j < nr; ++j)
            if (std::abs(out.sigma0x[j]) > 1e-300) {
                xs.push_back(out.radii[j]);
                ys.push_back(std::log(std::abs(out.sigma0x[j])));
            }
        const auto fit = stats::linear_fit(xs, ys);
        const double sigma_scale = std::max(std::abs(out.sigma0), 1e-12);
        double tail_at_cutoff = std::abs(out.sigma0x.back());
        if (fit.n >= 4 && fit.slope < 0.0) tail_at_cutoff = std::exp(fit.intercept + fit.slope * cutoff);
        out.tail_bound = tail_at_cutoff * tau * ball_volume(dim, 1.0) * std::pow(cutoff, dim);

        if (!cfg.auto_extend_cutoff || attempt >= 3 || tail_at_cutoff < 1e-4 * sigma_scale) {
            // Radial quadrature of the two-point term over B_cutoff.
            const double surface = dim * ball_volume(dim, 1.0); // d omega_d s^(d-1)
            double integral = 0.0;
            // left closure [0, r_1] with the first value
            integral += out.sigma0x.front() * ball_volume(dim, out.radii.front());
            for (std::size_t j = 0; j + 1 < nr; ++j) {
                const double s0 = out.radii[j], s1 = out.radii[j + 1];
                const double g0 = out.sigma0x[j] * surface * std::pow(s0, dim - 1);
                const double g1 = out.sigma0x[j + 1] * surface * std::pow(s1, dim - 1);
                integral += 0.5 * (g0 + g1) * (s1 - s0);
            }
            out.v.value = out.sigma0 + tau * integral;
            out.v.replications = cfg.replications;
            out.v.truncation_radius = cutoff;
            // Combined standard error: sigma0 term + quadrature of the two-point
            // SEs + the EhatA^2 shift.
            double quad_se2 = 0.0;
            for (std::size_t j = 0; j < nr; ++j) {
                const double w = surface * std::pow(out.radii[j], dim - 1) * (cutoff / cfg.n_radii);
                quad_se2 += (tau * w * out.sigma0x_se[j]) * (tau * w * out.sigma0x_se[j]);
            }
            const double e_shift_se = 2.0 * std::abs(out.e_hat.value) * out.e_hat.std_error * tau *
                                      ball_volume(dim, cutoff);
            out.v.std_error = std::sqrt(out.sigma0_se * out.sigma0_se + quad_se2 + e_shift_se * e_shift_se);
            return out;
        }
        cutoff *= 1.5;
    }
}

std::vector<double> sample_functional_totals(const Potential& pot, double tau, const Functional& f,
                                             const TestFunction& test_fn, double lambda, int reps,
                                             int threads, const SamplerOptions& opts, RngStream stream) {
    const int dim = pot.dim();
    const Window window = Window::from_volume(dim, lambda);
    SamplerOptions sopts = opts;
    GibbsSampler sampler(window, tau, pot, sopts, stream.child("calibrate"));

    std::vector<double> totals(static_cast<std::size_t>(reps));
    parallel_for(totals.size(), threads, [&](std::size_t rep) {
        auto rs = stream.child("rep").child(rep);
        PointConfig x = sampler.sample_points(rs.child("sample"));
        if (f.requires_marks()) {
            auto ms = rs.child("marks");
            attach_marks(x, ms);
        }
        const EmpiricalMeasure mu = build_measure(x, f, lambda);
        totals[rep] = integrate(mu, test_fn);
    });
    return totals;
}

namespace {

ExperimentResult run_experiment(const Potential& pot, double tau, const Functional& f,
                                const ExperimentConfig& cfg, RngStream stream, int mode,
                                std::optional<ConstantEstimate> e_hat, std::optional<double> v_target) {
    ExperimentResult out;
    const int dim = pot.dim();
    for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
        const double lambda = cfg.lambdas[li];

        // Samples are shared across test functions at fixed lambda.
        const Window window = Window::from_volume(dim, lambda);
        SamplerOptions sopts = cfg.sampler;
        auto lstream = stream.child("lambda").child(li);
        GibbsSampler sampler(window, tau, pot, sopts, lstream.child("calibrate"));

        const std::size_t reps = static_cast<std::size_t>(cfg.replications);
        std::vector<std::vector<double>> totals(cfg.test_functions.size(),
                                                std::vector<double>(reps, 0.0));
        std::vector<std::array<double, 4>> mom_acc(reps, std::array<double, 4>{});
        parallel_for(reps, cfg.threads, [&](std::size_t rep) {
            auto rs = lstream.child("rep").child(rep);
            PointConfig x = sampler.sample_points(rs.child("sample"));
            if (f.requires_marks()) {
                auto ms = rs.child("marks");
                attach_marks(x, ms);
            }
            const EmpiricalMeasure mu = build_measure(x, f, lambda);
            for (std::size_t fi = 0; fi < cfg.test_functions.size(); ++fi)
                totals[fi][rep] = integrate(mu, cfg.test_functions[fi]);
            std::array<double, 4> m{};
            for (double w : mu.weights)
                for (int p = 0; p < 4; ++p) m[static_cast<std::size_t>(p)] += std::pow(std::abs(w), p + 1);
            if (!mu.weights.empty())
                for (int p = 0; p < 4; ++p) m[static_cast<std::size_t>(p)] /= static_cast<double>(mu.weights.size());
            mom_acc[rep] = m;
        });

        MomentDiagnostics md;
        md.lambda = lambda;
        for (int p = 0; p < 4; ++p) {
            std::vector<double> col(reps);
            for (std::size_t rep = 0; rep < reps; ++rep) col[rep] = mom_acc[rep][static_cast<std::size_t>(p)];
            md.moments[static_cast<std::size_t>(p)] = stats::mean(col);
        }
        out.moments.push_back(md);

        for (std::size_t fi = 0; fi < cfg.test_functions.size(); ++fi) {
            const auto& tf = cfg.test_functions[fi];
            ExperimentRow row;
            row.lambda = lambda;
            row.f_id = tf.id();
            row.n_reps = cfg.replications;
            row.mean = stats::mean(totals[fi]);
            row.variance = stats::variance(totals[fi]);

            if (mode == 0) { // WLLN
                row.normalized = row.mean / lambda;
                row.std_error = std::sqrt(row.variance / static_cast<double>(reps)) / lambda;
                if (e_hat) row.target = tau * e_hat->value * tf.integral(dim);
            } else if (mode == 1) { // variance scaling
                row.normalized = row.variance / lambda;
                row.std_error = row.variance * std::sqrt(2.0 / (static_cast<double>(reps) - 1.0)) / lambda;
                if (v_target) row.target = tau * (*v_target) * tf.integral_sq(dim);
            } else { // CLT
                row.normalized = row.variance / lambda;
                row.std_error = std::sqrt(row.variance / static_cast<double>(reps));
                if (v_target) row.target = tau * (*v_target) * tf.integral_sq(dim);
                const auto ad = stats::anderson_darling_normal(totals[fi]);
                row.ad_stat = ad.a2_corrected;
                row.ks_dist = stats::kolmogorov_distance_normal(totals[fi]);
                auto bs = lstream.child("boot").child(fi);
                out.ks_boot_se.push_back(stats::bootstrap_ks_se(totals[fi], 200, bs));
            }
            out.rows.push_back(row);
        }

        if (mode == 2 && cfg.test_functions.size() >= 2) {
            const auto& t0 = totals[0];
            const auto& t1 = totals[1];
            const double m0 = stats::mean(t0), m1 = stats::mean(t1);
            std::vector<double> prod(reps);
            for (std::size_t rep = 0; rep < reps; ++rep) prod[rep] = (t0[rep] - m0) * (t1[rep] - m1);
            out.cov_f1f2 = stats::pairwise_sum(prod) / (static_cast<double>(reps) - 1.0) / lambda;
            if (v_target)
                out.cov_target = tau * (*v_target) *
                                 TestFunction::integral_product(cfg.test_functions[0],
                                                                cfg.test_functions[1], dim);
            out.cov_valid = true;
        }
    }
    return out;
}

} // namespace

ExperimentResult wlln_experiment(const Potential& pot, double tau, const Functional& f,
                                 const ExperimentConfig& cfg, RngStream stream,
                                 std::optional<ConstantEstimate> e_hat) {
    return run_experiment(pot, tau, f, cfg, stream, 0, e_hat, std::nullopt);
}

ExperimentResult variance_scaling_experiment(const Potential& pot, double tau, const Functional& f,
                                             const ExperimentConfig& cfg, RngStream stream,
                                             std::optional<double> v_target) {
    return run_experiment(pot, tau, f, cfg, stream, 1, std::nullopt, v_target);
}

ExperimentResult clt_experiment(const Potential& pot, double tau, const Functional& f,
                                const ExperimentConfig& cfg, RngStream stream,
                                std::optional<double> v_target) {
    return run_experiment(pot, tau, f, cfg, stream, 2, std::nullopt, v_target);
}

QuantizationBound quantization_bound(const Potential& pot, double tau, int dim, double r,
                                     const DensityField& h, const InsertionConfig& cfg,
                                     RngStream stream) {
    QuantizationBound out;
    const QuantizationFunctional quant(r);
    out.e_m = estimate_E(pot, tau, quant, cfg, stream);

    // ||h||_{d/(d+r)} = (integral of h^{d/(d+r)})^{(d+r)/d} over Q_1.
    const double q = static_cast<double>(dim) / (dim + r);
    const int n = 64;
    double acc = 0.0;
    const int ny = dim > 1 ? n : 1, nz = dim > 2 ? n : 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k) {
                Point p;
                p[0] = -0.5 + (i + 0.5) / n;
                if (dim > 1) p[1] = -0.5 + (j + 0.5) / n;
                if (dim > 2) p[2] = -0.5 + (k + 0.5) / n;
                acc += std::pow(std::max(h(p), 0.0), q);
            }
    acc /= static_cast<double>(n) * ny * nz;
    out.h_norm = std::pow(acc, 1.0 / q);

    out.empirical_bound = tau * out.e_m.value / out.h_norm;
    out.std_error = tau * out.e_m.std_error / out.h_norm;
    out.poisson_bound = std::pow(ball_volume(dim, 1.0), -r / dim) * std::tgamma(1.0 + r / dim) *
                        std::pow(tau, -r / dim);
    return out;
}

} // namespace gibbsgeom
