#include "gibbsgeom/measure.hpp"

#include <cmath>

#include "gibbsgeom/stats.hpp"

namespace gibbsgeom {

TestFunction TestFunction::constant(double c) {
    TestFunction f;
    f.kind_ = Kind::Constant;
    f.a_ = c;
    f.id_ = "const";
    return f;
}

TestFunction TestFunction::half_indicator() {
    TestFunction f;
    f.kind_ = Kind::HalfIndicator;
    f.id_ = "half";
    return f;
}

TestFunction TestFunction::affine(double a, double b) {
    TestFunction f;
    f.kind_ = Kind::Affine;
    f.a_ = a;
    f.b_ = b;
    f.id_ = "affine";
    return f;
}

TestFunction TestFunction::table(int dim, int nodes_per_axis, std::vector<double> values) {
    TestFunction f;
    f.kind_ = Kind::Table;
    f.table_ = std::make_shared<TableDensity>(dim, nodes_per_axis, std::move(values));
    f.id_ = "table";
    return f;
}

double TestFunction::operator()(const Point& q) const {
    switch (kind_) {
        case Kind::Constant: return a_;
        case Kind::HalfIndicator: return q[0] < 0.0 ? 1.0 : 0.0;
        case Kind::Affine: return a_ + b_ * q[0];
        case Kind::Table: return (*table_)(q);
    }
    return 0.0;
}

namespace {

// Midpoint product rule on Q_1; only used for tabulated test functions
// (built-ins have closed forms).
template <typename F>
double grid_integral(const F& f, int dim, int n = 64) {
    double acc = 0.0;
    const double step = 1.0 / n;
    const int ny = dim > 1 ? n : 1, nz = dim > 2 ? n : 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k) {
                Point p;
                p[0] = -0.5 + (i + 0.5) * step;
                if (dim > 1) p[1] = -0.5 + (j + 0.5) * step;
                if (dim > 2) p[2] = -0.5 + (k + 0.5) * step;
                acc += f(p);
            }
    return acc * std::pow(step, dim);
}

} // namespace

double TestFunction::integral(int dim) const {
    switch (kind_) {
        case Kind::Constant: return a_;
        case Kind::HalfIndicator: return 0.5;
        case Kind::Affine: return a_;
        case Kind::Table: return grid_integral(*this, dim);
    }
    return 0.0;
}

double TestFunction::integral_sq(int dim) const {
    switch (kind_) {
        case Kind::Constant: return a_ * a_;
        case Kind::HalfIndicator: return 0.5;
        case Kind::Affine: return a_ * a_ + b_ * b_ / 12.0;
        case Kind::Table: return grid_integral([&](const Point& p) { return (*this)(p) * (*this)(p); }, dim);
    }
    return 0.0;
}

double TestFunction::integral_product(const TestFunction& f, const TestFunction& g, int dim) {
    if (f.kind_ == Kind::Constant) return f.a_ * g.integral(dim);
    if (g.kind_ == Kind::Constant) return g.a_ * f.integral(dim);
    if (f.kind_ == Kind::HalfIndicator && g.kind_ == Kind::HalfIndicator) return 0.5;
    if (f.kind_ == Kind::Affine && g.kind_ == Kind::Affine)
        return f.a_ * g.a_ + f.b_ * g.b_ / 12.0;
    if (f.kind_ == Kind::HalfIndicator && g.kind_ == Kind::Affine)
        return 0.5 * g.a_ - g.b_ / 8.0;
    if (f.kind_ == Kind::Affine && g.kind_ == Kind::HalfIndicator)
        return integral_product(g, f, dim);
    return grid_integral([&](const Point& p) { return f(p) * g(p); }, dim);
}

double EmpiricalMeasure::total_mass() const {
    return stats::pairwise_sum(weights);
}

EmpiricalMeasure build_measure(const PointConfig& cfg, const Functional& f, double lambda) {
    if (!(lambda > 0.0)) throw ValidationError("build_measure: lambda must be > 0");
    const Window window = Window::from_volume(cfg.dim, lambda);
    EmpiricalMeasure mu;
    mu.lambda = lambda;
    mu.dim = cfg.dim;
    const double scale = std::pow(lambda, 1.0 / cfg.dim);
    for (const auto& p : cfg.points) {
        if (!window.contains(p))
            throw ValidationError("build_measure: configuration point outside Q_lambda");
        Point q;
        for (int a = 0; a < cfg.dim; ++a) q[static_cast<std::size_t>(a)] = p[static_cast<std::size_t>(a)] / scale;
        mu.locations.push_back(q);
    }
    mu.weights = f.evaluate(cfg, &window).values;
    return mu;
}

double integrate(const EmpiricalMeasure& mu, const TestFunction& f) {
    std::vector<double> terms(mu.weights.size());
    for (std::size_t i = 0; i < mu.weights.size(); ++i) terms[i] = f(mu.locations[i]) * mu.weights[i];
    return stats::pairwise_sum(terms);
}

} // namespace gibbsgeom
