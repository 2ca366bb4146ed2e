#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gibbsgeom/functionals.hpp"
#include "gibbsgeom/point.hpp"

namespace gibbsgeom {

// Bounded test function on Q_1 with exact integrals for the built-in family.
class TestFunction {
public:
    enum class Kind { Constant, HalfIndicator, Affine, Table };

    static TestFunction constant(double c = 1.0);
    static TestFunction half_indicator();               // 1 on {x1 < 0}
    static TestFunction affine(double a, double b);     // a + b x1
    static TestFunction table(int dim, int nodes_per_axis, std::vector<double> values);

    double operator()(const Point& q1) const;
    double integral(int dim) const;    // over Q_1
    double integral_sq(int dim) const;
    static double integral_product(const TestFunction& f, const TestFunction& g, int dim);

    const std::string& id() const { return id_; }

private:
    TestFunction() = default;
    Kind kind_ = Kind::Constant;
    double a_ = 1.0, b_ = 0.0;
    std::shared_ptr<const TableDensity> table_;
    std::string id_ = "const";
};

// xi-weighted atoms at rescaled locations x / lambda^(1/d) in Q_1.
struct EmpiricalMeasure {
    double lambda = 1.0;
    int dim = 2;
    std::vector<Point> locations;
    std::vector<double> weights;

    double total_mass() const;
};

// Weights are xi(x, X) for every x in X; X must lie inside Q_lambda.
EmpiricalMeasure build_measure(const PointConfig& cfg, const Functional& f, double lambda);

double integrate(const EmpiricalMeasure& mu, const TestFunction& f);

} // namespace gibbsgeom
