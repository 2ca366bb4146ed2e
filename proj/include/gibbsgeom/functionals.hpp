#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gibbsgeom/geometry.hpp"
#include "gibbsgeom/point.hpp"

namespace gibbsgeom {

// Density on the unit cube Q_1, used by the quantization perturbation.
class DensityField {
public:
    virtual ~DensityField() = default;
    virtual double operator()(const Point& q1) const = 0;
    virtual bool constant() const { return false; }
};

class UniformDensity final : public DensityField {
public:
    double operator()(const Point&) const override { return 1.0; }
    bool constant() const override { return true; }
};

// Values on a regular grid over Q_1, multilinear interpolation between nodes.
class TableDensity final : public DensityField {
public:
    TableDensity(int dim, int nodes_per_axis, std::vector<double> values);
    double operator()(const Point& q1) const override;

private:
    int dim_, n_;
    std::vector<double> values_;
};

struct FunctionalBatch {
    std::vector<double> values;
    bool degenerate = false;
    std::vector<double> perturbation; // delta of the perturbed quantization score
};

// Translation-invariant per-point score xi(x, X); evaluate() returns all
// per-point values of one configuration (several scores are global
// computations, so batching is the natural unit).
class Functional {
public:
    virtual ~Functional() = default;
    virtual std::string name() const = 0;
    virtual bool requires_marks() const { return false; }
    virtual FunctionalBatch evaluate(const PointConfig& cfg, const Window* window) const = 0;

    double value(const PointConfig& cfg, std::size_t i, const Window* window) const {
        return evaluate(cfg, window).values.at(i);
    }
};

// xi == 1: plain counting measure.
class CountFunctional final : public Functional {
public:
    std::string name() const override { return "count"; }
    FunctionalBatch evaluate(const PointConfig& cfg, const Window*) const override {
        return {std::vector<double>(cfg.size(), 1.0), false, {}};
    }
};

// Random sequential adsorption of unit-volume balls in arrival-mark order;
// score 1 when the ball packs.
class RsaPackFunctional final : public Functional {
public:
    explicit RsaPackFunctional(int dim);
    std::string name() const override { return "rsa"; }
    bool requires_marks() const override { return true; }
    FunctionalBatch evaluate(const PointConfig& cfg, const Window*) const override;
    double ball_radius() const { return radius_; }

private:
    int dim_;
    double radius_; // omega_d r^d = 1
};

// Half the length of undirected k-nearest-neighbor edges incident to each point.
class KnnEdgeLengthFunctional final : public Functional {
public:
    explicit KnnEdgeLengthFunctional(int k) : k_(k) {}
    std::string name() const override { return "knn_length"; }
    FunctionalBatch evaluate(const PointConfig& cfg, const Window*) const override;

private:
    int k_;
};

enum class ComponentGraph { KnnMutual, Percolation };

// Reciprocal component size; summing gives the number of components.
class ComponentReciprocalFunctional final : public Functional {
public:
    ComponentReciprocalFunctional(ComponentGraph graph, int k = 1, double radius = 1.0)
        : graph_(graph), k_(k), radius_(radius) {}
    std::string name() const override {
        return graph_ == ComponentGraph::KnnMutual ? "knn_components" : "percolation_components";
    }
    FunctionalBatch evaluate(const PointConfig& cfg, const Window*) const override;

private:
    ComponentGraph graph_;
    int k_;
    double radius_;
};

// Half the total length of the finite Voronoi cell edges (d = 2).
class VoronoiEdgeLengthFunctional final : public Functional {
public:
    std::string name() const override { return "voronoi_length"; }
    FunctionalBatch evaluate(const PointConfig& cfg, const Window*) const override;
};

// Integral of |y - x|^r over the Voronoi cell of x clipped to the window;
// with a density the integrand carries h(y / lambda^(1/d)) / h(x / lambda^(1/d))
// and the difference against the unweighted score is reported separately.
class QuantizationFunctional final : public Functional {
public:
    QuantizationFunctional(double r, std::shared_ptr<const DensityField> h = nullptr,
                           double h_floor = 0.0)
        : r_(r), h_(std::move(h)), h_floor_(h_floor) {}
    std::string name() const override { return "quantization"; }
    FunctionalBatch evaluate(const PointConfig& cfg, const Window* window) const override;

    double cell_integral(const PointConfig& cfg, int i, const GridIndex* index,
                         const Window* window) const;

private:
    double weighted_cell_integral(const PointConfig& cfg, int i, const GridIndex* index,
                                  const Window* window, double lambda_scale) const;

    double r_;
    std::shared_ptr<const DensityField> h_;
    double h_floor_;
};

// Wide-sense stabilization probe: smallest grid radius R such that the score of
// x computed from X ∩ B_R(x) is unchanged by every battery insertion outside B_R.
struct ProbeBattery {
    bool include_empty = true;
    std::vector<double> shell_factors{1.0 + 1e-9, 1.35, 2.0, 4.0};
    std::vector<double> far_factors{3.0, 10.0};
};

struct StabilizationProbe {
    Point x;
    std::vector<double> radii;
    double stabilized_at = 0.0;
    bool found = false;
};

StabilizationProbe stabilization_probe(const Functional& f, const PointConfig& cfg, std::size_t x_index,
                                       std::vector<double> radii, const ProbeBattery& battery);

std::vector<Point> battery_shell(const Point& x, double radius, int dim);

} // namespace gibbsgeom
