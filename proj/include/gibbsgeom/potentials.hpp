#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gibbsgeom/point.hpp"

namespace gibbsgeom {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Energy-functional interface through its add-one potential. Values are
// non-negative; +inf encodes hereditary exclusion. Configurations passed in are
// assumed internally feasible (the samplers only ever build such sets).
//
// Envelope contract, for pts_in_ball = X ∩ B_r(x):
//   0 <= add_one_lower(x, ., r) <= add_one(x, X) <= add_one_upper(x, ., r)
//   exp(-lower) - exp(-upper) <= psi(r)
// with exp(-upper) non-decreasing and exp(-lower) non-increasing in r.
class Potential {
public:
    virtual ~Potential() = default;

    virtual std::string name() const = 0;
    virtual int dim() const = 0;

    virtual double add_one(const Point& x, std::span<const Point> pts) const = 0;
    virtual double add_one_lower(const Point& x, std::span<const Point> pts_in_ball, double r) const = 0;
    virtual double add_one_upper(const Point& x, std::span<const Point> pts_in_ball, double r) const = 0;

    // Localization function: non-increasing, right-continuous, values in [0,1].
    virtual double psi(double r) const = 0;

    // Natural interaction radius (grid scale; psi vanishes beyond it for
    // finite-range potentials).
    virtual double interaction_scale() const = 0;

    // Radius beyond which psi < 1e-12 (equals interaction_scale when finite range).
    virtual double psi_support_bound() const { return interaction_scale(); }

    // Exponential-decay rate C1 reported for r >= interaction_scale; below the
    // interaction scale the envelope gap of a hereditary potential reaches 1,
    // so no finite rate can hold there.
    virtual double reported_c1() const = 0;

    // Quantile of the dependency-radius law with CDF 1 - psi.
    virtual double dependency_radius(double u) const {
        return u > 0.0 ? psi_support_bound() : 0.0;
    }

    double add_one(const Point& x, const PointConfig& cfg) const {
        return add_one(x, std::span<const Point>(cfg.points));
    }
};

// Delta({x,y}, X) = Delta(x, X u {y}) + Delta(y, X).
double pair_add_one(const Potential& pot, const Point& x, const Point& y, std::span<const Point> pts);

class NullPotential final : public Potential {
public:
    explicit NullPotential(int dim) : dim_(dim) {}
    std::string name() const override { return "poisson"; }
    int dim() const override { return dim_; }
    double add_one(const Point&, std::span<const Point>) const override { return 0.0; }
    double add_one_lower(const Point&, std::span<const Point>, double) const override { return 0.0; }
    double add_one_upper(const Point&, std::span<const Point>, double) const override { return 0.0; }
    double psi(double) const override { return 0.0; }
    double interaction_scale() const override { return 0.0; }
    double reported_c1() const override { return 1.0; }

private:
    int dim_;
};

// beta * #{y : |y-x| < r0}.
class StraussPotential final : public Potential {
public:
    StraussPotential(int dim, double beta, double r0);
    std::string name() const override { return "strauss"; }
    int dim() const override { return dim_; }
    double add_one(const Point& x, std::span<const Point> pts) const override;
    double add_one_lower(const Point& x, std::span<const Point> pts, double r) const override;
    double add_one_upper(const Point& x, std::span<const Point> pts, double r) const override;
    double psi(double r) const override { return r < r0_ ? 1.0 : 0.0; }
    double interaction_scale() const override { return r0_; }
    double reported_c1() const override { return std::log(2.0) / r0_; }

private:
    int dim_;
    double beta_, r0_;
};

// +inf when any point is closer than 2r.
class HardcorePotential final : public Potential {
public:
    HardcorePotential(int dim, double r);
    std::string name() const override { return "hardcore"; }
    int dim() const override { return dim_; }
    double add_one(const Point& x, std::span<const Point> pts) const override;
    double add_one_lower(const Point& x, std::span<const Point> pts, double r) const override;
    double add_one_upper(const Point& x, std::span<const Point> pts, double r) const override;
    double psi(double r) const override { return r < 2.0 * r_ ? 1.0 : 0.0; }
    double interaction_scale() const override { return 2.0 * r_; }
    double reported_c1() const override { return std::log(2.0) / (2.0 * r_); }
    double exclusion_distance() const { return 2.0 * r_; }

private:
    int dim_;
    double r_;
};

// gamma * vol(B_r(x) \ union of B_r(y)); repulsive branch only (gamma >= 0).
class AreaInteractionPotential final : public Potential {
public:
    AreaInteractionPotential(int dim, double gamma, double r);
    std::string name() const override { return "area"; }
    int dim() const override { return dim_; }
    double add_one(const Point& x, std::span<const Point> pts) const override;
    double add_one_lower(const Point& x, std::span<const Point> pts, double r) const override;
    double add_one_upper(const Point& x, std::span<const Point> pts, double r) const override;
    double psi(double r) const override { return r < 2.0 * r_ ? 1.0 : 0.0; }
    double interaction_scale() const override { return 2.0 * r_; }
    double reported_c1() const override { return std::log(2.0) / (2.0 * r_); }

private:
    double free_volume(const Point& x, std::span<const Point> pts, double base_radius) const;

    int dim_;
    double gamma_, r_;
};

// phi(s) = A exp(-a s) for s > r0, +inf for s <= r0 (hard-core pair potential).
// The upper envelope adds a deterministic packing tail bound T(r).
class PairPotential final : public Potential {
public:
    PairPotential(int dim, double amp, double rate, double r0, double truncation = 0.0);
    std::string name() const override { return "pair"; }
    int dim() const override { return dim_; }
    double add_one(const Point& x, std::span<const Point> pts) const override;
    double add_one_lower(const Point& x, std::span<const Point> pts, double r) const override;
    double add_one_upper(const Point& x, std::span<const Point> pts, double r) const override;
    double psi(double r) const override;
    double interaction_scale() const override { return r0_; }
    double psi_support_bound() const override { return static_cast<double>(k_max_) * r0_; }
    double reported_c1() const override { return c1_; }
    double dependency_radius(double u) const override;

    double tail_bound(double r) const;
    double phi(double s) const { return s <= r0_ ? kInf : amp_ * std::exp(-rate_ * s); }

private:
    int dim_;
    double amp_, rate_, r0_, truncation_;
    std::vector<double> tail_at_shell_; // T(k * r0), k = 0..k_max_
    int k_max_ = 1;
    double c1_ = 1.0;
};

// +inf when some closed ball of radius r would contain x together with k or
// more other points; the search needs only X ∩ B_{2r}(x).
class TruncatedPoissonPotential final : public Potential {
public:
    TruncatedPoissonPotential(int dim, double r, int k);
    std::string name() const override { return "truncated_poisson"; }
    int dim() const override { return dim_; }
    double add_one(const Point& x, std::span<const Point> pts) const override;
    double add_one_lower(const Point& x, std::span<const Point> pts, double r) const override;
    double add_one_upper(const Point& x, std::span<const Point> pts, double r) const override;
    double psi(double r) const override { return r < 2.0 * r_ ? 1.0 : 0.0; }
    double interaction_scale() const override { return 2.0 * r_; }
    double reported_c1() const override { return std::log(2.0) / (2.0 * r_); }

    bool violates(const Point& x, std::span<const Point> pts) const;

private:
    int dim_;
    double r_;
    int k_;
};

// Smallest enclosing ball, exact for dim <= 3 (Welzl).
struct Ball {
    Point center;
    double radius = 0.0;
};
Ball min_enclosing_ball(std::span<const Point> pts, int dim);

std::unique_ptr<Potential> clone_potential(const Potential& pot);

} // namespace gibbsgeom
