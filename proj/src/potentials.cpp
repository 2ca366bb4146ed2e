#include "gibbsgeom/potentials.hpp"

#include <algorithm>
#include <cmath>

#include "gibbsgeom/geometry.hpp"

namespace gibbsgeom {

double pair_add_one(const Potential& pot, const Point& x, const Point& y, std::span<const Point> pts) {
    std::vector<Point> with_y(pts.begin(), pts.end());
    with_y.push_back(y);
    const double a = pot.add_one(x, std::span<const Point>(with_y));
    const double b = pot.add_one(y, pts);
    if (std::isinf(a) || std::isinf(b)) return kInf;
    return a + b;
}

// ---------------------------------------------------------------- Strauss

StraussPotential::StraussPotential(int dim, double beta, double r0) : dim_(dim), beta_(beta), r0_(r0) {
    if (beta < 0.0) throw ValidationError("strauss: beta must be >= 0");
    if (!(r0 > 0.0)) throw ValidationError("strauss: r0 must be > 0");
}

double StraussPotential::add_one(const Point& x, std::span<const Point> pts) const {
    std::size_t close = 0;
    const double r2 = r0_ * r0_;
    for (const auto& y : pts)
        if (squared_distance(x, y) < r2) ++close;
    return beta_ * static_cast<double>(close);
}

double StraussPotential::add_one_lower(const Point& x, std::span<const Point> pts, double) const {
    return add_one(x, pts);
}

double StraussPotential::add_one_upper(const Point& x, std::span<const Point> pts, double r) const {
    if (r < r0_) return kInf;
    return add_one(x, pts);
}

// ---------------------------------------------------------------- Hard core

HardcorePotential::HardcorePotential(int dim, double r) : dim_(dim), r_(r) {
    if (!(r > 0.0)) throw ValidationError("hardcore: r must be > 0");
}

double HardcorePotential::add_one(const Point& x, std::span<const Point> pts) const {
    const double d2 = 4.0 * r_ * r_;
    for (const auto& y : pts)
        if (squared_distance(x, y) < d2) return kInf;
    return 0.0;
}

double HardcorePotential::add_one_lower(const Point& x, std::span<const Point> pts, double) const {
    return add_one(x, pts);
}

double HardcorePotential::add_one_upper(const Point& x, std::span<const Point> pts, double r) const {
    if (std::isinf(add_one(x, pts))) return kInf;
    return r < 2.0 * r_ ? kInf : 0.0;
}

// ---------------------------------------------------------------- Area interaction

AreaInteractionPotential::AreaInteractionPotential(int dim, double gamma, double r)
    : dim_(dim), gamma_(gamma), r_(r) {
    if (gamma < 0.0)
        throw ValidationError("area: only the repulsive branch (gamma >= 0) keeps the add-one potential non-negative");
    if (!(r > 0.0)) throw ValidationError("area: r must be > 0");
}

double AreaInteractionPotential::free_volume(const Point& x, std::span<const Point> pts,
                                             double base_radius) const {
    if (base_radius <= 0.0) return 0.0;
    switch (dim_) {
        case 1: {
            std::vector<double> covers;
            for (const auto& y : pts)
                if (std::abs(y[0] - x[0]) < base_radius + r_) covers.push_back(y[0]);
            return interval_free_length(x[0], base_radius, covers, r_);
        }
        case 2: {
            std::vector<Vec2> covers;
            for (const auto& y : pts)
                if (squared_distance(x, y) < (base_radius + r_) * (base_radius + r_))
                    covers.push_back({y[0], y[1]});
            return disk_free_area({x[0], x[1]}, base_radius, covers, r_);
        }
        default: {
            std::vector<Point> covers;
            for (const auto& y : pts)
                if (squared_distance(x, y) < (base_radius + r_) * (base_radius + r_)) covers.push_back(y);
            return ball_free_volume_3d(x, base_radius, covers, r_);
        }
    }
}

double AreaInteractionPotential::add_one(const Point& x, std::span<const Point> pts) const {
    return gamma_ * free_volume(x, pts, r_);
}

double AreaInteractionPotential::add_one_lower(const Point& x, std::span<const Point> pts, double r) const {
    // Only the sub-ball unreachable by exterior grains is certainly uncovered.
    const double base = std::min(r_, std::max(0.0, r - r_));
    return gamma_ * free_volume(x, pts, base);
}

double AreaInteractionPotential::add_one_upper(const Point& x, std::span<const Point> pts, double) const {
    return gamma_ * free_volume(x, pts, r_);
}

// ---------------------------------------------------------------- Pair potential

PairPotential::PairPotential(int dim, double amp, double rate, double r0, double truncation)
    : dim_(dim), amp_(amp), rate_(rate), r0_(r0), truncation_(truncation) {
    if (!(r0 > 0.0))
        throw ValidationError("pair: hard-core radius r0 must be > 0 (the localization bound needs it)");
    if (!(amp >= 0.0) || !(rate > 0.0)) throw ValidationError("pair: need A >= 0 and a > 0");

    // n-th shell [k r0, (k+1) r0) holds at most (2k+3)^d - (2k-1)^d points at
    // pairwise separation > r0 (disjoint r0/2-balls volume argument), each
    // contributing at most A exp(-a k r0).
    auto n_pack = [&](int k) {
        const double lo = std::max(2.0 * k - 1.0, 0.0);
        return std::pow(2.0 * k + 3.0, dim_) - std::pow(lo, dim_);
    };
    std::vector<double> terms;
    double t = 0.0;
    for (int k = 1; k <= 4000; ++k) {
        t = amp_ * n_pack(k) * std::exp(-rate_ * r0_ * k);
        terms.push_back(t);
        const double ratio = std::exp(-rate_ * r0_) * n_pack(k + 1) / n_pack(k);
        if (t < 1e-20 && ratio < 0.95) break;
    }
    k_max_ = static_cast<int>(terms.size());
    tail_at_shell_.assign(static_cast<std::size_t>(k_max_) + 1, 0.0);
    double suffix = 0.0;
    for (int k = k_max_; k >= 1; --k) {
        suffix += terms[static_cast<std::size_t>(k - 1)];
        tail_at_shell_[static_cast<std::size_t>(k)] = suffix;
    }
    tail_at_shell_[0] = suffix;

    // Largest rate valid at the right end of every constancy interval of psi.
    double c1 = kInf;
    for (int k = 1; k <= k_max_; ++k) {
        const double p = psi(static_cast<double>(k) * r0_);
        if (p > 0.0 && p < 1.0) c1 = std::min(c1, -std::log(p) / (static_cast<double>(k + 1) * r0_));
    }
    c1_ = std::isinf(c1) ? 1.0 : std::max(c1, 1e-300);
}

double PairPotential::tail_bound(double r) const {
    if (r < r0_) return kInf;
    const int k = std::min(static_cast<int>(std::floor(r / r0_)), k_max_);
    return tail_at_shell_[static_cast<std::size_t>(k)];
}

double PairPotential::psi(double r) const {
    if (r < r0_) return 1.0;
    return std::min(1.0, -std::expm1(-tail_bound(r)));
}

double PairPotential::dependency_radius(double u) const {
    if (u <= 0.0) return 0.0;
    const double budget = -std::log(u); // need T(r) <= -log(u)
    for (int k = 1; k <= k_max_; ++k)
        if (tail_at_shell_[static_cast<std::size_t>(k)] <= budget) return static_cast<double>(k) * r0_;
    return static_cast<double>(k_max_) * r0_;
}

double PairPotential::add_one(const Point& x, std::span<const Point> pts) const {
    double sum = 0.0;
    const double hc2 = r0_ * r0_;
    for (const auto& y : pts) {
        const double d2 = squared_distance(x, y);
        if (d2 <= hc2) return kInf;
        const double s = std::sqrt(d2);
        if (truncation_ > 0.0 && s > truncation_) continue;
        sum += amp_ * std::exp(-rate_ * s);
    }
    return sum;
}

double PairPotential::add_one_lower(const Point& x, std::span<const Point> pts, double) const {
    return add_one(x, pts);
}

double PairPotential::add_one_upper(const Point& x, std::span<const Point> pts, double r) const {
    const double local = add_one(x, pts);
    if (std::isinf(local) || r < r0_) return kInf;
    return local + tail_bound(r);
}

// ---------------------------------------------------------------- Truncated Poisson

TruncatedPoissonPotential::TruncatedPoissonPotential(int dim, double r, int k) : dim_(dim), r_(r), k_(k) {
    if (!(r > 0.0)) throw ValidationError("truncated_poisson: r must be > 0");
    if (k < 1) throw ValidationError("truncated_poisson: k must be >= 1");
}

bool TruncatedPoissonPotential::violates(const Point& x, std::span<const Point> pts) const {
    const double within = 2.0 * r_ * (1.0 + 1e-12);
    std::vector<Point> cand;
    for (const auto& y : pts)
        if (distance(x, y) <= within) cand.push_back(y);
    if (cand.size() < static_cast<std::size_t>(k_)) return false;

    const double rtol = r_ * (1.0 + 1e-12);
    std::size_t near_x = 0;
    for (const auto& y : cand)
        if (distance(x, y) <= rtol) ++near_x;
    if (near_x >= static_cast<std::size_t>(k_)) return true; // ball centered at x

    std::sort(cand.begin(), cand.end(), [&](const Point& a, const Point& b) {
        const double da = squared_distance(a, x), db = squared_distance(b, x);
        if (da != db) return da < db;
        return lex_less(a, b);
    });

    // DFS over subsets, pruned by the monotone enclosing-ball radius.
    std::vector<Point> chosen{x};
    auto dfs = [&](auto&& self, std::size_t start) -> bool {
        if (chosen.size() == static_cast<std::size_t>(k_) + 1) return true;
        const std::size_t still_needed = static_cast<std::size_t>(k_) + 1 - chosen.size();
        for (std::size_t i = start; i + still_needed <= cand.size(); ++i) {
            chosen.push_back(cand[i]);
            if (min_enclosing_ball(chosen, dim_).radius <= rtol && self(self, i + 1)) return true;
            chosen.pop_back();
        }
        return false;
    };
    return dfs(dfs, 0);
}

double TruncatedPoissonPotential::add_one(const Point& x, std::span<const Point> pts) const {
    return violates(x, pts) ? kInf : 0.0;
}

double TruncatedPoissonPotential::add_one_lower(const Point& x, std::span<const Point> pts, double) const {
    return add_one(x, pts);
}

double TruncatedPoissonPotential::add_one_upper(const Point& x, std::span<const Point> pts, double r) const {
    if (violates(x, pts)) return kInf;
    return r < 2.0 * r_ ? kInf : 0.0;
}

// ---------------------------------------------------------------- Enclosing ball

namespace {

bool solve2(double a11, double a12, double a21, double a22, double b1, double b2, double& x1, double& x2) {
    const double det = a11 * a22 - a12 * a21;
    const double scale = std::abs(a11) + std::abs(a12) + std::abs(a21) + std::abs(a22);
    if (std::abs(det) <= 1e-14 * scale * scale) return false;
    x1 = (b1 * a22 - b2 * a12) / det;
    x2 = (a11 * b2 - a21 * b1) / det;
    return true;
}

bool solve3(double m[3][3], double b[3], double out[3]) {
    // Gaussian elimination with partial pivoting.
    int idx[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int rr = col + 1; rr < 3; ++rr)
            if (std::abs(m[idx[rr]][col]) > std::abs(m[idx[piv]][col])) piv = rr;
        std::swap(idx[col], idx[piv]);
        if (std::abs(m[idx[col]][col]) < 1e-13) return false;
        for (int rr = col + 1; rr < 3; ++rr) {
            const double f = m[idx[rr]][col] / m[idx[col]][col];
            for (int cc = col; cc < 3; ++cc) m[idx[rr]][cc] -= f * m[idx[col]][cc];
            b[idx[rr]] -= f * b[idx[col]];
        }
    }
    for (int row = 2; row >= 0; --row) {
        double s = b[idx[row]];
        for (int cc = row + 1; cc < 3; ++cc) s -= m[idx[row]][cc] * out[cc];
        out[row] = s / m[idx[row]][row];
    }
    return true;
}

bool circumcenter3(const Point& p, const Point& q, const Point& s, Point& c) {
    // Equidistant point within the affine hull of three points.
    const Point u = q - p, v = s - p;
    const double uu = squared_distance(q, p), vv = squared_distance(s, p);
    double uv = 0.0;
    for (int i = 0; i < kMaxDim; ++i) uv += u[i] * v[i];
    double a = 0.0, b = 0.0;
    if (!solve2(2.0 * uu, 2.0 * uv, 2.0 * uv, 2.0 * vv, uu, vv, a, b)) return false;
    for (int i = 0; i < kMaxDim; ++i) c[i] = p[i] + a * u[i] + b * v[i];
    return true;
}

bool circumcenter4(const Point& p, const Point& q, const Point& s, const Point& t, Point& c) {
    double m[3][3], b[3];
    const Point* rest[3] = {&q, &s, &t};
    for (int row = 0; row < 3; ++row) {
        double rhs = 0.0;
        for (int i = 0; i < 3; ++i) {
            m[row][i] = 2.0 * ((*rest[row])[i] - p[i]);
            rhs += (*rest[row])[i] * (*rest[row])[i] - p[i] * p[i];
        }
        b[row] = rhs;
    }
    double out[3];
    if (!solve3(m, b, out)) return false;
    c = Point{{out[0], out[1], out[2]}};
    return true;
}

bool contains_all(std::span<const Point> pts, const Point& c, double radius) {
    const double r2 = radius * radius * (1.0 + 1e-9) + 1e-300;
    for (const auto& p : pts)
        if (squared_distance(p, c) > r2) return false;
    return true;
}

} // namespace

Ball min_enclosing_ball(std::span<const Point> pts, int dim) {
    Ball best;
    const std::size_t n = pts.size();
    if (n == 0) return best;
    if (n == 1) return {pts[0], 0.0};

    best.radius = kInf;
    auto consider = [&](const Point& c) {
        double r2 = 0.0;
        for (const auto& p : pts) r2 = std::max(r2, squared_distance(p, c));
        const double r = std::sqrt(r2);
        if (r < best.radius) best = {c, r};
    };

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            Point mid;
            for (int t = 0; t < kMaxDim; ++t) mid[t] = 0.5 * (pts[i][t] + pts[j][t]);
            const double r = 0.5 * distance(pts[i], pts[j]);
            if (r < best.radius && contains_all(pts, mid, r)) best = {mid, r};
        }
    if (dim >= 2) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                for (std::size_t k = j + 1; k < n; ++k) {
                    Point c;
                    if (!circumcenter3(pts[i], pts[j], pts[k], c)) continue;
                    const double r = distance(c, pts[i]);
                    if (r < best.radius && contains_all(pts, c, r)) best = {c, r};
                }
    }
    if (dim >= 3) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                for (std::size_t k = j + 1; k < n; ++k)
                    for (std::size_t l = k + 1; l < n; ++l) {
                        Point c;
                        if (!circumcenter4(pts[i], pts[j], pts[k], pts[l], c)) continue;
                        const double r = distance(c, pts[i]);
                        if (r < best.radius && contains_all(pts, c, r)) best = {c, r};
                    }
    }
    if (std::isinf(best.radius)) consider(pts[0]); // collinear degenerate fallback
    return best;
}

std::unique_ptr<Potential> clone_potential(const Potential& pot) {
    if (auto* p = dynamic_cast<const NullPotential*>(&pot)) return std::make_unique<NullPotential>(*p);
    if (auto* p = dynamic_cast<const StraussPotential*>(&pot)) return std::make_unique<StraussPotential>(*p);
    if (auto* p = dynamic_cast<const HardcorePotential*>(&pot)) return std::make_unique<HardcorePotential>(*p);
    if (auto* p = dynamic_cast<const AreaInteractionPotential*>(&pot))
        return std::make_unique<AreaInteractionPotential>(*p);
    if (auto* p = dynamic_cast<const PairPotential*>(&pot)) return std::make_unique<PairPotential>(*p);
    if (auto* p = dynamic_cast<const TruncatedPoissonPotential*>(&pot))
        return std::make_unique<TruncatedPoissonPotential>(*p);
    throw ValidationError("clone_potential: unknown potential type");
}

} // namespace gibbsgeom
