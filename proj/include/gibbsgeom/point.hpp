#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "gibbsgeom/errors.hpp"

namespace gibbsgeom {

inline constexpr int kMaxDim = 3;

// A point in R^d, d <= 3; unused coordinates stay zero so distance code is
// dimension-agnostic.
struct Point {
    std::array<double, kMaxDim> c{0.0, 0.0, 0.0};

    double& operator[](std::size_t i) { return c[i]; }
    double operator[](std::size_t i) const { return c[i]; }

    bool operator==(const Point& o) const { return c == o.c; }
};

inline Point make_point(double x, double y = 0.0, double z = 0.0) { return Point{{x, y, z}}; }

inline double squared_distance(const Point& a, const Point& b) {
    double s = 0.0;
    for (int i = 0; i < kMaxDim; ++i) {
        const double d = a.c[i] - b.c[i];
        s += d * d;
    }
    return s;
}

inline double distance(const Point& a, const Point& b) { return std::sqrt(squared_distance(a, b)); }

inline Point operator+(const Point& a, const Point& b) {
    return Point{{a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2]}};
}

inline Point operator-(const Point& a, const Point& b) {
    return Point{{a.c[0] - b.c[0], a.c[1] - b.c[1], a.c[2] - b.c[2]}};
}

inline bool lex_less(const Point& a, const Point& b) { return a.c < b.c; }

inline bool is_finite(const Point& p) {
    return std::isfinite(p.c[0]) && std::isfinite(p.c[1]) && std::isfinite(p.c[2]);
}

// The cube [-half_width, half_width]^d centered at the origin.
struct Window {
    int dim = 2;
    double half_width = 0.5;

    static Window from_volume(int dim, double volume) {
        Window w;
        w.dim = dim;
        w.half_width = 0.5 * std::pow(volume, 1.0 / dim);
        return w;
    }

    double volume() const { return std::pow(2.0 * half_width, dim); }

    double side() const { return 2.0 * half_width; }

    bool contains(const Point& p) const {
        for (int i = 0; i < dim; ++i)
            if (std::abs(p[i]) > half_width) return false;
        return true;
    }

    // Cube circumscribing diameter, the largest distance between two window points.
    double diameter() const { return side() * std::sqrt(static_cast<double>(dim)); }
};

// Finite configuration; marks (when present) align with points by index.
struct PointConfig {
    int dim = 2;
    std::vector<Point> points;
    std::vector<double> marks;

    std::size_t size() const { return points.size(); }
    bool has_marks() const { return !marks.empty(); }

    void push_back(const Point& p) { points.push_back(p); }
};

inline PointConfig translate(const PointConfig& cfg, const Point& z) {
    PointConfig out = cfg;
    for (auto& p : out.points) p = p + z;
    return out;
}

} // namespace gibbsgeom
