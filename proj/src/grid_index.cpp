#include "gibbsgeom/grid_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gibbsgeom {

GridIndex::GridIndex(int dim, double cell_size) : dim_(dim), cell_(cell_size) {
    if (!(cell_size > 0.0)) throw ValidationError("grid cell_size must be > 0");
    if (dim < 1 || dim > kMaxDim) throw ValidationError("grid dimension must be in {1,2,3}");
}

GridIndex GridIndex::build(const PointConfig& cfg, double cell_size) {
    GridIndex g(cfg.dim, cell_size);
    g.points_.reserve(cfg.size());
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        if (!is_finite(cfg.points[i])) throw ValidationError("non-finite coordinate in configuration");
        g.insert(static_cast<int>(i), cfg.points[i]);
    }
    return g;
}

std::int64_t GridIndex::pack(std::int64_t ix, std::int64_t iy, std::int64_t iz) const {
    // 21 bits per axis, offset to keep indices positive.
    const std::int64_t off = 1 << 20;
    return ((ix + off) << 42) | ((iy + off) << 21) | (iz + off);
}

std::int64_t GridIndex::cell_of(const Point& p) const {
    const double inv = 1.0 / cell_;
    std::int64_t ix = static_cast<std::int64_t>(std::floor(p[0] * inv));
    std::int64_t iy = dim_ > 1 ? static_cast<std::int64_t>(std::floor(p[1] * inv)) : 0;
    std::int64_t iz = dim_ > 2 ? static_cast<std::int64_t>(std::floor(p[2] * inv)) : 0;
    return pack(ix, iy, iz);
}

void GridIndex::insert(int id, const Point& p) {
    if (!is_finite(p)) throw ValidationError("non-finite coordinate");
    if (static_cast<std::size_t>(id) >= points_.size()) points_.resize(static_cast<std::size_t>(id) + 1);
    points_[static_cast<std::size_t>(id)] = p;
    buckets_[cell_of(p)].push_back(id);
    ++count_;
}

void GridIndex::erase(int id, const Point& p) {
    auto it = buckets_.find(cell_of(p));
    if (it == buckets_.end()) return;
    auto& v = it->second;
    auto pos = std::find(v.begin(), v.end(), id);
    if (pos != v.end()) {
        *pos = v.back();
        v.pop_back();
        --count_;
        if (v.empty()) buckets_.erase(it);
    }
}

std::vector<int> GridIndex::range_query(const Point& center, double radius) const {
    std::vector<int> out;
    for_each_in_ball(center, radius, [&](int id) { out.push_back(id); });
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> GridIndex::knn_query(const Point& x, int k, int exclude_id) const {
    if (k <= 0) return {};
    const std::size_t avail = count_ - (exclude_id >= 0 ? 1u : 0u);
    if (avail < static_cast<std::size_t>(k))
        throw InsufficientPointsError("knn_query: fewer than k candidate points in index");

    struct Cand {
        double d2;
        Point p;
        int id;
    };
    auto better = [](const Cand& a, const Cand& b) {
        if (a.d2 != b.d2) return a.d2 < b.d2;
        if (!(a.p == b.p)) return lex_less(a.p, b.p);
        return a.id < b.id;
    };

    // Expanding-ring search: once >= k points lie within radius r they contain
    // the exact k nearest, since anything outside the ball is farther.
    std::vector<Cand> best;
    double r = cell_;
    for (;;) {
        best.clear();
        for_each_in_ball(x, r, [&](int id) {
            if (id == exclude_id) return;
            best.push_back({squared_distance(points_[static_cast<std::size_t>(id)], x),
                            points_[static_cast<std::size_t>(id)], id});
        });
        if (best.size() >= static_cast<std::size_t>(k)) {
            std::sort(best.begin(), best.end(), better);
            break;
        }
        r *= 2.0;
    }
    best.resize(static_cast<std::size_t>(k));
    std::vector<int> ids(best.size());
    for (std::size_t i = 0; i < best.size(); ++i) ids[i] = best[i].id;
    return ids;
}

std::vector<int> brute_force_range(const std::vector<Point>& pts, const Point& center, double radius) {
    std::vector<int> out;
    const double r2 = radius * radius;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (squared_distance(pts[i], center) <= r2) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> brute_force_knn(const std::vector<Point>& pts, const Point& x, int k, int exclude_id) {
    std::vector<int> ids;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (static_cast<int>(i) != exclude_id) ids.push_back(static_cast<int>(i));
    if (ids.size() < static_cast<std::size_t>(k))
        throw InsufficientPointsError("brute_force_knn: fewer than k candidates");
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
        const double da = squared_distance(pts[static_cast<std::size_t>(a)], x);
        const double db = squared_distance(pts[static_cast<std::size_t>(b)], x);
        if (da != db) return da < db;
        if (!(pts[static_cast<std::size_t>(a)] == pts[static_cast<std::size_t>(b)]))
            return lex_less(pts[static_cast<std::size_t>(a)], pts[static_cast<std::size_t>(b)]);
        return a < b;
    });
    ids.resize(static_cast<std::size_t>(k));
    return ids;
}

} // namespace gibbsgeom
