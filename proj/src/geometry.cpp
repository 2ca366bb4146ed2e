#include "gibbsgeom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gibbsgeom {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct AngularSet {
    // Disjoint sorted intervals within [0, 2pi).
    std::vector<std::pair<double, double>> iv;
    bool full = false;

    void add(double start, double length) {
        if (full) return;
        if (length >= kTwoPi) {
            full = true;
            iv.clear();
            return;
        }
        if (length <= 0.0) return;
        double s = std::fmod(start, kTwoPi);
        if (s < 0.0) s += kTwoPi;
        double e = s + length;
        if (e > kTwoPi) {
            iv.emplace_back(s, kTwoPi);
            iv.emplace_back(0.0, e - kTwoPi);
        } else {
            iv.emplace_back(s, e);
        }
    }

    void normalize() {
        if (full || iv.empty()) return;
        std::sort(iv.begin(), iv.end());
        std::vector<std::pair<double, double>> merged;
        for (auto& p : iv) {
            if (!merged.empty() && p.first <= merged.back().second)
                merged.back().second = std::max(merged.back().second, p.second);
            else
                merged.push_back(p);
        }
        iv.swap(merged);
        if (iv.size() == 1 && iv[0].first <= 0.0 && iv[0].second >= kTwoPi) {
            full = true;
            iv.clear();
        }
    }

    AngularSet complement() const {
        AngularSet out;
        if (full) return out;
        if (iv.empty()) {
            out.full = true;
            return out;
        }
        double cur = 0.0;
        for (auto& p : iv) {
            if (p.first > cur) out.iv.emplace_back(cur, p.first);
            cur = std::max(cur, p.second);
        }
        if (cur < kTwoPi) out.iv.emplace_back(cur, kTwoPi);
        return out;
    }

    AngularSet intersect(const AngularSet& other) const {
        AngularSet out;
        if (full) return other;
        if (other.full) return *this;
        std::size_t i = 0, j = 0;
        while (i < iv.size() && j < other.iv.size()) {
            const double lo = std::max(iv[i].first, other.iv[j].first);
            const double hi = std::min(iv[i].second, other.iv[j].second);
            if (lo < hi) out.iv.emplace_back(lo, hi);
            if (iv[i].second < other.iv[j].second)
                ++i;
            else
                ++j;
        }
        return out;
    }
};

// Green's theorem contribution of the CCW arc [t1, t2] of the circle (cx, cy, rho).
double arc_green(double cx, double cy, double rho, double t1, double t2) {
    return 0.5 * (rho * rho * (t2 - t1) + cx * rho * (std::sin(t2) - std::sin(t1)) -
                  cy * rho * (std::cos(t2) - std::cos(t1)));
}

double green_over(const AngularSet& s, double cx, double cy, double rho) {
    if (s.full) return arc_green(cx, cy, rho, 0.0, kTwoPi);
    double a = 0.0;
    for (auto& p : s.iv) a += arc_green(cx, cy, rho, p.first, p.second);
    return a;
}

// Angular span of circle (o, rho) covered by the closed disk (q, r).
// Returns {center angle, half angle}; half < 0 means none, half >= pi means full.
std::pair<double, double> circle_disk_span(const Vec2& o, double rho, const Vec2& q, double r) {
    const double dx = q.x - o.x, dy = q.y - o.y;
    const double d = std::hypot(dx, dy);
    if (d + rho <= r) return {0.0, std::numbers::pi};
    if (d >= rho + r) return {0.0, -1.0};
    if (d + r <= rho) return {0.0, -1.0};
    const double cosv = std::clamp((d * d + rho * rho - r * r) / (2.0 * d * rho), -1.0, 1.0);
    return {std::atan2(dy, dx), std::acos(cosv)};
}

} // namespace

double ball_volume(int dim, double r) {
    if (dim < 1) throw ValidationError("ball_volume: dimension must be >= 1");
    if (r < 0.0) throw ValidationError("ball_volume: radius must be >= 0");
    const double unit = std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0);
    return unit * std::pow(r, dim);
}

double ConvexPolygon::area() const {
    if (vertices.size() < 3) return 0.0;
    double a = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const Vec2& p = vertices[i];
        const Vec2& q = vertices[(i + 1) % vertices.size()];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

ConvexPolygon clip(const ConvexPolygon& poly, const HalfPlane& h, bool frame_cut) {
    ConvexPolygon out;
    const std::size_t n = poly.vertices.size();
    if (n == 0) return out;
    auto side = [&](const Vec2& p) { return h.n.x * p.x + h.n.y * p.y - h.c; };
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly.vertices[i];
        const Vec2& b = poly.vertices[(i + 1) % n];
        const double sa = side(a), sb = side(b);
        if (sa <= 0.0) {
            out.vertices.push_back(a);
            out.on_frame.push_back(poly.on_frame[i]);
        }
        if ((sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb <= 0.0)) {
            const double t = sa / (sa - sb);
            out.vertices.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
            out.on_frame.push_back(frame_cut);
        }
    }
    return out;
}

double VoronoiCell::finite_edge_length() const {
    const std::size_t n = polygon.vertices.size();
    if (n < 2) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        if (polygon.on_frame[i] || polygon.on_frame[j]) continue;
        total += std::hypot(polygon.vertices[j].x - polygon.vertices[i].x,
                            polygon.vertices[j].y - polygon.vertices[i].y);
    }
    return total;
}

VoronoiCell voronoiCellImpl(const PointConfig& cfg, int site, const GridIndex* index,
                            const Window* clip_window) {
    const Point x = cfg.points[static_cast<std::size_t>(site)];
    VoronoiCell cell;
    cell.site = x;

    double extent = 1.0;
    for (const auto& p : cfg.points) extent = std::max(extent, distance(p, x));
    if (clip_window) extent = std::max(extent, clip_window->diameter());
    const double frame = 1e7 * extent;

    ConvexPolygon poly;
    poly.vertices = {{x[0] - frame, x[1] - frame},
                     {x[0] + frame, x[1] - frame},
                     {x[0] + frame, x[1] + frame},
                     {x[0] - frame, x[1] + frame}};
    poly.on_frame = {true, true, true, true};

    if (clip_window) {
        const double w = clip_window->half_width;
        poly = clip(poly, {{1.0, 0.0}, w});
        poly = clip(poly, {{-1.0, 0.0}, w});
        poly = clip(poly, {{0.0, 1.0}, w});
        poly = clip(poly, {{0.0, -1.0}, w});
    }

    auto vertex_radius = [&]() {
        double r = 0.0;
        for (const auto& v : poly.vertices)
            r = std::max(r, std::hypot(v.x - x[0], v.y - x[1]));
        return r;
    };

    auto clip_by_site = [&](int id) {
        const Point y = cfg.points[static_cast<std::size_t>(id)];
        if (y == x) throw DegenerateSiteError("voronoi_cell_2d: duplicate site coordinates");
        const Vec2 n{y[0] - x[0], y[1] - x[1]};
        const double c = 0.5 * (y[0] * y[0] + y[1] * y[1] - x[0] * x[0] - x[1] * x[1]);
        poly = clip(poly, {n, c});
    };

    if (index) {
        // Stream candidates in distance order; a site farther than twice the
        // current max vertex distance cannot intersect the cell.
        double r_done = 0.0;
        double r = std::max(index->cell_size(), 1e-12);
        double rv = vertex_radius();
        while (r_done < std::min(2.0 * rv, extent * 1.0000001)) {
            struct C {
                double d2;
                int id;
            };
            std::vector<C> annulus;
            index->for_each_in_ball(x, std::min(r, extent * 1.0000001), [&](int id) {
                if (id == site) return;
                const double d2 = squared_distance(index->point(id), x);
                if (d2 > r_done * r_done) annulus.push_back({d2, id});
            });
            std::sort(annulus.begin(), annulus.end(), [&](const C& a, const C& b) {
                if (a.d2 != b.d2) return a.d2 < b.d2;
                return a.id < b.id;
            });
            for (const auto& c : annulus) {
                if (c.d2 > 4.0 * rv * rv) break;
                clip_by_site(c.id);
                rv = vertex_radius();
            }
            r_done = r;
            r *= 2.0;
        }
    } else {
        struct C {
            double d2;
            int id;
        };
        std::vector<C> cands;
        cands.reserve(cfg.size());
        for (std::size_t i = 0; i < cfg.size(); ++i)
            if (static_cast<int>(i) != site)
                cands.push_back({squared_distance(cfg.points[i], x), static_cast<int>(i)});
        std::sort(cands.begin(), cands.end(), [&](const C& a, const C& b) {
            if (a.d2 != b.d2) return a.d2 < b.d2;
            return a.id < b.id;
        });
        for (const auto& c : cands) {
            const double rv = vertex_radius();
            if (c.d2 > 4.0 * rv * rv) break;
            clip_by_site(c.id);
        }
    }

    cell.polygon = poly;
    cell.bounded = true;
    for (bool f : poly.on_frame)
        if (f) cell.bounded = false;
    return cell;
}

VoronoiCell voronoi_cell_2d(const PointConfig& cfg, int site, const GridIndex* index,
                            const Window* clip_window) {
    if (cfg.dim != 2) throw ValidationError("voronoi_cell_2d requires dimension 2");
    if (site < 0 || static_cast<std::size_t>(site) >= cfg.size())
        throw ValidationError("voronoi_cell_2d: site index out of range");
    return voronoiCellImpl(cfg, site, index, clip_window);
}

double disk_free_area(const Vec2& center, double base_radius, const std::vector<Vec2>& covers,
                      double cover_radius) {
    if (base_radius <= 0.0) return 0.0;
    const double base_area = std::numbers::pi * base_radius * base_radius;
    if (covers.empty() || cover_radius <= 0.0) return base_area;

    // Keep only covers that can reach the base disk; deduplicate exact repeats
    // (coincident circles break the arc decomposition).
    std::vector<Vec2> cs;
    for (const auto& q : covers) {
        const double d = std::hypot(q.x - center.x, q.y - center.y);
        if (d + base_radius <= cover_radius) return 0.0; // base fully inside one cover
        if (d >= base_radius + cover_radius) continue;
        bool dup = false;
        for (const auto& seen : cs)
            if (seen.x == q.x && seen.y == q.y) {
                dup = true;
                break;
            }
        if (!dup) cs.push_back(q);
    }
    if (cs.empty()) return base_area;

    // Boundary of W = base ∩ (∪ covers), every arc traversed CCW on its own circle.
    double covered = 0.0;

    AngularSet base_arcs;
    for (const auto& q : cs) {
        auto [mid, half] = circle_disk_span(center, base_radius, q, cover_radius);
        if (half >= std::numbers::pi) {
            base_arcs.full = true;
            break;
        }
        if (half > 0.0) base_arcs.add(mid - half, 2.0 * half);
    }
    base_arcs.normalize();
    covered += green_over(base_arcs, center.x, center.y, base_radius);

    for (std::size_t i = 0; i < cs.size(); ++i) {
        auto [mid_b, half_b] = circle_disk_span(cs[i], cover_radius, center, base_radius);
        AngularSet inside_base;
        if (half_b >= std::numbers::pi)
            inside_base.full = true;
        else if (half_b > 0.0)
            inside_base.add(mid_b - half_b, 2.0 * half_b);
        inside_base.normalize();
        if (!inside_base.full && inside_base.iv.empty()) continue;

        AngularSet inside_others;
        for (std::size_t j = 0; j < cs.size(); ++j) {
            if (j == i) continue;
            auto [mid, half] = circle_disk_span(cs[i], cover_radius, cs[j], cover_radius);
            if (half >= std::numbers::pi) {
                inside_others.full = true;
                break;
            }
            if (half > 0.0) inside_others.add(mid - half, 2.0 * half);
        }
        inside_others.normalize();
        if (inside_others.full) continue;

        AngularSet kept = inside_base.intersect(inside_others.complement());
        kept.normalize();
        covered += green_over(kept, cs[i].x, cs[i].y, cover_radius);
    }

    return std::max(0.0, base_area - covered);
}

double interval_free_length(double center, double base_radius, const std::vector<double>& covers,
                            double cover_radius) {
    if (base_radius <= 0.0) return 0.0;
    const double lo = center - base_radius, hi = center + base_radius;
    std::vector<std::pair<double, double>> iv;
    for (double y : covers) {
        const double a = std::max(lo, y - cover_radius), b = std::min(hi, y + cover_radius);
        if (a < b) iv.emplace_back(a, b);
    }
    std::sort(iv.begin(), iv.end());
    double covered = 0.0, cur = lo;
    for (auto& p : iv) {
        if (p.second <= cur) continue;
        covered += p.second - std::max(cur, p.first);
        cur = std::max(cur, p.second);
    }
    return (hi - lo) - covered;
}

double ball_free_volume_3d(const Point& center, double base_radius, const std::vector<Point>& covers,
                           double cover_radius, int log2_nodes) {
    if (base_radius <= 0.0) return 0.0;
    auto halton = [](int i, int b) {
        double f = 1.0, r = 0.0;
        while (i > 0) {
            f /= b;
            r += f * (i % b);
            i /= b;
        }
        return r;
    };
    const int n = 1 << log2_nodes;
    const double r2 = base_radius * base_radius;
    const double c2 = cover_radius * cover_radius;
    long kept = 0, free_cnt = 0;
    for (int i = 1; i <= n; ++i) {
        Point p;
        p[0] = center[0] + base_radius * (2.0 * halton(i, 2) - 1.0);
        p[1] = center[1] + base_radius * (2.0 * halton(i, 3) - 1.0);
        p[2] = center[2] + base_radius * (2.0 * halton(i, 5) - 1.0);
        if (squared_distance(p, center) > r2) continue;
        ++kept;
        bool covered = false;
        for (const auto& q : covers) {
            if (squared_distance(p, q) <= c2) {
                covered = true;
                break;
            }
        }
        if (!covered) ++free_cnt;
    }
    if (kept == 0) return 0.0;
    return ball_volume(3, base_radius) * static_cast<double>(free_cnt) / static_cast<double>(kept);
}

} // namespace gibbsgeom
