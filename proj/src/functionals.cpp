#include "gibbsgeom/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "gibbsgeom/grid_index.hpp"
#include "gibbsgeom/quadrature.hpp"

namespace gibbsgeom {

namespace {

double config_spacing(const PointConfig& cfg, const Window* window) {
    double vol = 1.0;
    if (window) {
        vol = window->volume();
    } else {
        for (int i = 0; i < cfg.dim; ++i) {
            double lo = 0.0, hi = 0.0;
            for (const auto& p : cfg.points) {
                lo = std::min(lo, p[i]);
                hi = std::max(hi, p[i]);
            }
            vol *= std::max(hi - lo, 1e-9);
        }
    }
    return std::pow(vol / std::max<double>(cfg.size(), 1), 1.0 / cfg.dim);
}

struct UnionFind {
    std::vector<int> parent, size;
    explicit UnionFind(std::size_t n) : parent(n), size(n, 1) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[static_cast<std::size_t>(a)] < size[static_cast<std::size_t>(b)]) std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
        size[static_cast<std::size_t>(a)] += size[static_cast<std::size_t>(b)];
    }
};

// Undirected k-nearest-neighbor edge set: {i,j} present when j is among the k
// nearest of i or vice versa; ties resolved by (distance, lexicographic coords).
std::vector<std::pair<int, int>> knn_edges(const PointConfig& cfg, int k, const Window* window) {
    const int n = static_cast<int>(cfg.size());
    std::vector<std::pair<int, int>> edges;
    if (n < 2) return edges;
    const int kk = std::min(k, n - 1);
    const auto index = GridIndex::build(cfg, std::max(config_spacing(cfg, window), 1e-9));
    std::vector<std::vector<int>> nn(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) nn[static_cast<std::size_t>(i)] = index.knn_query(cfg.points[static_cast<std::size_t>(i)], kk, i);
    for (int i = 0; i < n; ++i)
        for (int j : nn[static_cast<std::size_t>(i)]) {
            const int a = std::min(i, j), b = std::max(i, j);
            edges.emplace_back(a, b);
        }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

} // namespace

// ---------------------------------------------------------------- density table

TableDensity::TableDensity(int dim, int nodes_per_axis, std::vector<double> values)
    : dim_(dim), n_(nodes_per_axis), values_(std::move(values)) {
    std::size_t expect = 1;
    for (int i = 0; i < dim_; ++i) expect *= static_cast<std::size_t>(n_);
    if (n_ < 2 || values_.size() != expect)
        throw ValidationError("TableDensity: need nodes_per_axis^dim values with nodes_per_axis >= 2");
}

double TableDensity::operator()(const Point& q1) const {
    // Nodes sit at -1/2 + j/(n-1), multilinear interpolation in each axis.
    double w[kMaxDim][2];
    int base[kMaxDim];
    for (int a = 0; a < dim_; ++a) {
        double t = (std::clamp(q1[static_cast<std::size_t>(a)], -0.5, 0.5) + 0.5) * (n_ - 1);
        int j = std::min(static_cast<int>(std::floor(t)), n_ - 2);
        base[a] = j;
        const double f = t - j;
        w[a][0] = 1.0 - f;
        w[a][1] = f;
    }
    double acc = 0.0;
    const int corners = 1 << dim_;
    for (int c = 0; c < corners; ++c) {
        double ww = 1.0;
        std::size_t idx = 0, stride = 1;
        for (int a = 0; a < dim_; ++a) {
            const int bit = (c >> a) & 1;
            ww *= w[a][bit];
            idx += stride * static_cast<std::size_t>(base[a] + bit);
            stride *= static_cast<std::size_t>(n_);
        }
        acc += ww * values_[idx];
    }
    return acc;
}

// ---------------------------------------------------------------- RSA

RsaPackFunctional::RsaPackFunctional(int dim) : dim_(dim) {
    radius_ = std::pow(1.0 / ball_volume(dim, 1.0), 1.0 / dim);
}

FunctionalBatch RsaPackFunctional::evaluate(const PointConfig& cfg, const Window*) const {
    if (!cfg.has_marks() || cfg.marks.size() != cfg.size())
        throw ValidationError("rsa: arrival marks are required");
    FunctionalBatch out;
    out.values.assign(cfg.size(), 0.0);
    std::vector<int> order(cfg.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (cfg.marks[static_cast<std::size_t>(a)] != cfg.marks[static_cast<std::size_t>(b)])
            return cfg.marks[static_cast<std::size_t>(a)] < cfg.marks[static_cast<std::size_t>(b)];
        return lex_less(cfg.points[static_cast<std::size_t>(a)], cfg.points[static_cast<std::size_t>(b)]);
    });
    const double conflict = 2.0 * radius_;
    GridIndex packed(cfg.dim, conflict);
    for (int i : order) {
        bool overlap = false;
        packed.for_each_in_ball(cfg.points[static_cast<std::size_t>(i)], conflict, [&](int j) {
            if (distance(cfg.points[static_cast<std::size_t>(i)], packed.point(j)) < conflict) overlap = true;
        });
        if (!overlap) {
            out.values[static_cast<std::size_t>(i)] = 1.0;
            packed.insert(i, cfg.points[static_cast<std::size_t>(i)]);
        }
    }
    return out;
}

// ---------------------------------------------------------------- knn edge length

FunctionalBatch KnnEdgeLengthFunctional::evaluate(const PointConfig& cfg, const Window* window) const {
    FunctionalBatch out;
    out.values.assign(cfg.size(), 0.0);
    if (cfg.size() < 2) {
        out.degenerate = true;
        return out;
    }
    for (const auto& [i, j] : knn_edges(cfg, k_, window)) {
        const double len = distance(cfg.points[static_cast<std::size_t>(i)], cfg.points[static_cast<std::size_t>(j)]);
        out.values[static_cast<std::size_t>(i)] += 0.5 * len;
        out.values[static_cast<std::size_t>(j)] += 0.5 * len;
    }
    return out;
}

// ---------------------------------------------------------------- components

FunctionalBatch ComponentReciprocalFunctional::evaluate(const PointConfig& cfg, const Window* window) const {
    FunctionalBatch out;
    const std::size_t n = cfg.size();
    out.values.assign(n, 0.0);
    if (n == 0) return out;
    UnionFind uf(n);
    if (graph_ == ComponentGraph::KnnMutual) {
        for (const auto& [i, j] : knn_edges(cfg, k_, window)) uf.unite(i, j);
    } else {
        const auto index = GridIndex::build(cfg, std::max(radius_, 1e-9));
        for (std::size_t i = 0; i < n; ++i) {
            index.for_each_in_ball(cfg.points[i], radius_, [&](int j) {
                if (j > static_cast<int>(i)) uf.unite(static_cast<int>(i), j);
            });
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        out.values[i] = 1.0 / uf.size[static_cast<std::size_t>(uf.find(static_cast<int>(i)))];
    return out;
}

// ---------------------------------------------------------------- voronoi length

FunctionalBatch VoronoiEdgeLengthFunctional::evaluate(const PointConfig& cfg, const Window* window) const {
    if (cfg.dim != 2) throw ValidationError("voronoi_length: only d = 2 is supported");
    FunctionalBatch out;
    out.values.assign(cfg.size(), 0.0);
    if (cfg.size() < 2) return out;
    const auto index = GridIndex::build(cfg, std::max(config_spacing(cfg, window), 1e-9));
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        const auto cell = voronoi_cell_2d(cfg, static_cast<int>(i), &index, nullptr);
        out.values[i] = 0.5 * cell.finite_edge_length();
    }
    return out;
}

// ---------------------------------------------------------------- quantization

namespace {

void cell_interval_1d(const PointConfig& cfg, int i, const Window* window, double& left, double& right) {
    const double x = cfg.points[static_cast<std::size_t>(i)][0];
    double lo = window ? -window->half_width : -kInf;
    double hi = window ? window->half_width : kInf;
    for (std::size_t j = 0; j < cfg.size(); ++j) {
        if (static_cast<int>(j) == i) continue;
        const double y = cfg.points[j][0];
        const double mid = 0.5 * (x + y);
        if (y < x)
            lo = std::max(lo, mid);
        else if (y > x)
            hi = std::min(hi, mid);
        else
            throw DegenerateSiteError("quantization: duplicate site");
    }
    left = x - lo;
    right = hi - x;
}

// Iterate the fan triangles of a convex polygon around interior site x:
// fn(phi1, dphi, rmax(t)) with rmax the ray length at angle phi1 + t.
template <typename Fn>
void for_each_fan_sector(const ConvexPolygon& poly, const Point& x, Fn&& fn) {
    const std::size_t n = poly.vertices.size();
    if (n < 3) return;
    for (std::size_t e = 0; e < n; ++e) {
        const Vec2& a = poly.vertices[e];
        const Vec2& b = poly.vertices[(e + 1) % n];
        const double nx = b.y - a.y, ny = -(b.x - a.x);
        const double nlen = std::hypot(nx, ny);
        if (nlen < 1e-300) continue;
        const double h = (nx * (a.x - x[0]) + ny * (a.y - x[1])) / nlen;
        if (std::abs(h) < 1e-14) continue; // site on the edge line: zero-area sector
        const double phi1 = std::atan2(a.y - x[1], a.x - x[0]);
        double dphi = std::atan2(b.y - x[1], b.x - x[0]) - phi1;
        while (dphi <= -std::numbers::pi) dphi += 2.0 * std::numbers::pi;
        while (dphi > std::numbers::pi) dphi -= 2.0 * std::numbers::pi;
        if (std::abs(dphi) < 1e-15) continue;
        auto rmax = [phi1, nx, ny, nlen, h](double t) {
            const double th = phi1 + t;
            const double denom = (nx * std::cos(th) + ny * std::sin(th)) / nlen;
            if (std::abs(denom) < 1e-14) return 0.0;
            return std::abs(h / denom);
        };
        fn(phi1, dphi, rmax);
    }
}

} // namespace

double QuantizationFunctional::weighted_cell_integral(const PointConfig& cfg, int i,
                                                      const GridIndex* index, const Window* window,
                                                      double lambda_scale) const {
    const Point& x = cfg.points[static_cast<std::size_t>(i)];
    const bool weighted = h_ && !h_->constant() && lambda_scale > 0.0;
    auto hval = [&](const Point& p) {
        Point q;
        for (int a = 0; a < cfg.dim; ++a)
            q[static_cast<std::size_t>(a)] = p[static_cast<std::size_t>(a)] / lambda_scale;
        const double v = std::max((*h_)(q), h_floor_);
        if (!(v > 0.0))
            throw ValidationError("quantization: density vanishes at an evaluation point (enable the floor)");
        return v;
    };

    if (cfg.dim == 1) {
        double left = 0.0, right = 0.0;
        cell_interval_1d(cfg, i, window, left, right);
        if (!std::isfinite(left) || !std::isfinite(right))
            throw ValidationError("quantization: unbounded d=1 cell without a window");
        if (!weighted) return (std::pow(left, r_ + 1.0) + std::pow(right, r_ + 1.0)) / (r_ + 1.0);
        const double hx = hval(x);
        auto f = [&](double y) {
            Point p;
            p[0] = y;
            return std::pow(std::abs(y - x[0]), r_) * hval(p) / hx;
        };
        return adaptive_simpson(f, x[0] - left, x[0] + right, 1e-9);
    }

    if (cfg.dim == 2) {
        const auto cell = voronoi_cell_2d(cfg, i, index, window);
        if (!window && !cell.bounded)
            throw ValidationError("quantization: unbounded d=2 cell without a window");
        double total = 0.0;
        const double hx = weighted ? hval(x) : 1.0;
        for_each_fan_sector(cell.polygon, x, [&](double phi1, double dphi, auto rmax) {
            auto ang = [&](double t) {
                const double rm = rmax(t);
                if (!weighted) return std::pow(rm, r_ + 2.0) / (r_ + 2.0);
                const double th = phi1 + t;
                auto rad = [&](double s) {
                    const double rho = s * rm;
                    Point p;
                    p[0] = x[0] + rho * std::cos(th);
                    p[1] = x[1] + rho * std::sin(th);
                    return std::pow(rho, r_ + 1.0) * hval(p) / hx;
                };
                return rm * gauss_legendre_01(rad);
            };
            const double tol = weighted ? 1e-7 : 1e-9;
            const double seg = adaptive_simpson(ang, 0.0, std::abs(dphi), tol);
            total += dphi >= 0.0 ? seg : -seg;
        });
        return total;
    }

    // d = 3: radial quadrature over the halfspace intersection (bisectors plus
    // window planes); the angular resolution doubles until the relative change
    // drops below 1e-4.
    if (!window) throw ValidationError("quantization: d=3 requires a clipping window");
    struct Plane {
        Point n;
        double c;
    };
    std::vector<Plane> planes;
    for (std::size_t j = 0; j < cfg.size(); ++j) {
        if (static_cast<int>(j) == i) continue;
        const Point& y = cfg.points[j];
        if (y == x) throw DegenerateSiteError("quantization: duplicate site");
        Plane pl;
        pl.n = y - x;
        pl.c = 0.0;
        for (int a = 0; a < 3; ++a)
            pl.c += (y[static_cast<std::size_t>(a)] * y[static_cast<std::size_t>(a)] -
                     x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)]) *
                    0.5;
        planes.push_back(pl);
    }
    for (int a = 0; a < 3; ++a)
        for (double sgn : {1.0, -1.0}) {
            Plane pl;
            pl.n[static_cast<std::size_t>(a)] = sgn;
            pl.c = window->half_width;
            planes.push_back(pl);
        }
    auto ray_max = [&](const Point& dir) {
        double best = kInf;
        for (const auto& pl : planes) {
            double nd = 0.0, nxv = 0.0;
            for (int a = 0; a < 3; ++a) {
                nd += pl.n[static_cast<std::size_t>(a)] * dir[static_cast<std::size_t>(a)];
                nxv += pl.n[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
            }
            if (nd > 1e-14) best = std::min(best, (pl.c - nxv) / nd);
        }
        return std::max(best, 0.0);
    };
    const double hx = weighted ? hval(x) : 1.0;
    auto sphere_integral = [&](int nu, int nphi) {
        double acc = 0.0;
        for (int iu = 0; iu < nu; ++iu) {
            const double u = -1.0 + 2.0 * (iu + 0.5) / nu;
            const double st = std::sqrt(std::max(0.0, 1.0 - u * u));
            for (int ip = 0; ip < nphi; ++ip) {
                const double phi = 2.0 * std::numbers::pi * (ip + 0.5) / nphi;
                Point dir;
                dir[0] = st * std::cos(phi);
                dir[1] = st * std::sin(phi);
                dir[2] = u;
                const double rm = ray_max(dir);
                if (rm <= 0.0) continue;
                double cellv;
                if (!weighted) {
                    cellv = std::pow(rm, r_ + 3.0) / (r_ + 3.0);
                } else {
                    auto rad = [&](double s) {
                        const double rho = s * rm;
                        Point p;
                        for (int a = 0; a < 3; ++a)
                            p[static_cast<std::size_t>(a)] =
                                x[static_cast<std::size_t>(a)] + rho * dir[static_cast<std::size_t>(a)];
                        return std::pow(rho, r_ + 2.0) * hval(p) / hx;
                    };
                    cellv = rm * gauss_legendre_01(rad);
                }
                acc += cellv * (2.0 / nu) * (2.0 * std::numbers::pi / nphi);
            }
        }
        return acc;
    };
    double prev = sphere_integral(24, 48);
    for (int lvl = 1; lvl <= 4; ++lvl) {
        const double cur = sphere_integral(24 << lvl, 48 << lvl);
        if (std::abs(cur - prev) <= 1e-4 * (std::abs(cur) + 1e-300)) return cur;
        prev = cur;
    }
    return prev;
}

double QuantizationFunctional::cell_integral(const PointConfig& cfg, int i, const GridIndex* index,
                                             const Window* window) const {
    QuantizationFunctional plain(r_, nullptr, 0.0);
    return plain.weighted_cell_integral(cfg, i, index, window, 0.0);
}

FunctionalBatch QuantizationFunctional::evaluate(const PointConfig& cfg, const Window* window) const {
    FunctionalBatch out;
    out.values.assign(cfg.size(), 0.0);
    if (cfg.size() == 0) return out;
    const bool weighted = h_ && !h_->constant();
    if (weighted) out.perturbation.assign(cfg.size(), 0.0);
    const double lambda_scale = window ? window->side() : 1.0;

    std::unique_ptr<GridIndex> index;
    if (cfg.dim == 2)
        index = std::make_unique<GridIndex>(
            GridIndex::build(cfg, std::max(config_spacing(cfg, window), 1e-9)));

    for (std::size_t i = 0; i < cfg.size(); ++i) {
        const double plain = cell_integral(cfg, static_cast<int>(i), index.get(), window);
        if (!weighted) {
            out.values[i] = plain;
        } else {
            const double hat =
                weighted_cell_integral(cfg, static_cast<int>(i), index.get(), window, lambda_scale);
            out.values[i] = hat;
            out.perturbation[i] = hat - plain;
        }
    }
    return out;
}

// ---------------------------------------------------------------- stabilization

std::vector<Point> battery_shell(const Point& x, double radius, int dim) {
    std::vector<Point> pts;
    if (dim == 1) {
        pts.push_back(make_point(x[0] - radius));
        pts.push_back(make_point(x[0] + radius));
        return pts;
    }
    if (dim == 2) {
        const int n = 24;
        for (int i = 0; i < n; ++i) {
            const double th = 2.0 * std::numbers::pi * i / n;
            pts.push_back(make_point(x[0] + radius * std::cos(th), x[1] + radius * std::sin(th)));
        }
        return pts;
    }
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
            for (int c = -1; c <= 1; ++c) {
                if (a == 0 && b == 0 && c == 0) continue;
                const double norm = std::sqrt(static_cast<double>(a * a + b * b + c * c));
                pts.push_back(make_point(x[0] + radius * a / norm, x[1] + radius * b / norm,
                                         x[2] + radius * c / norm));
            }
    return pts;
}

StabilizationProbe stabilization_probe(const Functional& f, const PointConfig& cfg, std::size_t x_index,
                                       std::vector<double> radii, const ProbeBattery& battery) {
    if (x_index >= cfg.size()) throw ValidationError("stabilization_probe: index out of range");
    std::sort(radii.begin(), radii.end());
    StabilizationProbe probe;
    probe.x = cfg.points[x_index];
    probe.radii = radii;
    const Point& x = probe.x;
    const bool marked = f.requires_marks();

    for (double R : radii) {
        // Restriction X ∩ B_R(x), tracking where x lands.
        PointConfig local;
        local.dim = cfg.dim;
        std::size_t x_local = 0;
        for (std::size_t j = 0; j < cfg.size(); ++j) {
            if (distance(cfg.points[j], x) > R && j != x_index) continue;
            if (j == x_index) x_local = local.size();
            local.points.push_back(cfg.points[j]);
            if (marked) local.marks.push_back(cfg.has_marks() ? cfg.marks[j] : 0.5);
        }
        const double base = f.evaluate(local, nullptr).values.at(x_local);

        std::vector<std::vector<Point>> insertions;
        if (battery.include_empty) insertions.push_back({});
        for (double fac : battery.shell_factors) insertions.push_back(battery_shell(x, R * fac, cfg.dim));
        for (double fac : battery.far_factors) {
            Point p = x;
            p[0] += R * fac;
            insertions.push_back({p});
        }

        bool stable = true;
        for (const auto& ins : insertions) {
            PointConfig probe_cfg = local;
            for (const auto& p : ins) {
                probe_cfg.points.push_back(p);
                // Adversarial earliest arrival for marked functionals.
                if (marked) probe_cfg.marks.push_back(-1.0);
            }
            const double v = f.evaluate(probe_cfg, nullptr).values.at(x_local);
            if (std::abs(v - base) > 1e-12 * std::max(1.0, std::abs(base))) {
                stable = false;
                break;
            }
        }
        if (stable) {
            probe.stabilized_at = R;
            probe.found = true;
            return probe;
        }
    }
    return probe;
}

} // namespace gibbsgeom
