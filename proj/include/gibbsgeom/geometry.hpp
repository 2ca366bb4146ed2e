#pragma once

#include <optional>
#include <vector>

#include "gibbsgeom/grid_index.hpp"
#include "gibbsgeom/point.hpp"

namespace gibbsgeom {

// Volume of the radius-r ball in R^d.
double ball_volume(int dim, double r);

struct Vec2 {
    double x = 0.0, y = 0.0;
};

// Closed half-plane {p : n.p <= c}.
struct HalfPlane {
    Vec2 n;
    double c = 0.0;
};

// Convex polygon, counter-clockwise vertex order. `on_frame` marks vertices
// that lie on the large clipping frame standing in for infinity.
struct ConvexPolygon {
    std::vector<Vec2> vertices;
    std::vector<bool> on_frame;

    double area() const;
    bool empty() const { return vertices.size() < 3; }
};

ConvexPolygon clip(const ConvexPolygon& poly, const HalfPlane& h, bool frame_cut = false);

struct VoronoiCell {
    Point site;
    ConvexPolygon polygon;
    bool bounded = false;

    // Total length of the finite edges (both endpoints off the frame).
    double finite_edge_length() const;
    double clipped_area() const { return polygon.area(); }
};

// Cell of cfg.points[site] in the planar Voronoi diagram of cfg, built by
// half-plane intersection against all bisectors. `clip_window`, when given,
// additionally intersects with the window (the result is then fully bounded).
// Neighbor pruning is exact: a site farther than twice the current cell radius
// cannot cut the cell.
VoronoiCell voronoi_cell_2d(const PointConfig& cfg, int site, const GridIndex* index = nullptr,
                            const Window* clip_window = nullptr);

// Area of B_base(center) \ union of B_r(y) for y in covers, exact circular-arc
// decomposition (Green's theorem over the boundary arcs).
double disk_free_area(const Vec2& center, double base_radius, const std::vector<Vec2>& covers,
                      double cover_radius);

// 1d analog: measure of [center-base, center+base] minus union of +-r intervals.
double interval_free_length(double center, double base_radius, const std::vector<double>& covers,
                            double cover_radius);

// 3d analog by a fixed Halton node set over the base ball (N nodes kept),
// deterministic, relative accuracy ~1e-3 for smooth overlaps.
double ball_free_volume_3d(const Point& center, double base_radius, const std::vector<Point>& covers,
                           double cover_radius, int log2_nodes = 14);

} // namespace gibbsgeom
