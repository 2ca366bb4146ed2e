#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "gibbsgeom/point.hpp"

namespace gibbsgeom {

// Uniform-grid spatial index over point ids. Built single-writer, then safe to
// share across concurrent readers; the sampler additionally uses the mutable
// insert/erase path while sweeping its (single-threaded) event timeline.
class GridIndex {
public:
    GridIndex(int dim, double cell_size);

    // Immutable bulk build; ids are indices into `points`.
    static GridIndex build(const PointConfig& cfg, double cell_size);

    void insert(int id, const Point& p);
    void erase(int id, const Point& p);

    std::size_t size() const { return count_; }
    double cell_size() const { return cell_; }

    // Ids of indexed points with |p - center| <= radius (closed ball, exact).
    std::vector<int> range_query(const Point& center, double radius) const;

    // The k nearest indexed points to x, excluding any point with id == exclude_id;
    // ordered by (distance, lexicographic coordinates). Throws
    // InsufficientPointsError when fewer than k candidates exist.
    std::vector<int> knn_query(const Point& x, int k, int exclude_id = -1) const;

    template <typename Fn>
    void for_each_in_ball(const Point& center, double radius, Fn&& fn) const;

    const Point& point(int id) const { return points_.at(static_cast<std::size_t>(id)); }

private:
    struct CellKey {
        std::int64_t k = 0;
    };

    std::int64_t cell_of(const Point& p) const;
    std::int64_t pack(std::int64_t ix, std::int64_t iy, std::int64_t iz) const;

    int dim_;
    double cell_;
    std::size_t count_ = 0;
    std::unordered_map<std::int64_t, std::vector<int>> buckets_;
    std::vector<Point> points_; // id -> position (grows as needed)
};

std::vector<int> brute_force_range(const std::vector<Point>& pts, const Point& center, double radius);
std::vector<int> brute_force_knn(const std::vector<Point>& pts, const Point& x, int k, int exclude_id = -1);

template <typename Fn>
void GridIndex::for_each_in_ball(const Point& center, double radius, Fn&& fn) const {
    const double inv = 1.0 / cell_;
    std::int64_t lo[kMaxDim] = {0, 0, 0}, hi[kMaxDim] = {0, 0, 0};
    for (int i = 0; i < dim_; ++i) {
        lo[i] = static_cast<std::int64_t>(std::floor((center[i] - radius) * inv));
        hi[i] = static_cast<std::int64_t>(std::floor((center[i] + radius) * inv));
    }
    const double r2 = radius * radius;
    for (std::int64_t ix = lo[0]; ix <= hi[0]; ++ix)
        for (std::int64_t iy = lo[1]; iy <= hi[1]; ++iy)
            for (std::int64_t iz = lo[2]; iz <= hi[2]; ++iz) {
                auto it = buckets_.find(pack(ix, iy, iz));
                if (it == buckets_.end()) continue;
                for (int id : it->second) {
                    if (squared_distance(points_[static_cast<std::size_t>(id)], center) <= r2) fn(id);
                }
            }
}

} // namespace gibbsgeom
