#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "asearch/rng.hpp"

namespace asearch {

using CellIndex = int;

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct GridCoord {
    int row = 0;
    int col = 0;
    friend bool operator==(const GridCoord&, const GridCoord&) = default;
};

// Row 0 is the northern edge of the bounding box; N decreases the row.
enum class Heading : std::uint8_t { N = 0, E = 1, S = 2, W = 3 };

inline constexpr Heading kAllHeadings[4] = {Heading::N, Heading::E, Heading::S, Heading::W};

GridCoord step(GridCoord c, Heading h, int n = 1);
const char* to_string(Heading h);
Heading heading_from_string(const std::string& s);

struct Pose {
    CellIndex cell = 0;
    Heading heading = Heading::N;
    friend bool operator==(const Pose&, const Pose&) = default;
};

class RegionError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

// Search area rasterized onto a grid aligned with the polygon's bounding box.
// Immutable after construction.
class SearchRegion {
   public:
    // Marker for cells no ground agent can enter.
    static constexpr double kImpassable = -1.0;

    // costmap is row-major rows*cols; kImpassable (or any negative value)
    // marks a blocked cell. An empty costmap means uniform unit cost.
    static SearchRegion build(std::vector<Point2> polygon, double cell_size_m,
                              std::vector<double> costmap = {});

    // Grid dimensions implied by a polygon's bounding box.
    static GridCoord grid_shape(std::span<const Point2> polygon, double cell_size_m);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int size() const { return rows_ * cols_; }
    double cell_size() const { return cell_size_; }
    const std::vector<Point2>& polygon() const { return polygon_; }

    CellIndex index(GridCoord c) const { return c.row * cols_ + c.col; }
    GridCoord coord(CellIndex m) const { return {m / cols_, m % cols_}; }
    bool on_grid(GridCoord c) const {
        return c.row >= 0 && c.row < rows_ && c.col >= 0 && c.col < cols_;
    }
    bool valid_index(CellIndex m) const { return m >= 0 && m < size(); }

    bool in_region(CellIndex m) const { return in_region_[static_cast<std::size_t>(m)] != 0; }
    bool passable(CellIndex m) const { return cost_[static_cast<std::size_t>(m)] >= 0.0; }
    bool standable(CellIndex m) const { return in_region(m) && passable(m); }
    double traversal_cost(CellIndex m) const { return cost_[static_cast<std::size_t>(m)]; }

    Point2 center(CellIndex m) const;
    double center_distance(CellIndex a, CellIndex b) const;

    // In-region cells in increasing index order.
    const std::vector<CellIndex>& region_cells() const { return region_cells_; }

   private:
    std::vector<Point2> polygon_;
    double cell_size_ = 30.0;
    double origin_x_ = 0.0;
    double top_y_ = 0.0;
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> cost_;
    std::vector<std::uint8_t> in_region_;
    std::vector<CellIndex> region_cells_;
};

double polygon_area(std::span<const Point2> polygon);
bool point_in_polygon(Point2 p, std::span<const Point2> polygon);

struct Path {
    std::vector<CellIndex> cells;  // from..to inclusive
    double cost = 0.0;
    double length_m = 0.0;
};

// Single-source shortest paths over standable cells, 4-connected. Entering a
// cell costs traversal_cost * cell_size.
class CostField {
   public:
    static CostField compute(const SearchRegion& region, CellIndex from);

    CellIndex source() const { return source_; }
    bool reachable(CellIndex m) const;
    double cost(CellIndex m) const { return cost_[static_cast<std::size_t>(m)]; }
    int steps(CellIndex m) const { return steps_[static_cast<std::size_t>(m)]; }
    std::optional<Path> path_to(const SearchRegion& region, CellIndex to) const;

   private:
    CellIndex source_ = 0;
    std::vector<double> cost_;
    std::vector<int> steps_;
    std::vector<CellIndex> parent_;
};

// Minimal-cost path, or nullopt when `to` is unreachable.
std::optional<Path> traversal_path(const SearchRegion& region, CellIndex from, CellIndex to);

struct GroundTruth {
    std::vector<double> beta;           // 0/1 per cell
    std::vector<CellIndex> ooi_cells;   // sorted

    bool is_ooi(CellIndex m) const { return beta[static_cast<std::size_t>(m)] != 0.0; }
};

GroundTruth place_oois(const SearchRegion& region, int count, Rng& rng);
GroundTruth truth_from_cells(const SearchRegion& region, std::vector<CellIndex> cells);

}  // namespace asearch
