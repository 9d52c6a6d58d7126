#include "asearch/grid_world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

namespace asearch {

GridCoord step(GridCoord c, Heading h, int n) {
    switch (h) {
        case Heading::N: return {c.row - n, c.col};
        case Heading::E: return {c.row, c.col + n};
        case Heading::S: return {c.row + n, c.col};
        case Heading::W: return {c.row, c.col - n};
    }
    return c;
}

const char* to_string(Heading h) {
    switch (h) {
        case Heading::N: return "N";
        case Heading::E: return "E";
        case Heading::S: return "S";
        case Heading::W: return "W";
    }
    return "?";
}

Heading heading_from_string(const std::string& s) {
    if (s == "N") return Heading::N;
    if (s == "E") return Heading::E;
    if (s == "S") return Heading::S;
    if (s == "W") return Heading::W;
    throw std::invalid_argument("unknown heading '" + s + "'");
}

double polygon_area(std::span<const Point2> polygon) {
    double twice = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const auto& a = polygon[i];
        const auto& b = polygon[(i + 1) % polygon.size()];
        twice += a.x * b.y - b.x * a.y;
    }
    return std::abs(twice) * 0.5;
}

// Even-odd ray casting.
bool point_in_polygon(Point2 p, std::span<const Point2> polygon) {
    bool inside = false;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto& a = polygon[i];
        const auto& b = polygon[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

namespace {

struct Bounds {
    double min_x, max_x, min_y, max_y;
};

Bounds bounds_of(std::span<const Point2> polygon) {
    Bounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : polygon) {
        b.min_x = std::min(b.min_x, p.x);
        b.max_x = std::max(b.max_x, p.x);
        b.min_y = std::min(b.min_y, p.y);
        b.max_y = std::max(b.max_y, p.y);
    }
    return b;
}

int cells_spanning(double extent, double cell) {
    return std::max(1, static_cast<int>(std::ceil(extent / cell - 1e-9)));
}

}  // namespace

GridCoord SearchRegion::grid_shape(std::span<const Point2> polygon, double cell_size_m) {
    if (polygon.size() < 3) throw RegionError("degenerate polygon: fewer than 3 vertices");
    if (!(cell_size_m > 0.0)) throw RegionError("cell size must be positive");
    const Bounds b = bounds_of(polygon);
    return {cells_spanning(b.max_y - b.min_y, cell_size_m),
            cells_spanning(b.max_x - b.min_x, cell_size_m)};
}

SearchRegion SearchRegion::build(std::vector<Point2> polygon, double cell_size_m,
                                 std::vector<double> costmap) {
    if (polygon.size() < 3) throw RegionError("degenerate polygon: fewer than 3 vertices");
    if (!(cell_size_m > 0.0) || !std::isfinite(cell_size_m))
        throw RegionError("cell size must be positive");
    for (const auto& p : polygon)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw RegionError("polygon vertex is not finite");
    if (polygon_area(polygon) <= 0.0) throw RegionError("degenerate polygon: zero area");

    SearchRegion r;
    const GridCoord shape = grid_shape(polygon, cell_size_m);
    const Bounds b = bounds_of(polygon);
    r.polygon_ = std::move(polygon);
    r.cell_size_ = cell_size_m;
    r.origin_x_ = b.min_x;
    r.top_y_ = b.max_y;
    r.rows_ = shape.row;
    r.cols_ = shape.col;

    const auto m_total = static_cast<std::size_t>(r.size());
    if (costmap.empty()) {
        r.cost_.assign(m_total, 1.0);
    } else {
        if (costmap.size() != m_total)
            throw RegionError("costmap has " + std::to_string(costmap.size()) +
                              " entries, grid needs " + std::to_string(m_total) + " (" +
                              std::to_string(r.rows_) + "x" + std::to_string(r.cols_) + ")");
        for (auto& c : costmap) {
            if (std::isnan(c)) throw RegionError("costmap entry is NaN");
            if (c < 0.0 || std::isinf(c)) c = kImpassable;
        }
        r.cost_ = std::move(costmap);
    }

    r.in_region_.assign(m_total, 0);
    for (CellIndex m = 0; m < r.size(); ++m) {
        if (point_in_polygon(r.center(m), r.polygon_)) {
            r.in_region_[static_cast<std::size_t>(m)] = 1;
            r.region_cells_.push_back(m);
        }
    }
    return r;
}

Point2 SearchRegion::center(CellIndex m) const {
    const GridCoord c = coord(m);
    return {origin_x_ + (c.col + 0.5) * cell_size_, top_y_ - (c.row + 0.5) * cell_size_};
}

double SearchRegion::center_distance(CellIndex a, CellIndex b) const {
    const GridCoord ca = coord(a);
    const GridCoord cb = coord(b);
    return std::hypot(static_cast<double>(ca.row - cb.row), static_cast<double>(ca.col - cb.col)) *
           cell_size_;
}

bool CostField::reachable(CellIndex m) const {
    return m >= 0 && static_cast<std::size_t>(m) < cost_.size() &&
           std::isfinite(cost_[static_cast<std::size_t>(m)]);
}

CostField CostField::compute(const SearchRegion& region, CellIndex from) {
    CostField f;
    f.source_ = from;
    const auto n = static_cast<std::size_t>(region.size());
    f.cost_.assign(n, std::numeric_limits<double>::infinity());
    f.steps_.assign(n, -1);
    f.parent_.assign(n, -1);
    if (!region.valid_index(from) || !region.standable(from)) return f;

    using Entry = std::tuple<double, CellIndex>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    f.cost_[static_cast<std::size_t>(from)] = 0.0;
    f.steps_[static_cast<std::size_t>(from)] = 0;
    open.emplace(0.0, from);
    std::vector<std::uint8_t> closed(n, 0);

    while (!open.empty()) {
        const auto [c, m] = open.top();
        open.pop();
        if (closed[static_cast<std::size_t>(m)]) continue;
        closed[static_cast<std::size_t>(m)] = 1;
        const GridCoord here = region.coord(m);
        // Neighbours in increasing index order: N, W, E, S.
        for (Heading h : {Heading::N, Heading::W, Heading::E, Heading::S}) {
            const GridCoord nc = step(here, h);
            if (!region.on_grid(nc)) continue;
            const CellIndex nb = region.index(nc);
            if (!region.standable(nb) || closed[static_cast<std::size_t>(nb)]) continue;
            const double nc_cost = c + region.traversal_cost(nb) * region.cell_size();
            auto& best = f.cost_[static_cast<std::size_t>(nb)];
            if (nc_cost < best) {
                best = nc_cost;
                f.parent_[static_cast<std::size_t>(nb)] = m;
                f.steps_[static_cast<std::size_t>(nb)] = f.steps_[static_cast<std::size_t>(m)] + 1;
                open.emplace(nc_cost, nb);
            }
        }
    }
    return f;
}

std::optional<Path> CostField::path_to(const SearchRegion& region, CellIndex to) const {
    if (!reachable(to)) return std::nullopt;
    Path p;
    for (CellIndex m = to; m != -1; m = parent_[static_cast<std::size_t>(m)]) p.cells.push_back(m);
    std::reverse(p.cells.begin(), p.cells.end());
    p.cost = cost(to);
    p.length_m = static_cast<double>(p.cells.size() - 1) * region.cell_size();
    return p;
}

std::optional<Path> traversal_path(const SearchRegion& region, CellIndex from, CellIndex to) {
    if (!region.valid_index(from) || !region.valid_index(to)) return std::nullopt;
    if (!region.standable(from) || !region.standable(to)) return std::nullopt;
    if (from == to) return Path{{from}, 0.0, 0.0};
    return CostField::compute(region, from).path_to(region, to);
}

GroundTruth truth_from_cells(const SearchRegion& region, std::vector<CellIndex> cells) {
    GroundTruth t;
    t.beta.assign(static_cast<std::size_t>(region.size()), 0.0);
    std::sort(cells.begin(), cells.end());
    if (std::adjacent_find(cells.begin(), cells.end()) != cells.end())
        throw RegionError("duplicate OOI cell");
    for (CellIndex m : cells) {
        if (!region.valid_index(m) || !region.in_region(m))
            throw RegionError("OOI cell " + std::to_string(m) + " is outside the search region");
        t.beta[static_cast<std::size_t>(m)] = 1.0;
    }
    t.ooi_cells = std::move(cells);
    return t;
}

GroundTruth place_oois(const SearchRegion& region, int count, Rng& rng) {
    const auto& pool_src = region.region_cells();
    if (count < 0 || static_cast<std::size_t>(count) > pool_src.size())
        throw RegionError("cannot place " + std::to_string(count) + " OOIs in " +
                          std::to_string(pool_src.size()) + " in-region cells");
    // Partial Fisher-Yates over the in-region cells.
    std::vector<CellIndex> pool = pool_src;
    for (int i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i),
                                                        pool.size() - 1);
        std::swap(pool[static_cast<std::size_t>(i)], pool[pick(rng)]);
    }
    pool.resize(static_cast<std::size_t>(count));
    return truth_from_cells(region, std::move(pool));
}

}  // namespace asearch
