#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace piezoskin {

using Vec2 = Eigen::Vector2d;
using Polyline = std::vector<Vec2>;

// Simple planar polygon, coordinates in mm. The edge from the last vertex back
// to the first is implicit. Valid polygons are simple and wound CCW.
struct Polygon {
    std::vector<Vec2> pts;

    Polygon() = default;
    explicit Polygon(std::vector<Vec2> p) : pts(std::move(p)) {}

    static Polygon rect(double x0, double y0, double x1, double y1);

    std::size_t size() const { return pts.size(); }
    const Vec2& operator[](std::size_t i) const { return pts[i]; }
    Vec2& operator[](std::size_t i) { return pts[i]; }
};

// Planar region bounded by one outer polygon minus any number of holes.
// Holes are stored CCW like every other polygon here.
struct Region {
    Polygon outer;
    std::vector<Polygon> holes;

    Region() = default;
    explicit Region(Polygon o) : outer(std::move(o)) {}
    Region(Polygon o, std::vector<Polygon> h) : outer(std::move(o)), holes(std::move(h)) {}
};

struct BBox {
    Vec2 min{0.0, 0.0};
    Vec2 max{0.0, 0.0};

    double width() const { return max.x() - min.x(); }
    double height() const { return max.y() - min.y(); }
    Vec2 center() const { return 0.5 * (min + max); }
};

// Shoelace area, CCW positive.
double signed_area(const Polygon& poly);
double polygon_area(const Polygon& poly);  // |signed_area|
double region_area(const Region& region);  // outer minus holes

double polyline_length(const Polyline& path);

bool is_ccw(const Polygon& poly);
// No repeated vertices, no degenerate edges, no edge/edge crossings.
bool is_simple(const Polygon& poly);

BBox bounding_box(const Polygon& poly);
BBox bounding_box(const Region& region);

Vec2 polygon_centroid(const Polygon& poly);

// Boundary points count as contained (within tol).
bool contains(const Polygon& poly, const Vec2& p, double tol = 1e-9);
bool contains(const Region& region, const Vec2& p, double tol = 1e-9);

// Unsigned distance from p to the polygon boundary.
double boundary_distance(const Polygon& poly, const Vec2& p);
double boundary_distance(const Region& region, const Vec2& p);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);
double segment_segment_distance(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1);

// Miter offset of a simple CCW polygon. distance > 0 insets (erodes), < 0
// grows. Returns an empty vector when the offset collapses the region or
// exceeds the local feature size (the result would self-intersect). Offsets
// that would split the region into several pieces are treated as collapsed;
// supported offsets stay below the local feature size.
std::vector<Polygon> offset_polygon(const Polygon& poly, double distance);

// Parts of the polyline inside the region. Sub-paths shorter than min_length
// are dropped. Consecutive duplicate points are never emitted.
std::vector<Polyline> clip_polyline(const Polyline& path, const Region& region,
                                    double min_length = 0.0);

struct Chain {
    Polyline pts;
    bool closed = false;
};

// Join a set of segments (each drawn exactly once) into maximal polylines.
// Endpoints are snapped to a grid of snap_tol. Deterministic for any input
// order: segments are canonicalized and sorted before walking.
std::vector<Chain> chain_segments(std::vector<std::pair<Vec2, Vec2>> segments,
                                  double snap_tol = 1e-6);

}  // namespace piezoskin
