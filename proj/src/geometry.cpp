#include "piezoskin/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace piezoskin {

namespace {

constexpr double kCoincident = 1e-9;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Orientation of c relative to the directed segment a->b.
double orient(const Vec2& a, const Vec2& b, const Vec2& c) { return cross2(b - a, c - a); }

bool on_segment_collinear(const Vec2& a, const Vec2& b, const Vec2& p) {
    return p.x() >= std::min(a.x(), b.x()) - kCoincident && p.x() <= std::max(a.x(), b.x()) + kCoincident &&
           p.y() >= std::min(a.y(), b.y()) - kCoincident && p.y() <= std::max(a.y(), b.y()) + kCoincident;
}

bool segments_intersect(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
    const double d1 = orient(b0, b1, a0);
    const double d2 = orient(b0, b1, a1);
    const double d3 = orient(a0, a1, b0);
    const double d4 = orient(a0, a1, b1);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (std::abs(d1) <= kCoincident && on_segment_collinear(b0, b1, a0)) return true;
    if (std::abs(d2) <= kCoincident && on_segment_collinear(b0, b1, a1)) return true;
    if (std::abs(d3) <= kCoincident && on_segment_collinear(a0, a1, b0)) return true;
    if (std::abs(d4) <= kCoincident && on_segment_collinear(a0, a1, b1)) return true;
    return false;
}

}  // namespace

Polygon Polygon::rect(double x0, double y0, double x1, double y1) {
    Polygon p;
    p.pts = {Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)};
    return p;
}

double signed_area(const Polygon& poly) {
    const auto& v = poly.pts;
    const std::size_t n = v.size();
    if (n < 3) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) acc += cross2(v[j], v[i]);
    return 0.5 * acc;
}

double polygon_area(const Polygon& poly) { return std::abs(signed_area(poly)); }

double region_area(const Region& region) {
    double a = polygon_area(region.outer);
    for (const Polygon& h : region.holes) a -= polygon_area(h);
    return a;
}

double polyline_length(const Polyline& path) {
    double len = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) len += (path[i] - path[i - 1]).norm();
    return len;
}

bool is_ccw(const Polygon& poly) { return signed_area(poly) > 0.0; }

bool is_simple(const Polygon& poly) {
    const auto& v = poly.pts;
    const std::size_t n = v.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        if ((v[(i + 1) % n] - v[i]).norm() <= kCoincident) return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a0 = v[i];
        const Vec2& a1 = v[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            const Vec2& b0 = v[j];
            const Vec2& b1 = v[(j + 1) % n];
            if (adjacent) {
                // Shared endpoint allowed; anything more means a spike or overlap.
                const Vec2& shared = (j == i + 1) ? a1 : a0;
                const Vec2& afree = (j == i + 1) ? a0 : a1;
                const Vec2& bfree = (j == i + 1) ? b1 : b0;
                if (std::abs(orient(shared, afree, bfree)) <= kCoincident &&
                    (afree - shared).dot(bfree - shared) > 0.0)
                    return false;
                continue;
            }
            if (segments_intersect(a0, a1, b0, b1)) return false;
        }
    }
    return true;
}

BBox bounding_box(const Polygon& poly) {
    BBox box;
    if (poly.pts.empty()) return box;
    box.min = box.max = poly.pts[0];
    for (const Vec2& p : poly.pts) {
        box.min = box.min.cwiseMin(p);
        box.max = box.max.cwiseMax(p);
    }
    return box;
}

BBox bounding_box(const Region& region) { return bounding_box(region.outer); }

Vec2 polygon_centroid(const Polygon& poly) {
    const auto& v = poly.pts;
    const std::size_t n = v.size();
    double a = 0.0;
    Vec2 c(0.0, 0.0);
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double w = cross2(v[j], v[i]);
        a += w;
        c += (v[j] + v[i]) * w;
    }
    if (std::abs(a) < 1e-12) {
        Vec2 mean(0.0, 0.0);
        for (const Vec2& p : v) mean += p;
        return v.empty() ? mean : Vec2(mean / double(n));
    }
    return c / (3.0 * a);
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 <= kCoincident * kCoincident) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

double segment_segment_distance(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
    if (segments_intersect(a0, a1, b0, b1)) return 0.0;
    return std::min(std::min(point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1)),
                    std::min(point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)));
}

double boundary_distance(const Polygon& poly, const Vec2& p) {
    const auto& v = poly.pts;
    const std::size_t n = v.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        best = std::min(best, point_segment_distance(p, v[j], v[i]));
    return best;
}

double boundary_distance(const Region& region, const Vec2& p) {
    double best = boundary_distance(region.outer, p);
    for (const Polygon& h : region.holes) best = std::min(best, boundary_distance(h, p));
    return best;
}

bool contains(const Polygon& poly, const Vec2& p, double tol) {
    const auto& v = poly.pts;
    const std::size_t n = v.size();
    if (n < 3) return false;
    if (boundary_distance(poly, p) <= tol) return true;
    // Crossing-number ray cast along +x.
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = v[j];
        const Vec2& b = v[i];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x_at = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
            if (x_at > p.x()) inside = !inside;
        }
    }
    return inside;
}

bool contains(const Region& region, const Vec2& p, double tol) {
    if (!contains(region.outer, p, tol)) return false;
    for (const Polygon& h : region.holes) {
        // On a hole boundary still counts as inside the region.
        if (boundary_distance(h, p) <= tol) return true;
        if (contains(h, p, 0.0)) return false;
    }
    return true;
}

std::vector<Polygon> offset_polygon(const Polygon& poly, double distance) {
    const auto& v = poly.pts;
    const std::size_t n = v.size();
    if (n < 3) return {};
    if (std::abs(distance) < kCoincident) return {poly};

    Polygon out;
    out.pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& prev = v[(i + n - 1) % n];
        const Vec2& cur = v[i];
        const Vec2& next = v[(i + 1) % n];
        const Vec2 t0 = (cur - prev).normalized();
        const Vec2 t1 = (next - cur).normalized();
        // Interior is to the left of CCW edges; inward normal for inset.
        const Vec2 n0(-t0.y(), t0.x());
        const Vec2 n1(-t1.y(), t1.x());
        const Vec2 p0 = cur + n0 * distance;
        const Vec2 p1 = cur + n1 * distance;
        const double denom = cross2(t0, t1);
        if (std::abs(denom) < 1e-12) {
            out.pts.push_back(0.5 * (p0 + p1));
        } else {
            // Intersection of the two offset edge lines (miter join).
            const double s = cross2(p1 - p0, t1) / denom;
            out.pts.push_back(p0 + s * t0);
        }
    }

    if (signed_area(out) <= kCoincident || !is_simple(out)) return {};
    if (distance > 0.0) {
        if (polygon_area(out) >= polygon_area(poly)) return {};
        const double want = distance * (1.0 - 1e-6) - kCoincident;
        for (const Vec2& p : out.pts) {
            if (!contains(poly, p) || boundary_distance(poly, p) < want) return {};
        }
    }
    return {out};
}

std::vector<Polyline> clip_polyline(const Polyline& path, const Region& region, double min_length) {
    std::vector<Polyline> result;
    Polyline current;

    auto flush = [&]() {
        if (current.size() >= 2 && polyline_length(current) >= std::max(min_length, kCoincident))
            result.push_back(current);
        current.clear();
    };
    auto append = [&](const Vec2& p) {
        if (!current.empty() && (current.back() - p).norm() <= kCoincident) return;
        current.push_back(p);
    };

    std::vector<const Polygon*> rings;
    rings.push_back(&region.outer);
    for (const Polygon& h : region.holes) rings.push_back(&h);

    std::vector<double> cuts;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const Vec2 a = path[i - 1];
        const Vec2 b = path[i];
        const Vec2 d = b - a;
        const double seg_len = d.norm();
        if (seg_len <= kCoincident) continue;

        cuts.clear();
        cuts.push_back(0.0);
        cuts.push_back(1.0);
        for (const Polygon* ring : rings) {
            const auto& v = ring->pts;
            const std::size_t n = v.size();
            for (std::size_t k = 0, j = n - 1; k < n; j = k++) {
                const Vec2 e = v[k] - v[j];
                const double denom = cross2(d, e);
                if (std::abs(denom) < 1e-15) continue;
                const double t = cross2(v[j] - a, e) / denom;
                const double u = cross2(v[j] - a, d) / denom;
                if (t > 0.0 && t < 1.0 && u >= -1e-12 && u <= 1.0 + 1e-12) cuts.push_back(t);
            }
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end(),
                               [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                   cuts.end());

        bool segment_continues = false;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double t0 = cuts[k];
            const double t1 = cuts[k + 1];
            const Vec2 mid = a + 0.5 * (t0 + t1) * d;
            if (contains(region, mid, 1e-9)) {
                const Vec2 p0 = a + t0 * d;
                const Vec2 p1 = a + t1 * d;
                if (!segment_continues) {
                    if (!(current.size() >= 1 && (current.back() - p0).norm() <= kCoincident)) flush();
                }
                append(p0);
                append(p1);
                segment_continues = true;
            } else {
                if (segment_continues || !current.empty()) flush();
                segment_continues = false;
            }
        }
        if (!segment_continues) flush();
    }
    flush();

    std::erase_if(result, [&](const Polyline& p) {
        return p.size() < 2 || polyline_length(p) < min_length;
    });
    return result;
}

std::vector<Chain> chain_segments(std::vector<std::pair<Vec2, Vec2>> segments, double snap_tol) {
    using Key = std::pair<long long, long long>;
    auto key_of = [&](const Vec2& p) -> Key {
        return {llround(p.x() / snap_tol), llround(p.y() / snap_tol)};
    };

    // Canonical segment order makes the walk independent of input order.
    for (auto& s : segments) {
        const Key ka = key_of(s.first);
        const Key kb = key_of(s.second);
        if (kb < ka) std::swap(s.first, s.second);
    }
    std::sort(segments.begin(), segments.end(), [&](const auto& s, const auto& t) {
        return std::make_pair(key_of(s.first), key_of(s.second)) <
               std::make_pair(key_of(t.first), key_of(t.second));
    });

    std::map<Key, std::vector<std::size_t>> incident;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        incident[key_of(segments[i].first)].push_back(i);
        incident[key_of(segments[i].second)].push_back(i);
    }

    std::vector<bool> used(segments.size(), false);
    std::vector<Chain> chains;

    auto walk = [&](std::size_t start, bool forward) {
        Chain chain;
        const Vec2 first = forward ? segments[start].first : segments[start].second;
        Vec2 cursor = forward ? segments[start].second : segments[start].first;
        chain.pts.push_back(first);
        chain.pts.push_back(cursor);
        used[start] = true;
        const Key first_key = key_of(first);
        while (true) {
            const Key k = key_of(cursor);
            std::size_t next = segments.size();
            for (std::size_t idx : incident[k]) {
                if (!used[idx]) {
                    next = idx;
                    break;
                }
            }
            if (next == segments.size()) break;
            used[next] = true;
            cursor = (key_of(segments[next].first) == k) ? segments[next].second : segments[next].first;
            chain.pts.push_back(cursor);
            if (key_of(cursor) == first_key) {
                chain.closed = true;
                chain.pts.pop_back();  // implicit closing edge
                break;
            }
        }
        chains.push_back(std::move(chain));
    };

    // Open chains first, seeded at odd-degree endpoints, then leftover cycles.
    std::map<Key, int> degree;
    for (const auto& s : segments) {
        degree[key_of(s.first)]++;
        degree[key_of(s.second)]++;
    }
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (used[i]) continue;
        const bool a_odd = degree[key_of(segments[i].first)] % 2 == 1;
        const bool b_odd = degree[key_of(segments[i].second)] % 2 == 1;
        if (a_odd)
            walk(i, true);
        else if (b_odd)
            walk(i, false);
    }
    for (std::size_t i = 0; i < segments.size(); ++i)
        if (!used[i]) walk(i, true);

    return chains;
}

}  // namespace piezoskin
