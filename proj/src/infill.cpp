#include "piezoskin/infill.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace piezoskin {

namespace {

constexpr double kMinSegment = 0.2;  // clipped fragments below this are unprintable noise
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Mean zero-set contour length per unit area of the unit-period gyroid,
// averaged over one vertical period (measured on this implementation).
constexpr double kGyroidUnitLength = 2.447;

// Chamfered-square cross-section: mean perimeter over one vertical period is
// (4 + 2*sqrt(2)) * h for half-size h.
constexpr double kChamferPerimeter = 4.0 + 2.0 * std::numbers::sqrt2;
constexpr double kThreeDHcHalfSizeRatio = 0.35;  // default h relative to the cell pitch

struct RawPattern {
    std::vector<Polyline> chains;
    std::vector<Polygon> loops;
};

double triangle_wave(double phase) {
    double f = phase - std::floor(phase);
    return f < 0.5 ? 2.0 * f : 2.0 * (1.0 - f);
}

void append_clipped(std::vector<Toolpath>& out, const Polyline& path, const Region& region,
                    double width, Material material) {
    for (Polyline& part : clip_polyline(path, region, kMinSegment)) {
        Toolpath tp;
        tp.points = std::move(part);
        tp.width = width;
        tp.material = material;
        out.push_back(std::move(tp));
    }
}

void append_loop(std::vector<Toolpath>& out, const Polygon& loop, const Region& region,
                 double width, Material material) {
    bool fully_inside = loop.size() >= 3;
    for (const Vec2& p : loop.pts)
        if (!contains(region, p, 1e-9)) fully_inside = false;
    if (fully_inside) {
        // Vertex containment is not enough for concave regions; check edges.
        const std::size_t n = loop.size();
        for (std::size_t i = 0, j = n - 1; i < n && fully_inside; j = i++)
            if (!contains(region, 0.5 * (loop[j] + loop[i]), 1e-9)) fully_inside = false;
    }
    if (fully_inside) {
        Toolpath tp;
        tp.points = loop.pts;
        tp.width = width;
        tp.material = material;
        tp.closed = true;
        out.push_back(std::move(tp));
        return;
    }
    Polyline opened = loop.pts;
    if (!opened.empty()) opened.push_back(opened.front());
    append_clipped(out, opened, region, width, material);
}

// Line family positions covering [lo, hi] at the given spacing, anchored to
// the world origin so identical requests reproduce exactly.
std::vector<double> family_positions(double lo, double hi, double spacing, double phase) {
    std::vector<double> xs;
    const long long k0 = llround(std::floor((lo - phase) / spacing)) - 1;
    const long long k1 = llround(std::ceil((hi - phase) / spacing)) + 1;
    for (long long k = k0; k <= k1; ++k) {
        const double x = k * spacing + phase;
        if (x >= lo - spacing * 0.5 && x <= hi + spacing * 0.5) xs.push_back(x);
    }
    return xs;
}

RawPattern grid_pattern(const BBox& box, double density, double width) {
    RawPattern raw;
    // Two perpendicular families share the density budget, so each family runs
    // at twice the single-family spacing.
    const double spacing = 2.0 * line_spacing(density, width);
    const double margin = spacing;
    for (double x : family_positions(box.min.x(), box.max.x(), spacing, spacing * 0.5))
        raw.chains.push_back({Vec2(x, box.min.y() - margin), Vec2(x, box.max.y() + margin)});
    for (double y : family_positions(box.min.y(), box.max.y(), spacing, spacing * 0.5))
        raw.chains.push_back({Vec2(box.min.x() - margin, y), Vec2(box.max.x() + margin, y)});
    return raw;
}

RawPattern honeycomb_pattern(const BBox& box, double side) {
    // Flat-top hexagons, each lattice edge drawn exactly once.
    RawPattern raw;
    const double col_pitch = 1.5 * side;
    const double row_pitch = std::numbers::sqrt3 * side;
    const long long q0 = llround(std::floor((box.min.x() - 2 * side) / col_pitch));
    const long long q1 = llround(std::ceil((box.max.x() + 2 * side) / col_pitch));
    const long long r0 = llround(std::floor((box.min.y() - 2 * side) / row_pitch));
    const long long r1 = llround(std::ceil((box.max.y() + 2 * side) / row_pitch));

    static const Vec2 kHex[6] = {Vec2(1.0, 0.0),
                                 Vec2(0.5, std::numbers::sqrt3 / 2.0),
                                 Vec2(-0.5, std::numbers::sqrt3 / 2.0),
                                 Vec2(-1.0, 0.0),
                                 Vec2(-0.5, -std::numbers::sqrt3 / 2.0),
                                 Vec2(0.5, -std::numbers::sqrt3 / 2.0)};

    const double snap = 1e-6;
    using Key = std::pair<long long, long long>;
    auto key_of = [&](const Vec2& p) -> Key {
        return {llround(p.x() / snap), llround(p.y() / snap)};
    };
    std::vector<std::pair<Key, Key>> seen;
    std::vector<std::pair<Vec2, Vec2>> segments;
    for (long long q = q0; q <= q1; ++q) {
        const double phase = (((q % 2) + 2) % 2) ? 0.5 : 0.0;
        for (long long r = r0; r <= r1; ++r) {
            const Vec2 center(col_pitch * q, row_pitch * (r + phase));
            for (int k = 0; k < 6; ++k) {
                Vec2 a = center + side * kHex[k];
                Vec2 b = center + side * kHex[(k + 1) % 6];
                Key ka = key_of(a);
                Key kb = key_of(b);
                if (kb < ka) {
                    std::swap(a, b);
                    std::swap(ka, kb);
                }
                const auto id = std::make_pair(ka, kb);
                if (std::find(seen.begin(), seen.end(), id) == seen.end()) {
                    seen.push_back(id);
                    segments.emplace_back(a, b);
                }
            }
        }
    }
    for (Chain& c : chain_segments(std::move(segments), snap)) {
        if (c.closed)
            raw.loops.push_back(Polygon(std::move(c.pts)));
        else
            raw.chains.push_back(std::move(c.pts));
    }
    return raw;
}

RawPattern threedhc_pattern(const BBox& box, double pitch, double half_size, double z) {
    // Checkerboard of chamfered squares morphing square -> octagon -> diamond
    // over one vertical period; neighbouring cells run half a period apart.
    RawPattern raw;
    const long long i0 = llround(std::floor(box.min.x() / pitch)) - 1;
    const long long i1 = llround(std::ceil(box.max.x() / pitch)) + 1;
    const long long j0 = llround(std::floor(box.min.y() / pitch)) - 1;
    const long long j1 = llround(std::ceil(box.max.y() / pitch)) + 1;
    for (long long i = i0; i <= i1; ++i) {
        for (long long j = j0; j <= j1; ++j) {
            const double parity = ((((i + j) % 2) + 2) % 2) ? 0.5 : 0.0;
            const double c = half_size * triangle_wave(z / pitch + parity);
            const Vec2 center((i + 0.5) * pitch, (j + 0.5) * pitch);
            const double h = half_size;
            const Vec2 corners[8] = {Vec2(h, h - c),  Vec2(h - c, h),     Vec2(-(h - c), h),
                                     Vec2(-h, h - c), Vec2(-h, -(h - c)), Vec2(-(h - c), -h),
                                     Vec2(h - c, -h), Vec2(h, -(h - c))};
            Polygon loop;
            for (const Vec2& d : corners) {
                const Vec2 p = center + d;
                if (loop.pts.empty() || (loop.pts.back() - p).norm() > 1e-9) loop.pts.push_back(p);
            }
            while (loop.pts.size() > 1 && (loop.pts.back() - loop.pts.front()).norm() <= 1e-9)
                loop.pts.pop_back();
            if (loop.pts.size() >= 3) raw.loops.push_back(std::move(loop));
        }
    }
    return raw;
}

RawPattern marching_squares(const BBox& box, double step,
                            const std::function<double(double, double)>& field) {
    RawPattern raw;
    const double x0 = std::floor((box.min.x() - step) / step) * step;
    const double y0 = std::floor((box.min.y() - step) / step) * step;
    const int nx = int(std::ceil((box.max.x() + step - x0) / step)) + 1;
    const int ny = int(std::ceil((box.max.y() + step - y0) / step)) + 1;

    std::vector<double> vals(std::size_t(nx) * std::size_t(ny));
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
            vals[std::size_t(iy) * nx + ix] = field(x0 + ix * step, y0 + iy * step);

    auto at = [&](int ix, int iy) { return vals[std::size_t(iy) * nx + ix]; };

    std::vector<std::pair<Vec2, Vec2>> segments;
    for (int iy = 0; iy + 1 < ny; ++iy) {
        for (int ix = 0; ix + 1 < nx; ++ix) {
            const double vx0 = x0 + ix * step;
            const double vy0 = y0 + iy * step;
            const double v[4] = {at(ix, iy), at(ix + 1, iy), at(ix + 1, iy + 1), at(ix, iy + 1)};
            const Vec2 corner[4] = {Vec2(vx0, vy0), Vec2(vx0 + step, vy0),
                                    Vec2(vx0 + step, vy0 + step), Vec2(vx0, vy0 + step)};
            Vec2 pts[4];
            int count = 0;
            for (int e = 0; e < 4; ++e) {
                const double a = v[e];
                const double b = v[(e + 1) % 4];
                if ((a > 0.0) == (b > 0.0)) continue;
                const double t = a / (a - b);
                pts[count++] = corner[e] + t * (corner[(e + 1) % 4] - corner[e]);
            }
            if (count == 2) {
                segments.emplace_back(pts[0], pts[1]);
            } else if (count == 4) {
                // Saddle cell: pair crossings by the sign at the cell center.
                const double center = field(vx0 + 0.5 * step, vy0 + 0.5 * step);
                if ((center > 0.0) == (v[0] > 0.0)) {
                    segments.emplace_back(pts[0], pts[1]);
                    segments.emplace_back(pts[2], pts[3]);
                } else {
                    segments.emplace_back(pts[3], pts[0]);
                    segments.emplace_back(pts[1], pts[2]);
                }
            }
        }
    }
    for (Chain& c : chain_segments(std::move(segments), 1e-7)) {
        if (c.closed)
            raw.loops.push_back(Polygon(std::move(c.pts)));
        else
            raw.chains.push_back(std::move(c.pts));
    }
    return raw;
}

RawPattern cubic_pattern(const BBox& box, double spacing, double z) {
    // Three line families 60 degrees apart whose offsets slide with z: the
    // planar section of corner-standing cubes. Vertical period = spacing.
    RawPattern raw;
    const double diag = (box.max - box.min).norm() + 2.0 * spacing;
    const Vec2 mid = box.center();
    const double slide[3] = {1.0, -1.0, 1.0};
    for (int f = 0; f < 3; ++f) {
        const double theta = f * std::numbers::pi / 3.0;
        const Vec2 u(std::cos(theta), std::sin(theta));
        const Vec2 n(-u.y(), u.x());
        const double phase = spacing * 0.5 + slide[f] * z;
        const double c_mid = n.dot(mid);
        const double u_mid = u.dot(mid);
        for (double c : family_positions(c_mid - diag * 0.5, c_mid + diag * 0.5, spacing, phase)) {
            const Vec2 base = c * n;
            raw.chains.push_back(
                {base + (u_mid - diag * 0.5) * u, base + (u_mid + diag * 0.5) * u});
        }
    }
    return raw;
}

RawPattern archimedean_pattern(const BBox& box, double pitch) {
    // Archimedean spiral r = b*theta; successive windings sit one pitch apart.
    RawPattern raw;
    const Vec2 center = box.center();
    const double b = pitch / kTwoPi;
    const double r_max = 0.5 * (box.max - box.min).norm() + pitch;
    Polyline spiral;
    spiral.push_back(center);
    double theta = 0.0;
    while (b * theta <= r_max) {
        const double r = b * theta;
        theta += std::clamp(0.3 / std::max(r, 0.15), 0.02, 0.6);
        spiral.push_back(center + b * theta * Vec2(std::cos(theta), std::sin(theta)));
    }
    raw.chains.push_back(std::move(spiral));
    return raw;
}

}  // namespace

double line_spacing(double density, double width) {
    if (!(density > 0.0 && density <= 1.0)) throw std::invalid_argument("density must be in (0, 1]");
    if (!(width > 0.0)) throw std::invalid_argument("width must be positive");
    return width / density;
}

std::vector<Polygon> offset_region(const Polygon& region, double distance) {
    return offset_polygon(region, distance);
}

std::vector<Toolpath> generate_walls(const Polygon& region, double wall_thickness, double width,
                                     Material material) {
    if (!(width > 0.0)) throw std::invalid_argument("width must be positive");
    const double k = wall_thickness / width;
    if (wall_thickness < 0.0 || std::abs(k - std::round(k)) > 1e-6)
        throw std::invalid_argument("wall thickness must be an integer multiple of the width");
    const int loops = int(std::llround(k));

    std::vector<Toolpath> out;
    for (int i = 0; i < loops; ++i) {
        auto inset = offset_polygon(region, (2 * i + 1) * 0.5 * width);
        if (inset.empty()) break;  // region exhausted
        for (Polygon& poly : inset) {
            Toolpath tp;
            tp.points = std::move(poly.pts);
            tp.width = width;
            tp.material = material;
            tp.closed = true;
            out.push_back(std::move(tp));
        }
    }
    return out;
}

double default_period(InfillPattern pattern, double density, double width) {
    const double spacing = line_spacing(density, width);
    switch (pattern) {
        case InfillPattern::Grid: return 2.0 * spacing;
        case InfillPattern::Honeycomb: return 2.0 * width / (std::numbers::sqrt3 * density);
        case InfillPattern::ThreeDHoneycomb:
            return kThreeDHcHalfSizeRatio * kChamferPerimeter * spacing;
        case InfillPattern::Gyroid: return kGyroidUnitLength * spacing;
        case InfillPattern::Cubic: return 3.0 * spacing;
        case InfillPattern::ArchimedeanChords: return spacing;
    }
    return spacing;
}

double pattern_vertical_period(InfillPattern pattern, double period) {
    switch (pattern) {
        case InfillPattern::ThreeDHoneycomb:
        case InfillPattern::Gyroid:
        case InfillPattern::Cubic: return period;
        default: return 0.0;
    }
}

double gyroid_field(const Vec2& p, double z, double period) {
    const double k = kTwoPi / period;
    const double x = k * p.x();
    const double y = k * p.y();
    const double zz = k * z;
    return std::sin(x) * std::cos(y) + std::sin(y) * std::cos(zz) + std::sin(zz) * std::cos(x);
}

InfillResult generate_infill(const InfillRequest& req) {
    if (!(req.density > 0.0 && req.density <= 1.0))
        throw std::invalid_argument("density must be in (0, 1]");
    if (!(req.width > 0.0)) throw std::invalid_argument("width must be positive");

    InfillResult result;
    if (req.region.outer.size() < 3) return result;

    // Pattern geometry cannot realize near-solid densities; hand off to the
    // plain raster.
    if (req.density >= 0.98) {
        result.paths =
            generate_solid(req.region, req.width, (req.layer_index % 2) ? 90.0 : 0.0, req.material);
        return result;
    }

    const bool hint_applies =
        req.pattern == InfillPattern::Gyroid || req.pattern == InfillPattern::ThreeDHoneycomb;
    const double period = (hint_applies && req.period_hint > 0.0)
                              ? req.period_hint
                              : default_period(req.pattern, req.density, req.width);

    const BBox box = bounding_box(req.region);
    if (std::min(box.width(), box.height()) < period) {
        result.region_too_small = true;
        return result;
    }

    RawPattern raw;
    switch (req.pattern) {
        case InfillPattern::Grid:
            raw = grid_pattern(box, req.density, req.width);
            break;
        case InfillPattern::Honeycomb:
            raw = honeycomb_pattern(box, period);
            break;
        case InfillPattern::ThreeDHoneycomb: {
            double half = req.density * period * period / (req.width * kChamferPerimeter);
            half = std::min(half, 0.48 * period);
            raw = threedhc_pattern(box, period, half, req.z);
            break;
        }
        case InfillPattern::Gyroid:
            raw = marching_squares(box, period / 48.0, [&](double x, double y) {
                return gyroid_field(Vec2(x, y), req.z, period);
            });
            break;
        case InfillPattern::Cubic:
            raw = cubic_pattern(box, period, req.z);
            break;
        case InfillPattern::ArchimedeanChords:
            raw = archimedean_pattern(box, period);
            break;
    }

    for (const Polyline& chain : raw.chains)
        append_clipped(result.paths, chain, req.region, req.width, req.material);
    for (const Polygon& loop : raw.loops)
        append_loop(result.paths, loop, req.region, req.width, req.material);
    return result;
}

std::vector<Toolpath> generate_solid(const Region& region, double width, double angle_deg,
                                     Material material) {
    std::vector<Toolpath> out;
    if (region.outer.size() < 3 || !(width > 0.0)) return out;

    const double theta = angle_deg * std::numbers::pi / 180.0;
    const Vec2 u(std::cos(theta), std::sin(theta));   // along raster lines
    const Vec2 n(-std::sin(theta), std::cos(theta));  // across raster lines

    double umin = std::numeric_limits<double>::infinity();
    double umax = -umin;
    double vmin = umin;
    double vmax = -umin;
    for (const Vec2& p : region.outer.pts) {
        umin = std::min(umin, u.dot(p));
        umax = std::max(umax, u.dot(p));
        vmin = std::min(vmin, n.dot(p));
        vmax = std::max(vmax, n.dot(p));
    }

    int k = 0;
    for (double v = vmin + 0.5 * width; v <= vmax - 0.5 * width + 1e-9; v += width, ++k) {
        Polyline line = {v * n + (umin - 1.0) * u, v * n + (umax + 1.0) * u};
        if (k % 2) std::swap(line[0], line[1]);  // serpentine travel order
        append_clipped(out, line, region, width, material);
    }
    return out;
}

double total_path_length(const std::vector<Toolpath>& paths) {
    double len = 0.0;
    for (const Toolpath& tp : paths) {
        len += polyline_length(tp.points);
        if (tp.closed && tp.points.size() >= 2) len += (tp.points.front() - tp.points.back()).norm();
    }
    return len;
}

double measured_density(const std::vector<Toolpath>& paths, double area) {
    if (area <= 0.0) return 0.0;
    double covered = 0.0;
    for (const Toolpath& tp : paths) {
        double len = polyline_length(tp.points);
        if (tp.closed && tp.points.size() >= 2) len += (tp.points.front() - tp.points.back()).norm();
        covered += len * tp.width;
    }
    return covered / area;
}

}  // namespace piezoskin
