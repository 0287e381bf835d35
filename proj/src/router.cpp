#include "piezoskin/router.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace piezoskin {

namespace {

struct GridIndex {
    int ix = 0;
    int iy = 0;
};

class RouteGrid {
  public:
    RouteGrid(const Region& region, const RouterConfig& cfg) : pitch_(cfg.grid_pitch) {
        const BBox box = bounding_box(region);
        ix0_ = int(std::floor(box.min.x() / pitch_));
        iy0_ = int(std::floor(box.min.y() / pitch_));
        nx_ = int(std::ceil(box.max.x() / pitch_)) - ix0_ + 1;
        ny_ = int(std::ceil(box.max.y() / pitch_)) - iy0_ + 1;
        valid_.assign(std::size_t(nx_) * ny_, false);
        const double margin = cfg.trace_width * 0.5;
        for (int iy = 0; iy < ny_; ++iy) {
            for (int ix = 0; ix < nx_; ++ix) {
                const Vec2 p = point({ix, iy});
                if (contains(region, p) && boundary_distance(region, p) >= margin - 1e-9)
                    valid_[flat(ix, iy)] = true;
            }
        }
    }

    Vec2 point(GridIndex g) const {
        return Vec2((g.ix + ix0_) * pitch_, (g.iy + iy0_) * pitch_);
    }

    bool valid(int ix, int iy) const {
        return ix >= 0 && iy >= 0 && ix < nx_ && iy < ny_ && valid_[flat(ix, iy)];
    }

    GridIndex nearest_valid(const Vec2& p) const {
        GridIndex best{-1, -1};
        double best_d = std::numeric_limits<double>::infinity();
        const int cx = int(std::round(p.x() / pitch_)) - ix0_;
        const int cy = int(std::round(p.y() / pitch_)) - iy0_;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int ix = cx + dx;
                const int iy = cy + dy;
                if (!valid(ix, iy)) continue;
                const double d = (point({ix, iy}) - p).norm();
                if (d < best_d) {
                    best_d = d;
                    best = {ix, iy};
                }
            }
        }
        return best;
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t flat(int ix, int iy) const { return std::size_t(iy) * nx_ + ix; }

  private:
    double pitch_;
    int ix0_ = 0, iy0_ = 0, nx_ = 0, ny_ = 0;
    std::vector<bool> valid_;
};

Polyline simplify_collinear(const Polyline& path) {
    if (path.size() < 3) return path;
    Polyline out;
    out.push_back(path.front());
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        const Vec2 a = path[i] - out.back();
        const Vec2 b = path[i + 1] - path[i];
        if (std::abs(a.x() * b.y() - a.y() * b.x()) > 1e-9) out.push_back(path[i]);
    }
    out.push_back(path.back());
    return out;
}

}  // namespace

const char* to_string(ElectrodeSide side) {
    return side == ElectrodeSide::Top ? "top" : "bottom";
}

double trace_resistance(double length_m, double cross_section_m2, double resistivity_ohm_m) {
    if (!(length_m > 0.0) || !(cross_section_m2 > 0.0) || !(resistivity_ohm_m > 0.0))
        throw std::invalid_argument("trace resistance inputs must be positive");
    return resistivity_ohm_m * length_m / cross_section_m2;
}

std::vector<Net> derive_nets(const ValidatedSpec& spec, double grid_pitch) {
    std::vector<Net> nets;
    for (std::size_t i = 0; i < spec->tiles.size(); ++i) {
        const Polygon& tile = spec->tiles[i];
        const Vec2 centroid = polygon_centroid(tile);
        const Vec2 snapped(std::round(centroid.x() / grid_pitch) * grid_pitch,
                           std::round(centroid.y() / grid_pitch) * grid_pitch);
        auto pick_via = [&](double direction) {
            for (double step : {1.0, 2.0, 0.0}) {
                const Vec2 candidate = snapped + Vec2(direction * step * grid_pitch, 0.0);
                if (contains(tile, candidate) && boundary_distance(tile, candidate) >= grid_pitch)
                    return candidate;
            }
            return centroid;
        };
        // Keep the two nets of a tile uncrossed: the via on the +x side serves
        // whichever terminal sits further +x.
        const double top_dir =
            spec->terminals[i].top.x() >= spec->terminals[i].bottom.x() ? +1.0 : -1.0;
        Net top;
        top.tile_id = int(i);
        top.side = ElectrodeSide::Top;
        top.via_point = pick_via(top_dir);
        top.terminal = spec->terminals[i].top;
        Net bottom;
        bottom.tile_id = int(i);
        bottom.side = ElectrodeSide::Bottom;
        bottom.via_point = pick_via(-top_dir);
        bottom.terminal = spec->terminals[i].bottom;
        nets.push_back(top);
        nets.push_back(bottom);
    }
    return nets;
}

std::vector<Trace> route_nets(std::vector<Net> nets, const Region& wiring_region,
                              const RouterConfig& cfg) {
    for (const Net& net : nets) {
        if (!contains(wiring_region, net.via_point))
            throw std::invalid_argument("via point outside the wiring region");
        if (!contains(wiring_region, net.terminal))
            throw std::invalid_argument("terminal outside the wiring region");
    }

    std::sort(nets.begin(), nets.end(), [](const Net& a, const Net& b) {
        return std::make_pair(a.tile_id, int(a.side)) < std::make_pair(b.tile_id, int(b.side));
    });

    RouteGrid grid(wiring_region, cfg);
    std::vector<std::pair<Vec2, Vec2>> placed;  // segments of already routed traces
    std::vector<Trace> traces;

    for (std::size_t net_index = 0; net_index < nets.size(); ++net_index) {
        const Net& net = nets[net_index];
        const GridIndex start = grid.nearest_valid(net.via_point);
        const GridIndex goal = grid.nearest_valid(net.terminal);
        if (start.ix < 0 || goal.ix < 0)
            throw UnroutableError("no routable grid node near net endpoints (tile " +
                                  std::to_string(net.tile_id) + ")");

        // Endpoints of nets still waiting to be routed are kept clear, or an
        // early trace could strand a later via behind its own wall.
        std::vector<Vec2> reserved;
        for (std::size_t later = net_index + 1; later < nets.size(); ++later) {
            reserved.push_back(nets[later].via_point);
            reserved.push_back(nets[later].terminal);
        }

        auto blocked = [&](GridIndex g) {
            const Vec2 p = grid.point(g);
            for (const auto& seg : placed)
                if (point_segment_distance(p, seg.first, seg.second) < cfg.clearance - 1e-9)
                    return true;
            for (const Vec2& r : reserved)
                if ((p - r).norm() < cfg.clearance - 1e-9) return true;
            return false;
        };

        // Plain BFS; uniform edge cost and a fixed neighbour order keep the
        // result deterministic.
        const std::size_t total = std::size_t(grid.nx()) * grid.ny();
        std::vector<int> prev(total, -2);
        std::deque<GridIndex> queue;
        if (!blocked(start)) {
            prev[grid.flat(start.ix, start.iy)] = -1;
            queue.push_back(start);
        }
        bool found = false;
        while (!queue.empty()) {
            const GridIndex cur = queue.front();
            queue.pop_front();
            if (cur.ix == goal.ix && cur.iy == goal.iy) {
                found = true;
                break;
            }
            static const int kDx[4] = {1, -1, 0, 0};
            static const int kDy[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                const GridIndex nxt{cur.ix + kDx[k], cur.iy + kDy[k]};
                if (!grid.valid(nxt.ix, nxt.iy)) continue;
                const std::size_t f = grid.flat(nxt.ix, nxt.iy);
                if (prev[f] != -2) continue;
                if (blocked(nxt)) continue;
                prev[f] = int(grid.flat(cur.ix, cur.iy));
                queue.push_back(nxt);
            }
        }
        if (!found)
            throw UnroutableError("net cannot be routed at the required clearance (tile " +
                                  std::to_string(net.tile_id) + ", " + to_string(net.side) + ")");

        Polyline nodes;
        for (std::size_t f = grid.flat(goal.ix, goal.iy);;) {
            nodes.push_back(grid.point({int(f % grid.nx()), int(f / grid.nx())}));
            const int p = prev[f];
            if (p < 0) break;
            f = std::size_t(p);
        }
        std::reverse(nodes.begin(), nodes.end());

        Polyline path;
        if ((net.via_point - nodes.front()).norm() > 1e-9) path.push_back(net.via_point);
        path.insert(path.end(), nodes.begin(), nodes.end());
        if ((net.terminal - path.back()).norm() > 1e-9) path.push_back(net.terminal);
        path = simplify_collinear(path);

        for (std::size_t i = 1; i < path.size(); ++i) placed.emplace_back(path[i - 1], path[i]);

        Trace trace;
        trace.net = net;
        trace.path = std::move(path);
        trace.trace_width = cfg.trace_width;
        trace.thickness = cfg.trace_thickness;
        const double length_m = polyline_length(trace.path) * 1e-3;
        const double section_m2 = cfg.trace_width * 1e-3 * cfg.trace_thickness * 1e-3;
        trace.estimated_resistance = trace_resistance(length_m, section_m2, cfg.resistivity);
        traces.push_back(std::move(trace));
    }
    return traces;
}

double min_trace_clearance(const std::vector<Trace>& traces) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traces.size(); ++i) {
        for (std::size_t j = i + 1; j < traces.size(); ++j) {
            const Polyline& a = traces[i].path;
            const Polyline& b = traces[j].path;
            for (std::size_t ia = 1; ia < a.size(); ++ia)
                for (std::size_t ib = 1; ib < b.size(); ++ib)
                    best = std::min(best,
                                    segment_segment_distance(a[ia - 1], a[ia], b[ib - 1], b[ib]));
        }
    }
    return best;
}

}  // namespace piezoskin
