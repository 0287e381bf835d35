#pragma once

#include "piezoskin/geometry.hpp"
#include "piezoskin/spec.hpp"

#include <stdexcept>
#include <vector>

namespace piezoskin {

enum class ElectrodeSide { Top, Bottom };

const char* to_string(ElectrodeSide side);

struct Net {
    int tile_id = 0;
    ElectrodeSide side = ElectrodeSide::Top;
    Vec2 via_point{0.0, 0.0};
    Vec2 terminal{0.0, 0.0};
};

struct Trace {
    Net net;
    Polyline path;  // runs from via_point to terminal
    double trace_width = 0.4;
    double thickness = 0.4;
    double estimated_resistance = 0.0;  // ohm
};

struct RouterConfig {
    double clearance = 1.0;        // min distance between traces of distinct nets, mm
    double grid_pitch = 1.0;       // mm
    double trace_width = 0.4;      // mm
    double trace_thickness = 0.4;  // mm, the wiring band height
    double resistivity = 0.04;     // ohm*m; calibration parameter for conductive TPU
};

struct UnroutableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Pouillet's law, R = rho * L / A. SI units.
double trace_resistance(double length_m, double cross_section_m2, double resistivity_ohm_m);

// Sequential rectilinear grid router. Nets are routed in ascending
// (tile_id, side) order regardless of input order; rip-up is not attempted,
// an impossible net raises UnroutableError.
std::vector<Trace> route_nets(std::vector<Net> nets, const Region& wiring_region,
                              const RouterConfig& cfg = {});

// Two nets per tile with via points beside the tile centroid and terminals
// taken from the spec.
std::vector<Net> derive_nets(const ValidatedSpec& spec, double grid_pitch = 1.0);

// Smallest distance between traces of distinct nets; infinity when fewer than
// two traces.
double min_trace_clearance(const std::vector<Trace>& traces);

}  // namespace piezoskin
