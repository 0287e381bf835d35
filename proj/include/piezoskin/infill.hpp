#pragma once

#include "piezoskin/geometry.hpp"
#include "piezoskin/spec.hpp"

#include <vector>

namespace piezoskin {

struct Toolpath {
    Polyline points;
    double width = 0.4;
    Material material = Material::NonConductiveTPU;
    bool closed = false;
};

struct InfillRequest {
    InfillPattern pattern = InfillPattern::Grid;
    double density = 0.1;
    int layer_index = 0;
    double z = 0.0;
    Region region;
    double width = 0.4;
    double period_hint = 0.0;  // cell size for Gyroid/ThreeDHoneycomb; <= 0 derives it from density
    Material material = Material::NonConductiveTPU;
};

struct InfillResult {
    std::vector<Toolpath> paths;
    bool region_too_small = false;
};

// Areal density convention: spacing = width / density.
double line_spacing(double density, double width);

// Inward offset for distance > 0 (see offset_polygon); empty when the region
// vanishes.
std::vector<Polygon> offset_region(const Polygon& region, double distance);

// wall_thickness must be a non-negative integer multiple of width; emits that
// many concentric loops at insets width/2, 3*width/2, ...
std::vector<Toolpath> generate_walls(const Polygon& region, double wall_thickness, double width,
                                     Material material);

InfillResult generate_infill(const InfillRequest& req);

// Parallel raster at spacing = width, covering the region.
std::vector<Toolpath> generate_solid(const Region& region, double width, double angle_deg,
                                     Material material);

// Pattern cell size that realizes the requested density at the given width.
double default_period(InfillPattern pattern, double density, double width);

// Vertical repeat of the pattern geometry; 0 for z-independent patterns.
double pattern_vertical_period(InfillPattern pattern, double period);

// sin(x)cos(y) + sin(y)cos(z) + sin(z)cos(x), with coordinates scaled by
// 2*pi/period. Toolpath vertices of the gyroid pattern lie on the zero set.
double gyroid_field(const Vec2& p, double z, double period);

double total_path_length(const std::vector<Toolpath>& paths);
double measured_density(const std::vector<Toolpath>& paths, double area);

}  // namespace piezoskin
