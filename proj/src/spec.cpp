#include "piezoskin/spec.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace piezoskin {

using nlohmann::json;

namespace {

constexpr double kThicknessTol = 1e-6;  // mm slack when checking layer multiples

bool positive_multiple_of(double value, double step, int min_count = 1) {
    if (value <= 0.0 || step <= 0.0) return false;
    const double m = value / step;
    return std::abs(m - std::round(m)) <= kThicknessTol / step && std::round(m) >= min_count;
}

int layer_count_of(double thickness, double layer_height) {
    return int(std::llround(thickness / layer_height));
}

double min_boundary_gap(const Polygon& a, const Polygon& b) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    for (std::size_t i = 0, ip = na - 1; i < na; ip = i++)
        for (std::size_t j = 0, jp = nb - 1; j < nb; jp = j++)
            best = std::min(best, segment_segment_distance(a[ip], a[i], b[jp], b[j]));
    return best;
}

}  // namespace

const char* to_string(Material m) {
    return m == Material::ConductiveTPU ? "conductive-tpu" : "nonconductive-tpu";
}

const char* to_string(InfillPattern p) {
    switch (p) {
        case InfillPattern::Grid: return "grid";
        case InfillPattern::Honeycomb: return "honeycomb";
        case InfillPattern::ThreeDHoneycomb: return "3d-honeycomb";
        case InfillPattern::Gyroid: return "gyroid";
        case InfillPattern::Cubic: return "cubic";
        case InfillPattern::ArchimedeanChords: return "archimedean-chords";
    }
    return "?";
}

std::optional<InfillPattern> infill_pattern_from_string(const std::string& s) {
    for (InfillPattern p : {InfillPattern::Grid, InfillPattern::Honeycomb,
                            InfillPattern::ThreeDHoneycomb, InfillPattern::Gyroid,
                            InfillPattern::Cubic, InfillPattern::ArchimedeanChords})
        if (s == to_string(p)) return p;
    return std::nullopt;
}

const char* to_string(BandRole r) {
    switch (r) {
        case BandRole::CoverBottom: return "cover-bottom";
        case BandRole::Wiring: return "wiring";
        case BandRole::ElectrodeBottom: return "electrode-bottom";
        case BandRole::SparseConductive: return "sparse-conductive";
        case BandRole::SparseNonConductive: return "sparse-nonconductive";
        case BandRole::ElectrodeTop: return "electrode-top";
        case BandRole::CoverTop: return "cover-top";
    }
    return "?";
}

ValidationResult validate_spec(const SensorSpec& spec) {
    ValidationResult result;
    auto fail = [&](std::string where, std::string message) {
        result.violations.push_back({std::move(where), std::move(message)});
    };

    const DesignParams& p = spec.params;

    if (spec.footprint.size() < 3 || !is_simple(spec.footprint))
        fail("footprint", "must be a simple polygon");
    else if (!is_ccw(spec.footprint))
        fail("footprint", "must be wound counter-clockwise");
    else if (polygon_area(spec.footprint) <= 0.0)
        fail("footprint", "area must be positive");

    if (spec.tiles.empty()) fail("tiles", "tile count must be >= 1");

    const bool footprint_ok = result.violations.empty();
    for (std::size_t i = 0; i < spec.tiles.size(); ++i) {
        const Polygon& tile = spec.tiles[i];
        const std::string where = "tiles[" + std::to_string(i) + "]";
        if (tile.size() < 3 || !is_simple(tile)) {
            fail(where, "must be a simple polygon");
            continue;
        }
        if (!is_ccw(tile)) {
            fail(where, "must be wound counter-clockwise");
            continue;
        }
        if (footprint_ok) {
            bool inside = true;
            for (const Vec2& v : tile.pts)
                if (!contains(spec.footprint, v)) inside = false;
            if (!inside) {
                fail(where, "must lie inside the footprint");
            } else if (min_boundary_gap(tile, spec.footprint) < p.tile_clearance - 1e-9) {
                fail(where, "closer than the clearance margin to the footprint boundary");
            }
        }
        for (std::size_t j = i + 1; j < spec.tiles.size(); ++j) {
            const Polygon& other = spec.tiles[j];
            if (other.size() < 3) continue;
            if (contains(tile, other[0]) || contains(other, tile[0]) ||
                min_boundary_gap(tile, other) < p.tile_clearance - 1e-9)
                fail(where, "overlaps or violates clearance against tiles[" + std::to_string(j) + "]");
        }
    }

    if (spec.terminals.size() != spec.tiles.size())
        fail("terminals", "need exactly one top/bottom terminal pair per tile");
    std::vector<Vec2> pads;
    for (std::size_t i = 0; i < spec.terminals.size(); ++i) {
        const std::string where = "terminals[" + std::to_string(i) + "]";
        for (const Vec2& pad : {spec.terminals[i].top, spec.terminals[i].bottom}) {
            if (footprint_ok && !contains(spec.footprint, pad))
                fail(where, "terminal pad outside the footprint");
            for (const Vec2& seen : pads)
                if ((seen - pad).norm() < 1e-6) fail(where, "duplicate terminal position");
            pads.push_back(pad);
        }
    }

    if (p.layer_height <= 0.0) fail("params.layer_height", "must be positive");
    if (p.nozzle_diameter <= 0.0) fail("params.nozzle_diameter", "must be positive");

    struct Thickness {
        const char* name;
        double value;
    };
    for (const Thickness& t : {Thickness{"conductive_band_thickness", p.conductive_band_thickness},
                               Thickness{"nonconductive_band_thickness", p.nonconductive_band_thickness},
                               Thickness{"wiring_layer_thickness", p.wiring_layer_thickness},
                               Thickness{"cover_layer_thickness", p.cover_layer_thickness},
                               Thickness{"electrode_thickness", p.electrode_thickness}}) {
        const std::string where = std::string("params.") + t.name;
        if (t.value <= 0.0)
            fail(where, "must be positive");
        else if (p.layer_height > 0.0 && !positive_multiple_of(t.value, p.layer_height))
            fail(where, "not a multiple of layer_height");
    }

    if (p.patterned_conductive_layers < 1)
        fail("params.patterned_conductive_layers", "must be >= 1");
    if (!(p.sensor_infill_density > 0.0 && p.sensor_infill_density <= 1.0))
        fail("params.sensor_infill_density", "must be in (0, 1]");
    if (!(p.outside_infill_density > 0.0 && p.outside_infill_density <= 1.0))
        fail("params.outside_infill_density", "must be in (0, 1]");
    if (p.tile_clearance <= 0.0) fail("params.tile_clearance", "must be positive");

    if (p.nozzle_diameter > 0.0) {
        const double k = p.sensor_wall_thickness / p.nozzle_diameter;
        if (p.sensor_wall_thickness < 0.0 || std::abs(k - std::round(k)) > 1e-6)
            fail("params.sensor_wall_thickness",
                 "must be a non-negative integer multiple of the extrusion width");
    }

    if (spec.printer.tool_count < 2)
        fail("printer.tool_count", "need at least two tools for two materials");
    if (spec.printer.bed_size.x() <= 0.0 || spec.printer.bed_size.y() <= 0.0)
        fail("printer.bed_size", "must be positive");

    if (result.violations.empty()) result.valid = ValidatedSpec(spec);
    return result;
}

const Band& BandPlan::band_for_layer(int layer_index) const {
    for (const Band& b : bands)
        if (layer_index >= b.first_layer && layer_index < b.first_layer + b.layer_count) return b;
    throw std::out_of_range("layer index outside the band plan");
}

BandPlan compile_bands(const ValidatedSpec& spec) {
    const DesignParams& p = spec->params;
    BandPlan plan;
    plan.layer_height = p.layer_height;

    double z = 0.0;
    int layer = 0;
    auto push = [&](BandRole role, Material material, double thickness) {
        Band b;
        b.role = role;
        b.material = material;
        b.z_start = z;
        b.z_end = z + thickness;
        b.first_layer = layer;
        b.layer_count = layer_count_of(thickness, p.layer_height);
        z = b.z_end;
        layer += b.layer_count;
        plan.bands.push_back(b);
    };

    push(BandRole::CoverBottom, Material::NonConductiveTPU, p.cover_layer_thickness);
    push(BandRole::Wiring, Material::NonConductiveTPU, p.wiring_layer_thickness);
    push(BandRole::ElectrodeBottom, Material::ConductiveTPU, p.electrode_thickness);
    for (int i = 0; i < p.patterned_conductive_layers; ++i) {
        if (i > 0)
            push(BandRole::SparseNonConductive, Material::NonConductiveTPU,
                 p.nonconductive_band_thickness);
        push(BandRole::SparseConductive, Material::ConductiveTPU, p.conductive_band_thickness);
    }
    push(BandRole::ElectrodeTop, Material::ConductiveTPU, p.electrode_thickness);
    push(BandRole::CoverTop, Material::NonConductiveTPU, p.cover_layer_thickness);

    plan.total_layers = layer;
    return plan;
}

TileRegions tile_regions(const ValidatedSpec& spec) {
    TileRegions out;
    out.tiles = spec->tiles;
    out.outside = Region(spec->footprint, spec->tiles);
    return out;
}

namespace {

json polygon_to_json(const Polygon& poly) {
    json arr = json::array();
    for (const Vec2& p : poly.pts) arr.push_back({p.x(), p.y()});
    return arr;
}

Polygon polygon_from_json(const json& arr) {
    Polygon poly;
    for (const auto& v : arr) poly.pts.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    return poly;
}

}  // namespace

SensorSpec parse_sensor_spec(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("spec file is not valid JSON: ") + e.what());
    }
    try {
        if (!doc.contains("version")) throw ParseError("spec file is missing the version field");
        const int version = doc.at("version").get<int>();
        if (version != 1)
            throw UnsupportedVersionError("unsupported spec version " + std::to_string(version));

        SensorSpec spec;
        spec.version = version;
        spec.name = doc.value("name", std::string("sensor"));
        spec.footprint = polygon_from_json(doc.at("footprint"));
        for (const auto& t : doc.at("tiles")) spec.tiles.push_back(polygon_from_json(t));
        for (const auto& t : doc.at("terminals")) {
            TerminalPair pair;
            pair.top = Vec2(t.at("top").at(0).get<double>(), t.at("top").at(1).get<double>());
            pair.bottom =
                Vec2(t.at("bottom").at(0).get<double>(), t.at("bottom").at(1).get<double>());
            spec.terminals.push_back(pair);
        }

        const json& p = doc.at("params");
        DesignParams& dp = spec.params;
        dp.conductive_band_thickness = p.value("conductive_band_thickness_mm", dp.conductive_band_thickness);
        dp.nonconductive_band_thickness =
            p.value("nonconductive_band_thickness_mm", dp.nonconductive_band_thickness);
        dp.patterned_conductive_layers = p.value("patterned_conductive_layers", dp.patterned_conductive_layers);
        dp.wiring_layer_thickness = p.value("wiring_layer_thickness_mm", dp.wiring_layer_thickness);
        dp.cover_layer_thickness = p.value("cover_layer_thickness_mm", dp.cover_layer_thickness);
        dp.electrode_thickness = p.value("electrode_thickness_mm", dp.electrode_thickness);
        dp.layer_height = p.value("layer_height_mm", dp.layer_height);
        dp.nozzle_diameter = p.value("nozzle_diameter_mm", dp.nozzle_diameter);
        dp.sensor_infill_density = p.value("sensor_infill_density", dp.sensor_infill_density);
        if (p.contains("sensor_infill_pattern")) {
            const std::string s = p.at("sensor_infill_pattern").get<std::string>();
            const auto pattern = infill_pattern_from_string(s);
            if (!pattern) throw ParseError("unknown infill pattern: " + s);
            dp.sensor_infill_pattern = *pattern;
        }
        dp.sensor_wall_thickness = p.value("sensor_wall_thickness_mm", dp.sensor_wall_thickness);
        dp.outside_infill_density = p.value("outside_infill_density", dp.outside_infill_density);
        dp.tile_clearance = p.value("tile_clearance_mm", dp.tile_clearance);

        if (doc.contains("printer")) {
            const json& pr = doc.at("printer");
            spec.printer.name = pr.value("name", spec.printer.name);
            if (pr.contains("bed_mm"))
                spec.printer.bed_size =
                    Vec2(pr.at("bed_mm").at(0).get<double>(), pr.at("bed_mm").at(1).get<double>());
            spec.printer.tool_count = pr.value("tool_count", spec.printer.tool_count);
            spec.printer.hotend_temp_c = pr.value("hotend_temp_c", spec.printer.hotend_temp_c);
            spec.printer.bed_temp_c = pr.value("bed_temp_c", spec.printer.bed_temp_c);
        }
        return spec;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed spec file: ") + e.what());
    }
}

std::string serialize_sensor_spec(const SensorSpec& spec) {
    json doc;
    doc["version"] = spec.version;
    doc["name"] = spec.name;
    doc["footprint"] = polygon_to_json(spec.footprint);
    doc["tiles"] = json::array();
    for (const Polygon& t : spec.tiles) doc["tiles"].push_back(polygon_to_json(t));
    doc["terminals"] = json::array();
    for (const TerminalPair& t : spec.terminals)
        doc["terminals"].push_back(
            {{"top", {t.top.x(), t.top.y()}}, {"bottom", {t.bottom.x(), t.bottom.y()}}});

    const DesignParams& dp = spec.params;
    doc["params"] = {{"conductive_band_thickness_mm", dp.conductive_band_thickness},
                     {"nonconductive_band_thickness_mm", dp.nonconductive_band_thickness},
                     {"patterned_conductive_layers", dp.patterned_conductive_layers},
                     {"wiring_layer_thickness_mm", dp.wiring_layer_thickness},
                     {"cover_layer_thickness_mm", dp.cover_layer_thickness},
                     {"electrode_thickness_mm", dp.electrode_thickness},
                     {"layer_height_mm", dp.layer_height},
                     {"nozzle_diameter_mm", dp.nozzle_diameter},
                     {"sensor_infill_density", dp.sensor_infill_density},
                     {"sensor_infill_pattern", to_string(dp.sensor_infill_pattern)},
                     {"sensor_wall_thickness_mm", dp.sensor_wall_thickness},
                     {"outside_infill_density", dp.outside_infill_density},
                     {"tile_clearance_mm", dp.tile_clearance}};
    doc["printer"] = {{"name", spec.printer.name},
                      {"bed_mm", {spec.printer.bed_size.x(), spec.printer.bed_size.y()}},
                      {"tool_count", spec.printer.tool_count},
                      {"hotend_temp_c", spec.printer.hotend_temp_c},
                      {"bed_temp_c", spec.printer.bed_temp_c}};
    return doc.dump(2) + "\n";
}

SensorSpec load_sensor_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open spec file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_sensor_spec(buf.str());
}

}  // namespace piezoskin
