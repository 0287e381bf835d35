#pragma once

#include "piezoskin/geometry.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace piezoskin {

enum class Material { ConductiveTPU, NonConductiveTPU };

enum class InfillPattern { Grid, Honeycomb, ThreeDHoneycomb, Gyroid, Cubic, ArchimedeanChords };

const char* to_string(Material m);
const char* to_string(InfillPattern p);
std::optional<InfillPattern> infill_pattern_from_string(const std::string& s);

// All lengths in mm, densities as fractions in (0, 1].
struct DesignParams {
    double conductive_band_thickness = 0.4;
    double nonconductive_band_thickness = 0.4;
    int patterned_conductive_layers = 4;
    double wiring_layer_thickness = 0.4;
    double cover_layer_thickness = 0.4;
    double electrode_thickness = 0.4;
    double layer_height = 0.2;
    double nozzle_diameter = 0.4;  // also the extrusion width
    double sensor_infill_density = 0.10;
    InfillPattern sensor_infill_pattern = InfillPattern::ThreeDHoneycomb;
    double sensor_wall_thickness = 0.8;
    double outside_infill_density = 1.0;
    double tile_clearance = 1.0;
};

struct PrinterProfile {
    std::string name = "generic-toolchanger";
    Vec2 bed_size{360.0, 360.0};
    int tool_count = 2;
    int hotend_temp_c = 225;
    int bed_temp_c = 50;
};

// Terminal pads for one tile: one for the top electrode net, one for the
// bottom electrode net.
struct TerminalPair {
    Vec2 top{0.0, 0.0};
    Vec2 bottom{0.0, 0.0};
};

struct SensorSpec {
    int version = 1;
    std::string name = "sensor";
    Polygon footprint;
    std::vector<Polygon> tiles;
    std::vector<TerminalPair> terminals;  // one entry per tile
    DesignParams params;
    PrinterProfile printer;
};

struct Violation {
    std::string where;
    std::string message;
};

struct ValidationResult;
class ValidatedSpec;

// Checks every invariant and reports all violations, not just the first.
ValidationResult validate_spec(const SensorSpec& spec);

class ValidatedSpec {
  public:
    const SensorSpec& spec() const { return spec_; }
    const SensorSpec* operator->() const { return &spec_; }

  private:
    explicit ValidatedSpec(SensorSpec s) : spec_(std::move(s)) {}
    friend ValidationResult validate_spec(const SensorSpec& spec);
    SensorSpec spec_;
};

struct ValidationResult {
    std::optional<ValidatedSpec> valid;  // engaged iff violations is empty
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

enum class BandRole {
    CoverBottom,
    Wiring,
    ElectrodeBottom,
    SparseConductive,
    SparseNonConductive,
    ElectrodeTop,
    CoverTop
};

const char* to_string(BandRole r);

struct Band {
    BandRole role;
    Material material;
    double z_start = 0.0;
    double z_end = 0.0;
    int first_layer = 0;
    int layer_count = 0;
};

struct BandPlan {
    std::vector<Band> bands;
    double layer_height = 0.2;
    int total_layers = 0;

    const Band& band_for_layer(int layer_index) const;
};

// Vertical stack plan: CoverBottom, Wiring, ElectrodeBottom, N conductive
// sparse bands separated by N-1 non-conductive ones, ElectrodeTop, CoverTop.
BandPlan compile_bands(const ValidatedSpec& spec);

struct TileRegions {
    std::vector<Polygon> tiles;  // verbatim from the spec
    Region outside;              // footprint minus tiles
};

TileRegions tile_regions(const ValidatedSpec& spec);

struct UnsupportedVersionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Spec file format: JSON, schema documented in docs/formats.md. The version
// field is mandatory; unknown versions raise UnsupportedVersionError.
SensorSpec parse_sensor_spec(const std::string& text);
std::string serialize_sensor_spec(const SensorSpec& spec);
SensorSpec load_sensor_spec(const std::string& path);

}  // namespace piezoskin
