#pragma once

#include "piezoskin/spec.hpp"

#include <stdexcept>
#include <string>

namespace piezoskin::testing {

inline std::string data_dir() {
#ifdef PIEZOSKIN_DATA_DIR
    return PIEZOSKIN_DATA_DIR;
#else
    return "data";
#endif
}

inline SensorSpec load_fixture(const std::string& name) {
    return load_sensor_spec(data_dir() + "/examples/" + name);
}

inline SensorSpec baseline_spec() { return load_fixture("baseline.json"); }
inline SensorSpec four_tile_spec() { return load_fixture("four_tile.json"); }
inline SensorSpec sole_spec() { return load_fixture("sole_six_tile.json"); }

inline ValidatedSpec validated(const SensorSpec& spec) {
    ValidationResult r = validate_spec(spec);
    if (!r.ok()) {
        std::string msg = "fixture spec failed validation:";
        for (const Violation& v : r.violations) msg += "\n  " + v.where + ": " + v.message;
        throw std::runtime_error(msg);
    }
    return *r.valid;
}

}  // namespace piezoskin::testing
