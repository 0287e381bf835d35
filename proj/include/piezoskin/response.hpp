#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace piezoskin {

// R(F) = wire + rest + rise*(F/Fa)*exp(1 - F/Fa) - fall*(1 - exp(-F/Fb)).
// One bump and one saturating drop: the smallest smooth form that holds all
// the characterization anchors.
struct ResponseParams {
    double wire_ohm = 0.0;       // per-tile wiring offset
    double rest_ohm = 5900.0;    // sensor resistance at rest
    double rise_ohm = 480.0;     // bump amplitude, peaks at rise_scale_n
    double rise_scale_n = 25.0;
    double fall_ohm = 620.0;     // saturating drop amplitude
    double fall_scale_n = 45.0;
    double saturation_n = 160.0;  // end of the characterized force range
};

struct HysteresisState {
    double residual_ohm = 0.0;
    double release_time_s = 0.0;
    double tau_s = 30.0;
};

// Divider topology: sensor between Vcc and the tap, reference resistor
// between the tap and ground.
struct ReadoutConfig {
    double vcc = 5.0;
    double r_ref = 5600.0;
    int adc_bits = 10;
};

struct InsufficientAnchorsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoConvergenceError : std::runtime_error {
    NoConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), best_residual(residual) {}
    double best_residual = 0.0;
};
struct RangeSaturatedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OutOfBranchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Model value without hysteresis.
double rf_model(const ResponseParams& params, double force_n);

// Model value plus the decayed residual at time t_s.
double rf_eval(const ResponseParams& params, double force_n, const HysteresisState& hyst = {},
               double t_s = 0.0);

struct FitResult {
    ResponseParams params;
    double max_relative_residual = 0.0;
};

// Nonlinear least squares over (rest, rise, rise_scale, fall, fall_scale).
// Needs at least four anchors including one at F = 0; guarantees max relative
// residual below 1% or raises NoConvergenceError with the best achieved.
FitResult fit_rf(const std::vector<std::pair<double, double>>& anchors_n_ohm);

HysteresisState release_load(const ResponseParams& params, double f_prev_n, double t_s,
                             double residual_max_ohm = 200.0, double f_ref_n = 160.0,
                             double tau_s = 30.0);

double divider_voltage(double r_sensor_ohm, const ReadoutConfig& cfg);
int adc_counts(double voltage, const ReadoutConfig& cfg);
// Exact inversion on count centers; rail counts raise RangeSaturatedError.
double adc_to_resistance(int counts, const ReadoutConfig& cfg);

// Bisection on the strictly descending branch [rise_scale_n, 200 N].
double force_from_resistance(const ResponseParams& params, double r_ohm);

double force_to_pressure(double force_n, double tip_diameter_mm);  // Pa

// Named per-variant parameter presets (structure and infill variants),
// shipped as a JSON data file.
std::map<std::string, ResponseParams> load_presets(const std::string& path);

std::string serialize_params(const ResponseParams& params);
ResponseParams parse_params(const std::string& text);
ResponseParams load_params(const std::string& path);
void save_params(const ResponseParams& params, const std::string& path);

}  // namespace piezoskin
