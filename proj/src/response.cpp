#include "piezoskin/response.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace piezoskin {

using nlohmann::json;

namespace {

constexpr int kFitParams = 5;  // rest, rise, rise_scale, fall, fall_scale

struct Bounds {
    double lo[kFitParams] = {100.0, 1.0, 5.0, 1.0, 5.0};
    double hi[kFitParams] = {50000.0, 20000.0, 80.0, 20000.0, 300.0};
};

ResponseParams from_vector(const Eigen::VectorXd& p) {
    ResponseParams out;
    out.wire_ohm = 0.0;
    out.rest_ohm = p[0];
    out.rise_ohm = p[1];
    out.rise_scale_n = p[2];
    out.fall_ohm = p[3];
    out.fall_scale_n = p[4];
    return out;
}

Eigen::VectorXd relative_residuals(const Eigen::VectorXd& p,
                                   const std::vector<std::pair<double, double>>& anchors) {
    const ResponseParams params = from_vector(p);
    Eigen::VectorXd r(anchors.size());
    for (std::size_t i = 0; i < anchors.size(); ++i)
        r[long(i)] = (rf_model(params, anchors[i].first) - anchors[i].second) / anchors[i].second;
    return r;
}

// Small Levenberg-Marquardt with numeric Jacobian, box clamping and an
// optional frozen-parameter mask.
Eigen::VectorXd levenberg_marquardt(Eigen::VectorXd p,
                                    const std::vector<std::pair<double, double>>& anchors,
                                    const Bounds& bounds, unsigned frozen_mask = 0) {
    const int m = int(anchors.size());
    double lambda = 1e-3;
    Eigen::VectorXd r = relative_residuals(p, anchors);
    for (int iter = 0; iter < 300; ++iter) {
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, kFitParams);
        for (int k = 0; k < kFitParams; ++k) {
            if (frozen_mask & (1u << k)) continue;
            const double h = std::max(1e-7 * std::abs(p[k]), 1e-9);
            Eigen::VectorXd ph = p;
            ph[k] += h;
            jac.col(k) = (relative_residuals(ph, anchors) - r) / h;
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * r;

        bool stepped = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            Eigen::MatrixXd damped = jtj;
            for (int k = 0; k < kFitParams; ++k) damped(k, k) += lambda * (jtj(k, k) + 1e-12);
            // Frozen rows would otherwise leave the system near-singular.
            for (int k = 0; k < kFitParams; ++k)
                if (frozen_mask & (1u << k)) damped(k, k) = 1.0;
            Eigen::VectorXd step = damped.ldlt().solve(-jtr);
            for (int k = 0; k < kFitParams; ++k)
                if (frozen_mask & (1u << k)) step[k] = 0.0;
            Eigen::VectorXd next = p + step;
            for (int k = 0; k < kFitParams; ++k)
                next[k] = std::clamp(next[k], bounds.lo[k], bounds.hi[k]);
            const Eigen::VectorXd rn = relative_residuals(next, anchors);
            if (rn.squaredNorm() < r.squaredNorm()) {
                p = next;
                r = rn;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                break;
            }
            lambda *= 4.0;
        }
        if (!stepped || r.lpNorm<Eigen::Infinity>() < 1e-12) break;
    }
    return p;
}

double curve_peak_force(const ResponseParams& params) {
    double best_f = 0.0;
    double best_r = rf_model(params, 0.0);
    for (double f = 0.0; f <= 200.0; f += 0.05) {
        const double r = rf_model(params, f);
        if (r > best_r) {
            best_r = r;
            best_f = f;
        }
    }
    return best_f;
}

}  // namespace

double rf_model(const ResponseParams& params, double force_n) {
    if (force_n < 0.0) throw std::invalid_argument("force must be non-negative");
    const double x = force_n / params.rise_scale_n;
    const double rise = params.rise_ohm * x * std::exp(1.0 - x);
    const double fall = params.fall_ohm * (1.0 - std::exp(-force_n / params.fall_scale_n));
    return params.wire_ohm + params.rest_ohm + rise - fall;
}

double rf_eval(const ResponseParams& params, double force_n, const HysteresisState& hyst,
               double t_s) {
    const double dt = std::max(0.0, t_s - hyst.release_time_s);
    const double residual =
        hyst.tau_s > 0.0 ? hyst.residual_ohm * std::exp(-dt / hyst.tau_s) : 0.0;
    return rf_model(params, force_n) + residual;
}

FitResult fit_rf(const std::vector<std::pair<double, double>>& anchors) {
    if (anchors.size() < 4)
        throw InsufficientAnchorsError("need at least 4 anchors, got " +
                                       std::to_string(anchors.size()));
    bool has_zero = false;
    for (const auto& [f, r] : anchors) {
        if (std::abs(f) < 1e-9) has_zero = true;
        if (r <= 0.0) throw std::invalid_argument("anchor resistances must be positive");
        if (f < 0.0) throw std::invalid_argument("anchor forces must be non-negative");
    }
    if (!has_zero) throw InsufficientAnchorsError("anchors must include F = 0");

    double rest0 = anchors[0].second;
    double r_max = 0.0, r_min = 1e30, f_of_max = 25.0;
    for (const auto& [f, r] : anchors) {
        if (std::abs(f) < 1e-9) rest0 = r;
        if (r > r_max) {
            r_max = r;
            f_of_max = std::max(f, 10.0);
        }
        r_min = std::min(r_min, r);
    }

    const Bounds bounds;
    Eigen::VectorXd best;
    double best_residual = 1e30;
    // A few deterministic starts cover the bump/fall scale ambiguity.
    const double scale_starts[][2] = {{f_of_max, 45.0}, {25.0, 80.0}, {15.0, 25.0}};
    for (const auto& s : scale_starts) {
        Eigen::VectorXd p(kFitParams);
        p << rest0, std::max(4.0 * (r_max - rest0), 50.0), std::clamp(s[0], 6.0, 79.0),
            std::max(rest0 - r_min + (r_max - rest0), 50.0), s[1];
        for (int k = 0; k < kFitParams; ++k) p[k] = std::clamp(p[k], bounds.lo[k], bounds.hi[k]);
        p = levenberg_marquardt(p, anchors, bounds);
        const double residual = relative_residuals(p, anchors).lpNorm<Eigen::Infinity>();
        if (residual < best_residual) {
            best_residual = residual;
            best = p;
        }
        if (best_residual < 1e-10) break;
    }

    // Four anchors underdetermine the five parameters, and the least-squares
    // optimum tends to park the bump too far left. Walk the near-optimal
    // family by pinning the rise scale on a grid and keep the member whose
    // peak lands closest to the highest-resistance anchor while staying well
    // inside the residual budget. Five or more anchors pin the curve, so the
    // plain optimum stands.
    if (anchors.size() == 4 && best_residual < 0.007 && r_max > rest0) {
        Eigen::VectorXd chosen = best;
        double chosen_gap = std::abs(curve_peak_force(from_vector(best)) - f_of_max);
        for (double fa = 8.0; fa <= 70.0; fa += 1.0) {
            Eigen::VectorXd p = best;
            p[2] = fa;
            p = levenberg_marquardt(p, anchors, bounds, 1u << 2);
            if (relative_residuals(p, anchors).lpNorm<Eigen::Infinity>() > 0.007) continue;
            const double gap = std::abs(curve_peak_force(from_vector(p)) - f_of_max);
            if (gap < chosen_gap - 1e-9) {
                chosen_gap = gap;
                chosen = p;
            }
        }
        best = chosen;
        best_residual = relative_residuals(best, anchors).lpNorm<Eigen::Infinity>();
    }

    if (best_residual >= 0.01)
        throw NoConvergenceError("fit did not reach 1% relative residual (best " +
                                     std::to_string(best_residual) + ")",
                                 best_residual);
    FitResult out;
    out.params = from_vector(best);
    out.max_relative_residual = best_residual;
    return out;
}

HysteresisState release_load(const ResponseParams& params, double f_prev_n, double t_s,
                             double residual_max_ohm, double f_ref_n, double tau_s) {
    (void)params;
    if (f_prev_n < 0.0) throw std::invalid_argument("force must be non-negative");
    HysteresisState state;
    state.residual_ohm = residual_max_ohm * std::min(1.0, f_prev_n / f_ref_n);
    state.release_time_s = t_s;
    state.tau_s = tau_s;
    return state;
}

double divider_voltage(double r_sensor_ohm, const ReadoutConfig& cfg) {
    if (!(r_sensor_ohm > 0.0)) throw std::invalid_argument("sensor resistance must be positive");
    return cfg.vcc * cfg.r_ref / (r_sensor_ohm + cfg.r_ref);
}

int adc_counts(double voltage, const ReadoutConfig& cfg) {
    if (voltage < 0.0 || voltage > cfg.vcc)
        throw std::invalid_argument("voltage outside the ADC range");
    const int full_scale = (1 << cfg.adc_bits) - 1;
    return int(std::llround(voltage * full_scale / cfg.vcc));
}

double adc_to_resistance(int counts, const ReadoutConfig& cfg) {
    const int full_scale = (1 << cfg.adc_bits) - 1;
    if (counts <= 0 || counts >= full_scale)
        throw RangeSaturatedError("count " + std::to_string(counts) +
                                  " is at the ADC rail; resistance is unrecoverable");
    // Divider inversion on the count center: V = counts * Vcc / full_scale.
    return cfg.r_ref * double(full_scale - counts) / double(counts);
}

double force_from_resistance(const ResponseParams& params, double r_ohm) {
    const double f_lo = params.rise_scale_n;
    const double f_hi = 200.0;
    const double r_hi = rf_model(params, f_lo);  // branch maximum
    const double r_lo = rf_model(params, f_hi);  // branch minimum
    if (r_ohm > r_hi + 1e-12 || r_ohm < r_lo - 1e-12)
        throw OutOfBranchError("resistance outside the descending branch (" +
                               std::to_string(r_lo) + " to " + std::to_string(r_hi) + " ohm)");
    double lo = f_lo, hi = f_hi;
    while (hi - lo > 1e-5) {
        const double mid = 0.5 * (lo + hi);
        if (rf_model(params, mid) >= r_ohm)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double force_to_pressure(double force_n, double tip_diameter_mm) {
    if (force_n < 0.0 || !(tip_diameter_mm > 0.0))
        throw std::invalid_argument("need non-negative force and positive tip diameter");
    const double d_m = tip_diameter_mm * 1e-3;
    return force_n / (M_PI * d_m * d_m / 4.0);
}

namespace {

json params_to_json(const ResponseParams& p) {
    return json{{"wire_ohm", p.wire_ohm},
                {"rest_ohm", p.rest_ohm},
                {"rise_ohm", p.rise_ohm},
                {"rise_scale_n", p.rise_scale_n},
                {"fall_ohm", p.fall_ohm},
                {"fall_scale_n", p.fall_scale_n},
                {"saturation_n", p.saturation_n}};
}

ResponseParams params_from_json(const json& j) {
    ResponseParams p;
    p.wire_ohm = j.value("wire_ohm", p.wire_ohm);
    p.rest_ohm = j.at("rest_ohm").get<double>();
    p.rise_ohm = j.at("rise_ohm").get<double>();
    p.rise_scale_n = j.at("rise_scale_n").get<double>();
    p.fall_ohm = j.at("fall_ohm").get<double>();
    p.fall_scale_n = j.at("fall_scale_n").get<double>();
    p.saturation_n = j.value("saturation_n", p.saturation_n);
    return p;
}

}  // namespace

std::map<std::string, ResponseParams> load_presets(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open preset file: " + path);
    json doc = json::parse(in);
    if (doc.value("version", 0) != 1)
        throw std::runtime_error("unsupported preset file version in " + path);
    std::map<std::string, ResponseParams> out;
    for (const auto& [name, j] : doc.at("presets").items()) out[name] = params_from_json(j);
    return out;
}

std::string serialize_params(const ResponseParams& params) {
    json doc = params_to_json(params);
    doc["version"] = 1;
    return doc.dump(2) + "\n";
}

ResponseParams parse_params(const std::string& text) {
    json doc = json::parse(text);
    if (doc.value("version", 0) != 1) throw std::runtime_error("unsupported params version");
    return params_from_json(doc);
}

ResponseParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open params file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_params(buf.str());
}

void save_params(const ResponseParams& params, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write params file: " + path);
    out << serialize_params(params);
}

}  // namespace piezoskin
