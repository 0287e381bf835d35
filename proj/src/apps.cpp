#include "piezoskin/apps.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace piezoskin {

using nlohmann::json;

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + long(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + long(mid) - 1, v.end());
        m = 0.5 * (m + v[mid - 1]);
    }
    return m;
}

double variance_of(const double* x, std::size_t n) {
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x[i];
    mean /= double(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += (x[i] - mean) * (x[i] - mean);
    return acc / double(n);
}

}  // namespace

const char* to_string(GaitClass cls) {
    switch (cls) {
        case GaitClass::Walking: return "walking";
        case GaitClass::Stairs: return "stairs";
        case GaitClass::Idle: return "idle";
    }
    return "?";
}

const char* to_string(GraspDecision decision) {
    switch (decision) {
        case GraspDecision::Fingertip: return "fingertip";
        case GraspDecision::Deep: return "deep";
        case GraspDecision::None: return "none";
        case GraspDecision::Ambiguous: return "ambiguous";
    }
    return "?";
}

ChannelActivity channel_activity(const Session& session, int channel,
                                 const ActivityConfig& cfg) {
    if (channel < 0 || channel >= session.channel_count())
        throw std::invalid_argument("channel index out of range");
    const std::size_t n = session.frames.size();
    const double duration = session.duration_s();
    if (duration < cfg.min_duration_s)
        throw TooShortError("need at least " + std::to_string(cfg.min_duration_s) +
                            " s of data, have " + std::to_string(duration));
    const double rate = double(n - 1) / duration;
    if (rate < cfg.min_rate_hz)
        throw TooShortError("need at least " + std::to_string(cfg.min_rate_hz) + " Hz, have " +
                            std::to_string(rate));

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = session.frames[i].channels[std::size_t(channel)];

    // Sliding windows, half-window stride.
    const std::size_t window =
        std::max<std::size_t>(4, std::size_t(std::lround(cfg.window_s * rate)));
    const std::size_t stride = std::max<std::size_t>(1, window / 2);
    struct Win {
        std::size_t begin;
        double variance;
    };
    std::vector<Win> windows;
    for (std::size_t begin = 0; begin + window <= n; begin += stride)
        windows.push_back({begin, variance_of(x.data() + begin, window)});
    if (windows.empty()) windows.push_back({0, variance_of(x.data(), n)});

    ChannelActivity out;
    out.channel = channel;
    for (const Win& w : windows) out.variance = std::max(out.variance, w.variance);

    // Noise reference: deviation inside the quietest windows, each measured
    // around its own median so slow level changes do not contaminate it.
    // Normalizing the threshold by this per-channel scale keeps the decision
    // invariant to affine rescaling of the counts.
    std::vector<Win> sorted = windows;
    std::sort(sorted.begin(), sorted.end(),
              [](const Win& a, const Win& b) { return a.variance < b.variance; });
    const std::size_t quiet_count =
        std::max<std::size_t>(1, std::size_t(double(sorted.size()) * cfg.quiet_fraction));
    std::vector<double> window_mads;
    std::vector<double> dev(window);
    for (std::size_t w = 0; w < quiet_count; ++w) {
        std::vector<double> samples(x.begin() + long(sorted[w].begin),
                                    x.begin() + long(sorted[w].begin + window));
        const double med = median_of(samples);
        for (std::size_t i = 0; i < window; ++i) dev[i] = std::abs(samples[i] - med);
        window_mads.push_back(median_of(dev));
    }
    const double sigma_quiet =
        std::max(1.4826 * median_of(window_mads), cfg.noise_floor_counts);
    out.active = out.variance > cfg.k * sigma_quiet * sigma_quiet;

    // Dominant period from the autocorrelation peak.
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / double(n);
    double denom = 0.0;
    for (double v : x) denom += (v - mean) * (v - mean);
    if (denom > 1e-12) {
        const std::size_t lag_lo = std::max<std::size_t>(1, std::size_t(cfg.period_lo_s * rate));
        const std::size_t lag_hi =
            std::min(n - 2, std::size_t(std::lround(cfg.period_hi_s * rate)));
        double best_r = 0.0;
        std::size_t best_lag = 0;
        for (std::size_t lag = lag_lo; lag <= lag_hi; ++lag) {
            double acc = 0.0;
            for (std::size_t i = 0; i + lag < n; ++i) acc += (x[i] - mean) * (x[i + lag] - mean);
            const double r = acc / denom;
            if (r > best_r) {
                best_r = r;
                best_lag = lag;
            }
        }
        if (best_lag > lag_lo && best_lag < lag_hi && best_r > cfg.autocorr_confidence)
            out.period_s = double(best_lag) / rate;
    }
    return out;
}

GaitReport classify_gait(const Session& session, const GaitLayout& layout,
                         const ActivityConfig& cfg) {
    const int channels = session.channel_count();
    if (layout.heel_channels.empty())
        throw std::invalid_argument("layout does not designate any heel channels");
    for (int h : layout.heel_channels)
        if (h < 0 || h >= channels)
            throw std::invalid_argument("heel channel " + std::to_string(h) + " out of range");

    GaitReport report;
    for (int c = 0; c < channels; ++c)
        report.channels.push_back(channel_activity(session, c, cfg));

    auto is_heel = [&](int c) {
        return std::find(layout.heel_channels.begin(), layout.heel_channels.end(), c) !=
               layout.heel_channels.end();
    };
    bool all_rhythmic = true;
    bool any_active = false;
    bool heel_active = false;
    bool others_rhythmic = true;
    for (const ChannelActivity& a : report.channels) {
        const bool rhythmic = a.active && a.period_s.has_value();
        any_active = any_active || a.active;
        all_rhythmic = all_rhythmic && rhythmic;
        if (is_heel(a.channel))
            heel_active = heel_active || a.active;
        else
            others_rhythmic = others_rhythmic && rhythmic;
    }

    if (all_rhythmic)
        report.cls = GaitClass::Walking;
    else if (!heel_active && others_rhythmic && any_active)
        report.cls = GaitClass::Stairs;
    else if (!any_active)
        report.cls = GaitClass::Idle;
    else
        // Mixed picture: heel involvement separates walking from stairs.
        report.cls = heel_active ? GaitClass::Walking : GaitClass::Stairs;
    return report;
}

GraspDecision localize_grasp(const std::vector<double>& before_ohm,
                             const std::vector<double>& after_ohm, double threshold_ohm,
                             const std::map<int, GraspZone>& zone_map, double tie_fraction) {
    if (before_ohm.size() != after_ohm.size())
        throw std::invalid_argument("before/after tile counts differ");
    if (!(threshold_ohm > 0.0)) throw std::invalid_argument("threshold must be positive");

    std::vector<double> delta(before_ohm.size());
    for (std::size_t i = 0; i < delta.size(); ++i)
        delta[i] = std::abs(after_ohm[i] - before_ohm[i]);

    double max_delta = 0.0;
    for (double d : delta) max_delta = std::max(max_delta, d);
    if (max_delta <= threshold_ohm) return GraspDecision::None;

    std::optional<GraspZone> zone;
    for (std::size_t i = 0; i < delta.size(); ++i) {
        if (delta[i] <= threshold_ohm) continue;
        if (delta[i] < (1.0 - tie_fraction) * max_delta) continue;
        const auto it = zone_map.find(int(i));
        if (it == zone_map.end())
            throw std::invalid_argument("tile " + std::to_string(i) + " missing from zone map");
        if (zone && *zone != it->second) return GraspDecision::Ambiguous;
        zone = it->second;
    }
    return *zone == GraspZone::Fingertip ? GraspDecision::Fingertip : GraspDecision::Deep;
}

Session parse_session_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty session file");
    if (line.rfind("t_s", 0) != 0)
        throw std::runtime_error("session file must start with a t_s,ch0,... header");
    const std::size_t columns = std::size_t(std::count(line.begin(), line.end(), ',')) + 1;
    if (columns < 2) throw std::runtime_error("session file has no channel columns");

    Session session;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        TimeSeriesFrame frame;
        std::istringstream row(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(row, cell, ',')) {
            const double value = std::stod(cell);
            if (col == 0)
                frame.t_s = value;
            else
                frame.channels.push_back(value);
            ++col;
        }
        if (col != columns) throw std::runtime_error("ragged session row: " + line);
        if (!session.frames.empty() && frame.t_s <= session.frames.back().t_s)
            throw std::runtime_error("timestamps must be strictly increasing");
        session.frames.push_back(std::move(frame));
    }
    return session;
}

std::string serialize_session_csv(const Session& session) {
    std::ostringstream os;
    os << "t_s";
    for (int c = 0; c < session.channel_count(); ++c) os << ",ch" << c;
    os << "\n";
    os.precision(10);
    for (const TimeSeriesFrame& frame : session.frames) {
        os << frame.t_s;
        for (double v : frame.channels) os << "," << v;
        os << "\n";
    }
    return os.str();
}

Session load_session_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open session file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_session_csv(buf.str());
}

GaitLayout parse_gait_layout(const std::string& text) {
    json doc = json::parse(text);
    if (doc.value("version", 0) != 1) throw std::runtime_error("unsupported layout version");
    GaitLayout layout;
    for (const auto& h : doc.at("heel_channels")) layout.heel_channels.push_back(h.get<int>());
    return layout;
}

GaitLayout load_gait_layout(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open layout file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_gait_layout(buf.str());
}

GraspLayout parse_grasp_layout(const std::string& text) {
    json doc = json::parse(text);
    if (doc.value("version", 0) != 1) throw std::runtime_error("unsupported layout version");
    GraspLayout layout;
    layout.threshold_ohm = doc.value("threshold_ohm", layout.threshold_ohm);
    for (const auto& [tile, zone] : doc.at("zones").items()) {
        const std::string z = zone.get<std::string>();
        if (z != "fingertip" && z != "deep")
            throw std::runtime_error("unknown grasp zone: " + z);
        layout.zones[std::stoi(tile)] =
            z == "fingertip" ? GraspZone::Fingertip : GraspZone::Deep;
    }
    return layout;
}

GraspLayout load_grasp_layout(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open layout file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_grasp_layout(buf.str());
}

}  // namespace piezoskin
