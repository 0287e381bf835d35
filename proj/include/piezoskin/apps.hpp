#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace piezoskin {

struct TimeSeriesFrame {
    double t_s = 0.0;
    std::vector<double> channels;  // ADC counts, or ohms after conversion
};

struct Session {
    std::vector<TimeSeriesFrame> frames;

    int channel_count() const { return frames.empty() ? 0 : int(frames[0].channels.size()); }
    double duration_s() const {
        return frames.size() < 2 ? 0.0 : frames.back().t_s - frames.front().t_s;
    }
};

struct ActivityConfig {
    double window_s = 0.2;           // sliding variance window
    double k = 6.0;                  // activity threshold multiple
    double quiet_fraction = 0.2;     // share of quietest windows used as the noise reference
    double noise_floor_counts = 0.5; // half-count quantization floor
    double min_duration_s = 4.0;
    double min_rate_hz = 10.0;
    double period_lo_s = 0.4;
    double period_hi_s = 3.0;
    double autocorr_confidence = 0.3;
};

struct ChannelActivity {
    int channel = 0;
    double variance = 0.0;            // max sliding-window variance
    std::optional<double> period_s;   // autocorrelation peak when confident
    bool active = false;
};

struct TooShortError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Active when the strongest window variance exceeds k times the squared
// deviation of the quietest windows; the per-channel normalization keeps the
// decision invariant to affine rescaling of the counts.
ChannelActivity channel_activity(const Session& session, int channel,
                                 const ActivityConfig& cfg = {});

enum class GaitClass { Walking, Stairs, Idle };
const char* to_string(GaitClass cls);

struct GaitLayout {
    std::vector<int> heel_channels;
};

struct GaitReport {
    GaitClass cls = GaitClass::Idle;
    std::vector<ChannelActivity> channels;
};

GaitReport classify_gait(const Session& session, const GaitLayout& layout,
                         const ActivityConfig& cfg = {});

enum class GraspZone { Fingertip, Deep };
enum class GraspDecision { Fingertip, Deep, None, Ambiguous };
const char* to_string(GraspDecision decision);

// Zone of the tile with the largest |delta R| among tiles above threshold;
// Ambiguous when near-tied tiles disagree on the zone.
GraspDecision localize_grasp(const std::vector<double>& before_ohm,
                             const std::vector<double>& after_ohm, double threshold_ohm,
                             const std::map<int, GraspZone>& zone_map,
                             double tie_fraction = 0.05);

// Session CSV: header "t_s,ch0,...,chN", one frame per row, t strictly
// increasing.
Session parse_session_csv(const std::string& text);
std::string serialize_session_csv(const Session& session);
Session load_session_csv(const std::string& path);

GaitLayout parse_gait_layout(const std::string& text);
GaitLayout load_gait_layout(const std::string& path);

struct GraspLayout {
    std::map<int, GraspZone> zones;
    double threshold_ohm = 500.0;
};
GraspLayout parse_grasp_layout(const std::string& text);
GraspLayout load_grasp_layout(const std::string& path);

}  // namespace piezoskin
