#include <doctest.h>

#include "piezoskin/apps.hpp"
#include "session_synth.hpp"

#include <cmath>
#include <random>

using namespace piezoskin;
using piezoskin::testing::GaitKind;
using piezoskin::testing::make_gait_session;
using piezoskin::testing::make_grasp_snapshot;

namespace {

Session sine_session(double freq_hz, double amplitude, double duration_s = 10.0,
                     double rate_hz = 50.0) {
    std::mt19937 rng(17);
    std::normal_distribution<double> noise(0.0, 2.0);
    Session session;
    const int frames = int(duration_s * rate_hz);
    for (int i = 0; i < frames; ++i) {
        TimeSeriesFrame frame;
        frame.t_s = i / rate_hz;
        frame.channels = {400.0 + amplitude * std::sin(2.0 * M_PI * freq_hz * frame.t_s) +
                          noise(rng)};
        session.frames.push_back(frame);
    }
    return session;
}

const std::map<int, GraspZone> kZones = {{0, GraspZone::Fingertip},
                                         {1, GraspZone::Fingertip},
                                         {2, GraspZone::Deep},
                                         {3, GraspZone::Deep}};

}  // namespace

TEST_SUITE("apps") {

TEST_CASE("constant channel is inactive") {
    Session session;
    for (int i = 0; i < 400; ++i) {
        session.frames.push_back({i / 50.0, {123.0}});
    }
    ChannelActivity a = channel_activity(session, 0);
    CHECK_FALSE(a.active);
    CHECK_FALSE(a.period_s.has_value());
}

TEST_CASE("sinusoid is active with the right period") {
    ChannelActivity a = channel_activity(sine_session(1.0, 120.0), 0);
    CHECK(a.active);
    REQUIRE(a.period_s.has_value());
    CHECK(*a.period_s == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("short session raises") {
    Session session;
    for (int i = 0; i < 100; ++i) session.frames.push_back({i / 50.0, {0.0}});  // 2 s
    CHECK_THROWS_AS(channel_activity(session, 0), TooShortError);
}

TEST_CASE("gait classification on the synthetic fixtures") {
    GaitLayout layout{{4, 5}};
    for (std::uint32_t seed = 1; seed <= 8; ++seed) {
        CAPTURE(seed);
        CHECK(classify_gait(make_gait_session(GaitKind::Walking, seed), layout).cls ==
              GaitClass::Walking);
        CHECK(classify_gait(make_gait_session(GaitKind::Stairs, seed), layout).cls ==
              GaitClass::Stairs);
        CHECK(classify_gait(make_gait_session(GaitKind::Idle, seed), layout).cls ==
              GaitClass::Idle);
    }
}

TEST_CASE("stairs report shows quiet heels") {
    GaitLayout layout{{4, 5}};
    GaitReport report = classify_gait(make_gait_session(GaitKind::Stairs, 3), layout);
    REQUIRE(report.channels.size() == 6);
    CHECK_FALSE(report.channels[4].active);
    CHECK_FALSE(report.channels[5].active);
    for (int c = 0; c < 4; ++c) {
        CHECK(report.channels[std::size_t(c)].active);
        CHECK(report.channels[std::size_t(c)].period_s.has_value());
    }
}

TEST_CASE("missing heel designation is an error") {
    CHECK_THROWS_AS(classify_gait(make_gait_session(GaitKind::Walking, 1), GaitLayout{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(classify_gait(make_gait_session(GaitKind::Walking, 1), GaitLayout{{9}}),
                    std::invalid_argument);
}

TEST_CASE("classification is invariant to per channel affine rescaling") {
    GaitLayout layout{{4, 5}};
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> scale_dist(0.05, 40.0);
    std::uniform_real_distribution<double> offset_dist(-2000.0, 2000.0);
    for (GaitKind kind : {GaitKind::Walking, GaitKind::Stairs, GaitKind::Idle}) {
        Session session = make_gait_session(kind, 6);
        const GaitClass reference = classify_gait(session, layout).cls;
        for (int trial = 0; trial < 3; ++trial) {
            Session scaled = session;
            for (int c = 0; c < scaled.channel_count(); ++c) {
                const double alpha = scale_dist(rng);
                const double beta = offset_dist(rng);
                for (TimeSeriesFrame& frame : scaled.frames)
                    frame.channels[std::size_t(c)] =
                        alpha * frame.channels[std::size_t(c)] + beta;
            }
            CHECK(classify_gait(scaled, layout).cls == reference);
        }
    }
}

TEST_CASE("grasp localization matches the fixture decisions") {
    // Pressing near the fingertips moves tile 1 by 1.5 kOhm.
    auto [before_f, after_f] = make_grasp_snapshot(4, 1, 1500.0, 2);
    CHECK(localize_grasp(before_f, after_f, 500.0, kZones) == GraspDecision::Fingertip);

    // Pressing deep in the hand moves tile 3.
    auto [before_d, after_d] = make_grasp_snapshot(4, 3, 1500.0, 3);
    CHECK(localize_grasp(before_d, after_d, 500.0, kZones) == GraspDecision::Deep);

    // Nothing above threshold.
    std::vector<double> flat = {5000.0, 6000.0, 7000.0, 8000.0};
    CHECK(localize_grasp(flat, flat, 500.0, kZones) == GraspDecision::None);
}

TEST_CASE("near ties across zones are ambiguous") {
    std::vector<double> before = {5000.0, 5000.0, 5000.0, 5000.0};
    std::vector<double> after = {5000.0, 6500.0, 6470.0, 5000.0};
    CHECK(localize_grasp(before, after, 500.0, kZones) == GraspDecision::Ambiguous);
}

TEST_CASE("grasp is invariant to a common offset") {
    auto [before, after] = make_grasp_snapshot(4, 1, 1500.0, 7);
    const GraspDecision reference = localize_grasp(before, after, 500.0, kZones);
    for (double& v : before) v += 750.0;
    for (double& v : after) v += 750.0;
    CHECK(localize_grasp(before, after, 500.0, kZones) == reference);
}

TEST_CASE("grasp input validation") {
    std::vector<double> three = {1.0, 2.0, 3.0};
    std::vector<double> four = {1.0, 2.0, 3.0, 4.0};
    CHECK_THROWS_AS(localize_grasp(three, four, 500.0, kZones), std::invalid_argument);
    CHECK_THROWS_AS(localize_grasp(four, four, 0.0, kZones), std::invalid_argument);
}

TEST_CASE("session csv round trip") {
    Session session = make_gait_session(GaitKind::Walking, 4, 5.0, 20.0);
    Session back = parse_session_csv(serialize_session_csv(session));
    REQUIRE(back.frames.size() == session.frames.size());
    CHECK(back.channel_count() == session.channel_count());
    for (std::size_t i = 0; i < session.frames.size(); ++i) {
        CHECK(back.frames[i].t_s == doctest::Approx(session.frames[i].t_s).epsilon(1e-9));
        for (int c = 0; c < session.channel_count(); ++c)
            CHECK(back.frames[i].channels[std::size_t(c)] ==
                  doctest::Approx(session.frames[i].channels[std::size_t(c)]).epsilon(1e-9));
    }
}

TEST_CASE("session csv rejects malformed input") {
    CHECK_THROWS(parse_session_csv(""));
    CHECK_THROWS(parse_session_csv("x,y\n1,2\n"));
    CHECK_THROWS(parse_session_csv("t_s,ch0\n1.0,5\n0.5,6\n"));  // time goes backwards
    CHECK_THROWS(parse_session_csv("t_s,ch0,ch1\n0.0,5\n"));     // ragged row
}

TEST_CASE("layout files parse") {
    GaitLayout gait = parse_gait_layout("{\"version\":1,\"heel_channels\":[4,5]}");
    CHECK(gait.heel_channels == std::vector<int>{4, 5});

    GraspLayout grasp = parse_grasp_layout(
        "{\"version\":1,\"threshold_ohm\":500,"
        "\"zones\":{\"0\":\"fingertip\",\"1\":\"fingertip\",\"2\":\"deep\",\"3\":\"deep\"}}");
    CHECK(grasp.zones.at(1) == GraspZone::Fingertip);
    CHECK(grasp.zones.at(3) == GraspZone::Deep);
    CHECK(grasp.threshold_ohm == doctest::Approx(500.0));
    CHECK_THROWS(parse_grasp_layout("{\"version\":9,\"zones\":{}}"));
}

}  // TEST_SUITE
