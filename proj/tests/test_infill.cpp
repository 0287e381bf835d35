#include <doctest.h>

#include "piezoskin/infill.hpp"

#include <cmath>
#include <set>
#include <sstream>

using namespace piezoskin;

namespace {

const InfillPattern kAllPatterns[] = {InfillPattern::Grid,    InfillPattern::Honeycomb,
                                      InfillPattern::ThreeDHoneycomb, InfillPattern::Gyroid,
                                      InfillPattern::Cubic,   InfillPattern::ArchimedeanChords};

InfillRequest square_request(InfillPattern pattern, double density, double z = 0.2,
                             int layer = 0) {
    InfillRequest req;
    req.pattern = pattern;
    req.density = density;
    req.layer_index = layer;
    req.z = z;
    req.region = Region(Polygon::rect(0, 0, 40, 40));
    req.width = 0.4;
    return req;
}

std::string fingerprint(const std::vector<Toolpath>& paths) {
    std::ostringstream os;
    for (const Toolpath& tp : paths) {
        os << tp.closed << ";";
        for (const Vec2& p : tp.points) os << p.x() << "," << p.y() << " ";
        os << "\n";
    }
    return os.str();
}

// Per-layer average over one vertical period for z-varying patterns.
double period_average_density(InfillPattern pattern, double density) {
    const double width = 0.4;
    const double period = default_period(pattern, density, width);
    const double vp = pattern_vertical_period(pattern, period);
    const double layer_height = 0.2;
    const int layers = vp > 0.0 ? std::max(1, int(std::round(vp / layer_height))) : 1;
    double acc = 0.0;
    for (int i = 0; i < layers; ++i) {
        InfillRequest req = square_request(pattern, density, (i + 1) * layer_height, i);
        acc += measured_density(generate_infill(req).paths, 1600.0);
    }
    return acc / layers;
}

}  // namespace

TEST_SUITE("infill") {

TEST_CASE("line spacing law") {
    CHECK(line_spacing(0.10, 0.4) == doctest::Approx(4.0));
    CHECK(line_spacing(1.0, 0.4) == doctest::Approx(0.4));
    CHECK(line_spacing(0.15, 0.4) == doctest::Approx(0.4 / 0.15));
    CHECK_THROWS_AS(line_spacing(0.0, 0.4), std::invalid_argument);
    CHECK_THROWS_AS(line_spacing(1.2, 0.4), std::invalid_argument);
}

TEST_CASE("offset region examples") {
    auto inset = offset_region(Polygon::rect(0, 0, 40, 40), 0.8);
    REQUIRE(inset.size() == 1);
    CHECK(polygon_area(inset[0]) == doctest::Approx(38.4 * 38.4));
    CHECK(offset_region(Polygon::rect(0, 0, 1, 1), 0.8).empty());
}

TEST_CASE("walls") {
    Polygon sq = Polygon::rect(0, 0, 40, 40);
    auto two = generate_walls(sq, 0.8, 0.4, Material::ConductiveTPU);
    REQUIRE(two.size() == 2);
    CHECK(two[0].closed);
    // Loop centerlines at width/2 and 3*width/2.
    CHECK(bounding_box(Polygon(two[0].points)).min.x() == doctest::Approx(0.2));
    CHECK(bounding_box(Polygon(two[1].points)).min.x() == doctest::Approx(0.6));

    CHECK(generate_walls(sq, 0.0, 0.4, Material::ConductiveTPU).empty());
    CHECK_THROWS_AS(generate_walls(sq, 0.6, 0.4, Material::ConductiveTPU), std::invalid_argument);
}

TEST_CASE("grid structure at 10 percent") {
    auto res = generate_infill(square_request(InfillPattern::Grid, 0.10));
    CHECK_FALSE(res.region_too_small);
    // Two perpendicular families sharing the density budget: family spacing
    // 2 * width / density = 8 mm, five lines per direction on 40 mm.
    std::set<long long> xs, ys;
    for (const Toolpath& tp : res.paths) {
        REQUIRE(tp.points.size() >= 2);
        if (std::abs(tp.points.front().x() - tp.points.back().x()) < 1e-9)
            xs.insert(llround(tp.points.front().x() * 1e6));
        else
            ys.insert(llround(tp.points.front().y() * 1e6));
    }
    CHECK(xs.size() == 5);
    CHECK(ys.size() == 5);
    const double density = measured_density(res.paths, 1600.0);
    CHECK(density == doctest::Approx(0.10).epsilon(0.10));
}

TEST_CASE("density within ten percent for all patterns") {
    for (InfillPattern pattern : kAllPatterns) {
        for (double d : {0.10, 0.15}) {
            CAPTURE(to_string(pattern));
            CAPTURE(d);
            CHECK(period_average_density(pattern, d) == doctest::Approx(d).epsilon(0.10));
        }
    }
}

TEST_CASE("full density degenerates to solid") {
    for (InfillPattern pattern : kAllPatterns) {
        auto res = generate_infill(square_request(pattern, 1.0));
        CHECK(measured_density(res.paths, 1600.0) >= 0.98);
    }
}

TEST_CASE("gyroid vertices sit on the level set") {
    InfillRequest req = square_request(InfillPattern::Gyroid, 0.10, 1.0);
    req.period_hint = 8.0;
    auto res = generate_infill(req);
    REQUIRE(!res.paths.empty());
    for (const Toolpath& tp : res.paths)
        for (const Vec2& p : tp.points) CHECK(std::abs(gyroid_field(p, 1.0, 8.0)) < 0.05);
}

TEST_CASE("z varying patterns change across layers") {
    for (InfillPattern pattern :
         {InfillPattern::ThreeDHoneycomb, InfillPattern::Gyroid, InfillPattern::Cubic}) {
        const double period = default_period(pattern, 0.10, 0.4);
        const double vp = pattern_vertical_period(pattern, period);
        REQUIRE(vp > 0.0);
        auto a = generate_infill(square_request(pattern, 0.10, 0.2));
        auto b = generate_infill(square_request(pattern, 0.10, 0.2 + vp / 2.0));
        CAPTURE(to_string(pattern));
        CHECK(fingerprint(a.paths) != fingerprint(b.paths));
    }
}

TEST_CASE("grid and honeycomb are z independent") {
    for (InfillPattern pattern : {InfillPattern::Grid, InfillPattern::Honeycomb}) {
        auto a = generate_infill(square_request(pattern, 0.10, 0.2, 0));
        auto b = generate_infill(square_request(pattern, 0.10, 5.0, 17));
        CHECK(fingerprint(a.paths) == fingerprint(b.paths));
    }
}

TEST_CASE("determinism") {
    for (InfillPattern pattern : kAllPatterns) {
        InfillRequest req = square_request(pattern, 0.15, 0.6, 2);
        CHECK(fingerprint(generate_infill(req).paths) == fingerprint(generate_infill(req).paths));
    }
}

TEST_CASE("containment in a region with a hole") {
    Region ring(Polygon::rect(0, 0, 40, 40), {Polygon::rect(12, 12, 28, 28)});
    for (InfillPattern pattern : kAllPatterns) {
        InfillRequest req = square_request(pattern, 0.12, 0.4);
        req.region = ring;
        auto res = generate_infill(req);
        REQUIRE(!res.paths.empty());
        for (const Toolpath& tp : res.paths) {
            REQUIRE(tp.points.size() >= 2);
            for (std::size_t i = 1; i < tp.points.size(); ++i)
                CHECK((tp.points[i] - tp.points[i - 1]).norm() > 1e-9);
            for (const Vec2& p : tp.points) CHECK(contains(ring, p, 1e-6));
        }
    }
}

TEST_CASE("region smaller than a cell warns") {
    InfillRequest req = square_request(InfillPattern::Grid, 0.10);
    req.region = Region(Polygon::rect(0, 0, 5, 5));  // family spacing is 8 mm
    auto res = generate_infill(req);
    CHECK(res.region_too_small);
    CHECK(res.paths.empty());
}

TEST_CASE("solid raster count and coverage") {
    auto paths = generate_solid(Region(Polygon::rect(0, 0, 10, 10)), 0.4, 0.0,
                                Material::ConductiveTPU);
    CHECK(paths.size() == 25);
    CHECK(measured_density(paths, 100.0) >= 0.98);
}

TEST_CASE("solid of empty region is empty") {
    CHECK(generate_solid(Region(), 0.4, 0.0, Material::ConductiveTPU).empty());
}

TEST_CASE("alternating solid angles are perpendicular") {
    Region sq(Polygon::rect(0, 0, 10, 10));
    auto even = generate_solid(sq, 0.4, 0.0, Material::ConductiveTPU);
    auto odd = generate_solid(sq, 0.4, 90.0, Material::ConductiveTPU);
    REQUIRE(!even.empty());
    REQUIRE(!odd.empty());
    const Vec2 de = (even[0].points.back() - even[0].points.front()).normalized();
    const Vec2 dod = (odd[0].points.back() - odd[0].points.front()).normalized();
    CHECK(std::abs(de.dot(dod)) < 1e-9);
}

}  // TEST_SUITE
