#include <doctest.h>

#include "piezoskin/geometry.hpp"

#include <cmath>
#include <random>

using namespace piezoskin;

namespace {

Polygon l_shape() {
    // 20x20 square with a 10x10 bite out of the top-right corner.
    Polygon p;
    p.pts = {Vec2(0, 0), Vec2(20, 0), Vec2(20, 10), Vec2(10, 10), Vec2(10, 20), Vec2(0, 20)};
    return p;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("shoelace area and orientation") {
    Polygon sq = Polygon::rect(0, 0, 40, 40);
    CHECK(signed_area(sq) == doctest::Approx(1600.0));
    CHECK(is_ccw(sq));
    CHECK(is_simple(sq));

    Polygon l = l_shape();
    CHECK(signed_area(l) == doctest::Approx(300.0));
    CHECK(is_simple(l));

    Polygon bowtie;
    bowtie.pts = {Vec2(0, 0), Vec2(10, 10), Vec2(10, 0), Vec2(0, 10)};
    CHECK_FALSE(is_simple(bowtie));
}

TEST_CASE("point containment") {
    Polygon l = l_shape();
    CHECK(contains(l, Vec2(5, 5)));
    CHECK(contains(l, Vec2(15, 5)));
    CHECK_FALSE(contains(l, Vec2(15, 15)));
    CHECK(contains(l, Vec2(0, 0)));  // boundary counts
    CHECK(contains(l, Vec2(10, 15)));

    Region frame(Polygon::rect(0, 0, 40, 40), {Polygon::rect(10, 10, 30, 30)});
    CHECK(contains(frame, Vec2(5, 5)));
    CHECK_FALSE(contains(frame, Vec2(20, 20)));
    CHECK(region_area(frame) == doctest::Approx(1600.0 - 400.0));
}

TEST_CASE("offset square inset") {
    Polygon sq = Polygon::rect(0, 0, 40, 40);
    auto out = offset_polygon(sq, 0.8);
    REQUIRE(out.size() == 1);
    CHECK(polygon_area(out[0]) == doctest::Approx(38.4 * 38.4));
    BBox box = bounding_box(out[0]);
    CHECK(box.min.x() == doctest::Approx(0.8));
    CHECK(box.max.y() == doctest::Approx(39.2));
}

TEST_CASE("offset collapse returns empty") {
    Polygon tiny = Polygon::rect(0, 0, 1, 1);
    CHECK(offset_polygon(tiny, 0.8).empty());
}

TEST_CASE("offset L-shape shrinks area") {
    Polygon l = l_shape();
    auto out = offset_polygon(l, 0.4);
    REQUIRE(out.size() == 1);
    // Shoelace on the offset result must come out strictly below the input.
    CHECK(polygon_area(out[0]) < polygon_area(l));
    CHECK(is_simple(out[0]));
    for (const Vec2& p : out[0].pts) {
        CHECK(contains(l, p));
        CHECK(boundary_distance(l, p) >= 0.4 - 1e-6);
    }
}

TEST_CASE("outward offset grows") {
    Polygon sq = Polygon::rect(0, 0, 10, 10);
    auto out = offset_polygon(sq, -0.5);
    REQUIRE(out.size() == 1);
    CHECK(polygon_area(out[0]) == doctest::Approx(11.0 * 11.0));
}

TEST_CASE("clip polyline to region with hole") {
    Region frame(Polygon::rect(0, 0, 40, 40), {Polygon::rect(10, 10, 30, 30)});
    Polyline line = {Vec2(-5, 20), Vec2(45, 20)};
    auto parts = clip_polyline(line, frame);
    REQUIRE(parts.size() == 2);
    CHECK(polyline_length(parts[0]) == doctest::Approx(10.0));
    CHECK(polyline_length(parts[1]) == doctest::Approx(10.0));
}

TEST_CASE("clip keeps chains across vertices") {
    Region sq(Polygon::rect(0, 0, 10, 10));
    Polyline zig = {Vec2(1, 1), Vec2(9, 1), Vec2(9, 9), Vec2(1, 9)};
    auto parts = clip_polyline(zig, sq);
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].size() == 4);
    CHECK(polyline_length(parts[0]) == doctest::Approx(24.0));
}

TEST_CASE("clip drops short fragments") {
    Region sq(Polygon::rect(0, 0, 10, 10));
    Polyline graze = {Vec2(-1, 9.95), Vec2(0.05, 9.95)};
    auto parts = clip_polyline(graze, sq, 0.2);
    CHECK(parts.empty());
}

TEST_CASE("chain segments merges into polylines") {
    std::vector<std::pair<Vec2, Vec2>> segs = {
        {Vec2(0, 0), Vec2(1, 0)}, {Vec2(1, 0), Vec2(1, 1)}, {Vec2(1, 1), Vec2(0, 1)}};
    auto chains = chain_segments(segs);
    REQUIRE(chains.size() == 1);
    CHECK(chains[0].pts.size() == 4);
    CHECK_FALSE(chains[0].closed);

    segs.push_back({Vec2(0, 1), Vec2(0, 0)});
    chains = chain_segments(segs);
    REQUIRE(chains.size() == 1);
    CHECK(chains[0].closed);
    CHECK(chains[0].pts.size() == 4);
}

TEST_CASE("chain segments order independent") {
    std::vector<std::pair<Vec2, Vec2>> segs = {
        {Vec2(0, 0), Vec2(1, 0)}, {Vec2(2, 0), Vec2(1, 0)}, {Vec2(2, 0), Vec2(3, 0)},
        {Vec2(5, 5), Vec2(6, 5)}};
    auto a = chain_segments(segs);
    std::mt19937 rng(7);
    std::shuffle(segs.begin(), segs.end(), rng);
    std::swap(segs[0].first, segs[0].second);
    auto b = chain_segments(segs);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].pts.size() == b[i].pts.size());
        for (std::size_t j = 0; j < a[i].pts.size(); ++j)
            CHECK((a[i].pts[j] - b[i].pts[j]).norm() < 1e-9);
    }
}

TEST_CASE("segment distances") {
    CHECK(point_segment_distance(Vec2(0, 1), Vec2(-1, 0), Vec2(1, 0)) == doctest::Approx(1.0));
    CHECK(segment_segment_distance(Vec2(0, 0), Vec2(1, 0), Vec2(0, 2), Vec2(1, 2)) ==
          doctest::Approx(2.0));
    CHECK(segment_segment_distance(Vec2(0, -1), Vec2(0, 1), Vec2(-1, 0), Vec2(1, 0)) ==
          doctest::Approx(0.0));
}

}  // TEST_SUITE
