#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "arbsim/geometry.hpp"
#include "arbsim/random.hpp"

using namespace arbsim;

TEST_CASE("wrap_angle maps into [-pi, pi)") {
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(kPi) == Catch::Approx(-kPi));
    CHECK(wrap_angle(-kPi) == Catch::Approx(-kPi));
    CHECK(wrap_angle(3.0 * kPi) == Catch::Approx(-kPi));
    for (double a = -20.0; a < 20.0; a += 0.37) {
        const double w = wrap_angle(a);
        CHECK(w >= -kPi);
        CHECK(w < kPi);
        CHECK(std::abs(std::remainder(w - a, 2.0 * kPi)) < 1e-9);
    }
}

TEST_CASE("body frame transform") {
    // object 10 m ahead of an ego heading north
    const Vec2 p = to_body_frame({0.0, 10.0}, {0.0, 0.0}, kPi / 2.0);
    CHECK(p.x == Catch::Approx(10.0));
    CHECK(p.y == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("point in oriented rectangle") {
    const OrientedRect r{{5.0, 0.0}, 0.0, 4.0, 2.0};
    CHECK(point_in_rect({5.0, 0.0}, r));
    CHECK(point_in_rect({7.0, 1.0}, r));  // corner inclusive
    CHECK(!point_in_rect({7.1, 0.0}, r));
    const OrientedRect turned{{0.0, 0.0}, kPi / 4.0, 4.0, 2.0};
    CHECK(point_in_rect(rotate({1.9, 0.0}, kPi / 4.0), turned));
    CHECK(!point_in_rect({1.9, 0.0}, turned));
}

namespace {

// Sampling-based overlap oracle: dense point grid over rectangle b.
bool overlap_by_sampling(const OrientedRect& a, const OrientedRect& b) {
    const int n = 80;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            const double u = (static_cast<double>(i) / n - 0.5) * b.length;
            const double v = (static_cast<double>(j) / n - 0.5) * b.width;
            const Vec2 p = b.center + rotate({u, v}, b.heading);
            if (point_in_rect(p, a)) return true;
        }
    return false;
}

}  // namespace

TEST_CASE("rectangle overlap agrees with a sampling oracle") {
    RandomSource rng(2024);
    int overlaps = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const OrientedRect a{{rng.uniform(-5, 5), rng.uniform(-5, 5)},
                             rng.uniform(-kPi, kPi), rng.uniform(1, 6), rng.uniform(1, 4)};
        const OrientedRect b{{rng.uniform(-5, 5), rng.uniform(-5, 5)},
                             rng.uniform(-kPi, kPi), rng.uniform(1, 6), rng.uniform(1, 4)};
        const bool got = rects_overlap(a, b);
        const bool approx = overlap_by_sampling(a, b) || overlap_by_sampling(b, a);
        if (approx) CHECK(got);  // sampled hit implies true overlap
        if (got) ++overlaps;
    }
    CHECK(overlaps > 50);  // the trial mix exercises both outcomes
}

TEST_CASE("rectangles touching edge to edge count as overlapping") {
    const OrientedRect a{{0.0, 0.0}, 0.0, 4.0, 2.0};
    const OrientedRect b{{4.0, 0.0}, 0.0, 4.0, 2.0};
    CHECK(rects_overlap(a, b));
    const OrientedRect c{{4.01, 0.0}, 0.0, 4.0, 2.0};
    CHECK(!rects_overlap(a, c));
}

TEST_CASE("point in polygon") {
    const std::vector<Vec2> square = {{0, 0}, {10, 0}, {10, 10}, {0, 10}};
    CHECK(point_in_polygon({5, 5}, square));
    CHECK(!point_in_polygon({-1, 5}, square));
    CHECK(!point_in_polygon({11, 5}, square));
    const std::vector<Vec2> tri = {{0, 0}, {4, 0}, {0, 4}};
    CHECK(point_in_polygon({1, 1}, tri));
    CHECK(!point_in_polygon({3, 3}, tri));
}

TEST_CASE("polyline arc length and projection") {
    const Polyline line({{0, 0}, {10, 0}, {10, 10}});
    CHECK(line.length() == Catch::Approx(20.0));
    CHECK(line.at(5.0).x == Catch::Approx(5.0));
    CHECK(line.at(15.0).x == Catch::Approx(10.0));
    CHECK(line.at(15.0).y == Catch::Approx(5.0));
    CHECK(line.at(25.0).y == Catch::Approx(10.0));  // clamped
    CHECK(line.heading_at(5.0) == Catch::Approx(0.0));
    CHECK(line.heading_at(15.0) == Catch::Approx(kPi / 2.0));
    CHECK(line.project({3.0, 4.0}) == Catch::Approx(3.0));
    CHECK(line.project({12.0, 3.0}) == Catch::Approx(13.0));
    CHECK(line.distance({3.0, 4.0}) == Catch::Approx(4.0));
}
