#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "wofe3d/geometry.hpp"

using namespace wofe3d;

namespace {

// O(n^3) hull oracle: a directed edge (a, b) is on the hull iff every other
// point lies on or left of it and the edge is extreme (some point strictly
// left exists or all are collinear-free).
std::set<std::pair<double, double>> brute_force_hull_points(const std::vector<Vec2>& pts) {
    std::set<std::pair<double, double>> hull;
    const std::size_t n = pts.size();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            if (pts[a] == pts[b]) continue;
            bool all_left = true;
            bool any_strict = false;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == a || c == b) continue;
                const double cr = cross2(pts[a], pts[b], pts[c]);
                if (cr < 0.0) {
                    all_left = false;
                    break;
                }
                if (cr > 0.0) any_strict = true;
            }
            if (all_left && any_strict) {
                hull.insert({pts[a].x, pts[a].y});
                hull.insert({pts[b].x, pts[b].y});
            }
        }
    }
    return hull;
}

double polygon_signed_area(const std::vector<Vec2>& v) {
    double s = 0.0;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        s += v[j].x * v[i].y - v[i].x * v[j].y;
    }
    return 0.5 * s;
}

}  // namespace

TEST_CASE("convex hull of a convex set is itself, in CCW order") {
    const std::vector<Vec2> corners{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const Polygon2D hull = convex_hull(corners);
    REQUIRE(hull.vertices().size() == 4);
    CHECK(polygon_signed_area(hull.vertices()) > 0.0);  // CCW
    for (const auto& c : corners) {
        CHECK(std::count(hull.vertices().begin(), hull.vertices().end(), c) == 1);
    }
}

TEST_CASE("interior points are dropped from the hull") {
    const std::vector<Vec2> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
    const Polygon2D hull = convex_hull(pts);
    CHECK(hull.vertices().size() == 4);
    CHECK(std::count(hull.vertices().begin(), hull.vertices().end(), Vec2{0.5, 0.5}) == 0);
}

TEST_CASE("hull of random clouds matches the brute-force edge oracle") {
    std::mt19937_64 rng(7);
    auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Vec2> pts;
        for (int i = 0; i < 100; ++i) pts.push_back({unit() * 100.0, unit() * 100.0});
        const Polygon2D hull = convex_hull(pts);

        std::set<std::pair<double, double>> got;
        for (const auto& v : hull.vertices()) got.insert({v.x, v.y});
        CHECK(got == brute_force_hull_points(pts));

        for (const auto& p : pts) CHECK(hull.contains(p));
        CHECK(polygon_signed_area(hull.vertices()) > 0.0);
    }
}

TEST_CASE("degenerate hull inputs are rejected") {
    CHECK_THROWS_AS(convex_hull(std::vector<Vec2>{{0, 0}, {1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(convex_hull(std::vector<Vec2>{{0, 0}, {1, 1}, {2, 2}, {3, 3}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(convex_hull(std::vector<Vec2>{{1, 1}, {1, 1}, {1, 1}}), std::invalid_argument);
}

TEST_CASE("polygon containment includes the boundary") {
    const Polygon2D square(std::vector<Vec2>{{0, 0}, {10, 0}, {10, 10}, {0, 10}});
    CHECK(square.contains({5, 5}));
    CHECK(square.contains({0, 5}));    // edge
    CHECK(square.contains({10, 10}));  // vertex
    CHECK(!square.contains({10.0001, 5}));
    CHECK(!square.contains({-0.0001, 5}));
    CHECK(square.area() == doctest::Approx(100.0));
}

TEST_CASE("non-convex polygons are supported by containment") {
    // L-shape
    const Polygon2D ell(std::vector<Vec2>{{0, 0}, {4, 0}, {4, 2}, {2, 2}, {2, 4}, {0, 4}});
    CHECK(ell.contains({1, 3}));
    CHECK(ell.contains({3, 1}));
    CHECK(!ell.contains({3, 3}));
}

TEST_CASE("point-triangle distance covers face, edge and vertex regions") {
    const Vec3 a{0, 0, 0}, b{10, 0, 0}, c{0, 10, 0};
    CHECK(point_triangle_distance({2, 2, 5}, a, b, c) == doctest::Approx(5.0));   // face
    CHECK(point_triangle_distance({-3, -4, 0}, a, b, c) == doctest::Approx(5.0)); // vertex a
    CHECK(point_triangle_distance({5, -2, 0}, a, b, c) == doctest::Approx(2.0));  // edge ab
    CHECK(point_triangle_distance({12, 0, 0}, a, b, c) == doctest::Approx(2.0));  // vertex b
    CHECK(point_triangle_distance({5, 2, 0}, a, b, c) == doctest::Approx(0.0));   // inside
}
