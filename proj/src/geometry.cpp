#include "wofe3d/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wofe3d {

double distance_sq(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

double distance(const Vec3& a, const Vec3& b) { return std::sqrt(distance_sq(a, b)); }

namespace {

bool lex_less(const Vec2& a, const Vec2& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
}

bool point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    if (cross2(a, b, p) != 0.0) return false;
    return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) &&
           p.y >= std::min(a.y, b.y) && p.y <= std::max(a.y, b.y);
}

double signed_area2(const std::vector<Vec2>& v) {
    double s = 0.0;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        s += v[j].x * v[i].y - v[i].x * v[j].y;
    }
    return s;
}

}  // namespace

Polygon2D::Polygon2D(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    if (signed_area2(vertices_) == 0.0) throw std::invalid_argument("polygon area must be positive");
}

double Polygon2D::area() const { return 0.5 * std::fabs(signed_area2(vertices_)); }

bool Polygon2D::contains(const Vec2& p) const {
    const auto& v = vertices_;
    const std::size_t n = v.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        if (point_on_segment(p, v[j], v[i])) return true;
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const bool crosses = (v[i].y > p.y) != (v[j].y > p.y);
        if (!crosses) continue;
        const double x_at = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
        if (p.x < x_at) inside = !inside;
    }
    return inside;
}

Polygon2D convex_hull(std::span<const Vec2> points) {
    std::vector<Vec2> pts(points.begin(), points.end());
    if (pts.size() < 3) throw std::invalid_argument("convex hull needs at least 3 points");
    std::sort(pts.begin(), pts.end(), lex_less);
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    if (pts.size() < 3) throw std::invalid_argument("convex hull needs at least 3 distinct points");

    const std::size_t n = pts.size();
    std::vector<Vec2> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {  // lower chain
        while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {  // upper chain
        while (k >= lower && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    if (hull.size() < 3) throw std::invalid_argument("convex hull is degenerate (collinear points)");
    return Polygon2D(std::move(hull));
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 ab = b - a;
    const double len_sq = dot(ab, ab);
    if (len_sq == 0.0) return distance(p, a);
    double t = dot(p - a, ab) / len_sq;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, a + ab * t);
}

// Closest point on a triangle via Voronoi region classification.
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a;
    const Vec3 ac = c - a;
    const Vec3 ap = p - a;
    const double d1 = dot(ab, ap);
    const double d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return distance(p, a);

    const Vec3 bp = p - b;
    const double d3 = dot(ab, bp);
    const double d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return distance(p, b);

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double t = d1 / (d1 - d3);
        return distance(p, a + ab * t);
    }

    const Vec3 cp = p - c;
    const double d5 = dot(ab, cp);
    const double d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return distance(p, c);

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double t = d2 / (d2 - d6);
        return distance(p, a + ac * t);
    }

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return distance(p, b + (c - b) * t);
    }

    const double denom = va + vb + vc;
    if (denom == 0.0) {  // degenerate triangle, fall back to edges
        return std::min({point_segment_distance(p, a, b), point_segment_distance(p, b, c),
                         point_segment_distance(p, a, c)});
    }
    const double v = vb / denom;
    const double w = vc / denom;
    return distance(p, a + ab * v + ac * w);
}

}  // namespace wofe3d
