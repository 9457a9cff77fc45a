#pragma once

#include <span>
#include <vector>

namespace wofe3d {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Vec2&) const = default;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Vec3&) const = default;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(const Vec3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

double distance(const Vec3& a, const Vec3& b);
double distance_sq(const Vec3& a, const Vec3& b);

// z-component of the cross product (a - o) x (b - o).
inline double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Closed 2D polygon stored without a repeated closing vertex.
class Polygon2D {
public:
    Polygon2D() = default;
    explicit Polygon2D(std::vector<Vec2> vertices);

    const std::vector<Vec2>& vertices() const { return vertices_; }
    double area() const;

    // Boundary points count as inside.
    bool contains(const Vec2& p) const;

private:
    std::vector<Vec2> vertices_;
};

// Convex hull by monotone chain. Result is CCW starting at the
// lexicographically smallest vertex; collinear points along hull edges are
// dropped. Throws std::invalid_argument for < 3 distinct points or an
// all-collinear set.
Polygon2D convex_hull(std::span<const Vec2> points);

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace wofe3d
