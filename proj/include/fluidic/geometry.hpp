#pragma once

#include <cmath>

namespace fluidic {

// World units. The playfield is the rectangle [0, kFieldWidth] x [0, kFieldHeight]
// with y pointing up; gravity pulls toward y = 0.
inline constexpr double kFieldWidth = 9.0;
inline constexpr double kFieldHeight = 16.0;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr bool operator==(const Vec2&) const = default;

    constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
    constexpr double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
};

struct Segment {
    Vec2 a;
    Vec2 b;
    constexpr bool operator==(const Segment&) const = default;
};

// Closest point to p on segment s.
inline Vec2 closest_point(const Segment& s, Vec2 p) {
    const Vec2 ab = s.b - s.a;
    const double len2 = ab.norm2();
    if (len2 <= 0.0) return s.a;
    double t = (p - s.a).dot(ab) / len2;
    t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    return s.a + ab * t;
}

inline bool inside_field(Vec2 p) {
    return p.x >= 0.0 && p.x <= kFieldWidth && p.y >= 0.0 && p.y <= kFieldHeight;
}

} // namespace fluidic
