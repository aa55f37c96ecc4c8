#pragma once

#include <cmath>
#include <functional>

namespace synclab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }

    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

// A planar map as a callable, with an optional inverse.  Library routines
// that only iterate forward ignore the inverse; routines that need it throw
// config_error when it is absent.
struct PlanarMap {
    std::function<Vec2(const Vec2&)> fwd;
    std::function<Vec2(const Vec2&)> inv;  // may be empty

    Vec2 operator()(const Vec2& p) const { return fwd(p); }
    bool has_inverse() const { return static_cast<bool>(inv); }
};

}  // namespace synclab
