#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bifrac {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// bad or inconsistent mesh content
struct MeshError : Error {
    using Error::Error;
};

// bad configuration (file content, cross-references, invariant violations)
struct ConfigError : Error {
    using Error::Error;
};

// optimizer / evolution failures
struct SolveError : Error {
    using Error::Error;
};

// filesystem-level failures (unreadable/unwritable paths)
struct IoError : Error {
    using Error::Error;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    Vec2 normalized() const {
        const double n = norm();
        return {x / n, y / n};
    }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// symmetric 2x2 tensor, stored as (xx, yy, xy)
struct Sym2 {
    double xx = 0.0;
    double yy = 0.0;
    double xy = 0.0;

    Sym2() = default;
    Sym2(double xx_, double yy_, double xy_) : xx(xx_), yy(yy_), xy(xy_) {}

    double trace() const { return xx + yy; }
    // Frobenius norm squared, |T|^2 = T:T
    double norm2() const { return xx * xx + yy * yy + 2.0 * xy * xy; }
    Sym2 operator+(const Sym2& o) const { return {xx + o.xx, yy + o.yy, xy + o.xy}; }
    Sym2 operator-(const Sym2& o) const { return {xx - o.xx, yy - o.yy, xy - o.xy}; }
    Sym2 operator*(double s) const { return {xx * s, yy * s, xy * s}; }
};

inline Sym2 operator*(double s, const Sym2& t) { return t * s; }

}  // namespace bifrac
