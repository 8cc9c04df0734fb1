#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace hbem {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

/// Complex 2-vector (deformed normals live here).
struct CVec2 {
    cplx x;
    cplx y;

    cplx dot(Vec2 o) const { return x * o.x + y * o.y; }
};

/// Raised for malformed user input (configs, CLI arguments, preconditions a
/// caller can fix).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical stage cannot deliver a trustworthy result
/// (singular pivot, non-converged quadrature when strict mode is on).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hbem
