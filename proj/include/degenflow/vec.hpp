#pragma once

#include <array>
#include <cmath>

namespace degenflow {

// Positions, gradients and fluxes live in at most two space dimensions. In
// 1-D the second entry is kept at zero.
using Vec2 = std::array<double, 2>;

constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a[0] + b[0], a[1] + b[1]}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a[0] - b[0], a[1] - b[1]}; }
constexpr Vec2 operator*(double s, Vec2 a) { return {s * a[0], s * a[1]}; }
constexpr double dot(Vec2 a, Vec2 b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(Vec2 a) { return std::hypot(a[0], a[1]); }

/// Counter-clockwise rotation by a right angle.
constexpr Vec2 perp(Vec2 a) { return {-a[1], a[0]}; }

}  // namespace degenflow
