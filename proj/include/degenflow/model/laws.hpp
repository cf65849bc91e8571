#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <variant>

#include "degenflow/vec.hpp"

namespace degenflow {

/// Constants of the structure conditions. A zero encodes "term absent".
struct StructureConstants {
  double c = 1.0;   ///< coercivity, 0 < c <= 1
  double C1 = 1.0;  ///< coupler growth, sum_i |U_{u^i} u^i| <= C1 U
  double C2 = 0.0;  ///< lower-order coercivity defect
  double C3 = 1.0;  ///< gradient growth of the flux
  double C4 = 0.0;  ///< value growth of the flux
  double C5 = 0.0;  ///< drift growth
};

// ---------------------------------------------------------------------------
// Flux laws A(p, z, x, t)

/// A = p.
struct IdentityFlux {
  Vec2 operator()(Vec2 p, double, Vec2, double) const { return p; }
  bool uses_tangential() const { return false; }
};

/// A = a p + b p_perp. Coercive with c = a and bounded with
/// C3 = sqrt(a^2 + b^2); the rotated part is divergence free in the
/// continuum.
struct ScaledRotationFlux {
  double scale = 1.0;
  double rotation = 0.0;
  Vec2 operator()(Vec2 p, double, Vec2, double) const { return scale * p + rotation * perp(p); }
  bool uses_tangential() const { return rotation != 0.0; }
};

struct CustomFlux {
  std::string name = "custom";
  std::function<Vec2(Vec2 p, double z, Vec2 x, double t)> eval;
  Vec2 operator()(Vec2 p, double z, Vec2 x, double t) const { return eval(p, z, x, t); }
  bool uses_tangential() const { return true; }
};

struct FluxLaw {
  std::variant<IdentityFlux, ScaledRotationFlux, CustomFlux> law = IdentityFlux{};
  StructureConstants constants;  ///< constants the law claims to satisfy

  static FluxLaw identity() { return FluxLaw{IdentityFlux{}, StructureConstants{}}; }

  static FluxLaw scaled(double a, double b, StructureConstants claimed) {
    return FluxLaw{ScaledRotationFlux{a, b}, claimed};
  }

  Vec2 operator()(Vec2 p, double z, Vec2 x, double t) const {
    return std::visit([&](const auto& f) { return f(p, z, x, t); }, law);
  }

  std::string name() const {
    return std::visit(
        [](const auto& f) -> std::string {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, IdentityFlux>) return "identity";
          else if constexpr (std::is_same_v<T, ScaledRotationFlux>) return "scaled";
          else return f.name;
        },
        law);
  }
};

// ---------------------------------------------------------------------------
// Drift laws B(z, x, t)

struct NoDrift {
  Vec2 operator()(double, Vec2, double) const { return {0.0, 0.0}; }
  double speed(double) const { return 0.0; }
  static constexpr bool active = false;
};

/// B = coef * z^q * direction, |direction| = 1.
struct PowerDrift {
  double coef = 0.0;
  double q = 1.0;
  Vec2 direction{1.0, 0.0};
  Vec2 operator()(double z, Vec2, double) const {
    return (z > 0.0 ? coef * std::pow(z, q) : 0.0) * direction;
  }
  /// |dB/dz| at z.
  double speed(double z) const { return z > 0.0 ? std::abs(coef * q * std::pow(z, q - 1.0)) : 0.0; }
  static constexpr bool active = true;
};

struct CustomDrift {
  std::string name = "custom";
  std::function<Vec2(double z, Vec2 x, double t)> eval;
  Vec2 operator()(double z, Vec2 x, double t) const { return eval(z, x, t); }
  /// One-sided difference estimate of |dB/dz| at z, sampled at x = 0, t = 0.
  double speed(double z) const {
    const double dz = std::max(1e-8, 1e-6 * std::abs(z));
    return norm(eval(z + dz, {0.0, 0.0}, 0.0) - eval(z, {0.0, 0.0}, 0.0)) / dz;
  }
  static constexpr bool active = true;
};

struct DriftLaw {
  std::variant<NoDrift, PowerDrift, CustomDrift> law = NoDrift{};
  StructureConstants constants{1.0, 1.0, 0.0, 1.0, 0.0, 0.0};

  static DriftLaw none() { return DriftLaw{}; }

  static DriftLaw power(double coef, double q, Vec2 direction) {
    DriftLaw d;
    d.law = PowerDrift{coef, q, direction};
    d.constants.C5 = std::abs(coef);
    return d;
  }

  bool absent() const { return std::holds_alternative<NoDrift>(law); }

  Vec2 operator()(double z, Vec2 x, double t) const {
    return std::visit([&](const auto& d) { return d(z, x, t); }, law);
  }

  double speed(double z) const {
    return std::visit([&](const auto& d) { return d.speed(z); }, law);
  }

  std::string name() const {
    return std::visit(
        [](const auto& d) -> std::string {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, NoDrift>) return "none";
          else if constexpr (std::is_same_v<T, PowerDrift>) return "power";
          else return d.name;
        },
        law);
  }
};

}  // namespace degenflow
