#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "degenflow/errors.hpp"
#include "degenflow/grid.hpp"
#include "degenflow/model/exponents.hpp"
#include "degenflow/solver.hpp"
#include "degenflow/trajectory.hpp"

namespace degenflow {

/// Surface measure of the unit sphere in R^n.
inline double unit_sphere_area(int n) {
  const double h = 0.5 * static_cast<double>(n);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

/// Source solution of u_t = Laplace(u^m) with mass M, centred at `center`.
struct BarenblattParams {
  double m = 2.0;
  int n = 1;
  double M = 1.0;
  double alpha = 0.0;
  double kappa = 0.0;  ///< positive in both regimes; the sign enters the profile
  double C = 0.0;
  Vec2 center{0.0, 0.0};

  /// Free-boundary radius at time t (m > 1 only).
  double front_radius(double t) const {
    if (m <= 1.0) throw RegimeError("front_radius: m <= 1 has no free boundary");
    return std::sqrt(C / kappa) * std::pow(t, alpha / n);
  }

  /// Value at x = center.
  double peak(double t) const {
    return m > 1.0 ? std::pow(t, -alpha) * std::pow(C, 1.0 / (m - 1.0))
                   : std::pow(t, -alpha) * std::pow(C, -1.0 / (1.0 - m));
  }
};

namespace detail {

// Integral of s^{n-1} (1 - s^2)^p over [0, 1] (m > 1) or of
// s^{n-1} (1 + s^2)^{-p} over [0, inf) (m < 1), by adaptive quadrature.
inline double radial_profile_integral(int n, double m) {
  using boost::math::quadrature::exp_sinh;
  using boost::math::quadrature::gauss_kronrod;
  if (m > 1.0) {
    const double p = 1.0 / (m - 1.0);
    auto f = [&](double s) { return std::pow(s, n - 1) * std::pow(std::max(0.0, 1.0 - s * s), p); };
    return gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14);
  }
  const double p = 1.0 / (1.0 - m);
  auto f = [&](double s) { return std::exp((n - 1) * std::log(s) - p * std::log1p(s * s)); };
  const double head = gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14);
  exp_sinh<double> tail;
  return head + tail.integrate([&](double s) { return f(1.0 + s); }, 1e-13);
}

}  // namespace detail

inline BarenblattParams make_barenblatt(double m, int n, double M, Vec2 center = {0.0, 0.0}) {
  if (n < 1) throw DomainError("barenblatt: n must be >= 1");
  if (!(M > 0.0)) throw DomainError("barenblatt: mass must be > 0");
  if (m == 1.0 || !(m > critical_exponent(n)))
    throw RegimeError("barenblatt: need m > 1 or (n-2)/n < m < 1");
  BarenblattParams b;
  b.m = m;
  b.n = n;
  b.M = M;
  b.center = center;
  const double nd = n;
  b.alpha = nd / (nd * (m - 1.0) + 2.0);
  b.kappa = b.alpha * std::abs(m - 1.0) / (2.0 * m * nd);
  const double I = detail::radial_profile_integral(n, m);
  // M = omega_n kappa^{-n/2} I C^{e}, solved for C in log form so that m close
  // to 1 (huge 1/|m-1|) does not overflow.
  const double e = m > 1.0 ? 0.5 * nd + 1.0 / (m - 1.0) : 0.5 * nd - 1.0 / (1.0 - m);
  const double logC = (std::log(M) + 0.5 * nd * std::log(b.kappa) - std::log(unit_sphere_area(n)) - std::log(I)) / e;
  b.C = std::exp(logC);
  return b;
}

inline double barenblatt_value(double r2, double t, const BarenblattParams& b) {
  if (!(t > 0.0)) throw DomainError("barenblatt_value: t must be > 0");
  const double s = r2 * std::pow(t, -2.0 * b.alpha / b.n);
  if (b.m > 1.0) {
    const double br = b.C - b.kappa * s;
    if (br <= 0.0) return 0.0;
    return std::exp(-b.alpha * std::log(t) + std::log(br) / (b.m - 1.0));
  }
  return std::exp(-b.alpha * std::log(t) - std::log(b.C + b.kappa * s) / (1.0 - b.m));
}

inline double barenblatt_value(Vec2 x, double t, const BarenblattParams& b) {
  const Vec2 d = x - b.center;
  return barenblatt_value(dot(d, d), t, b);
}

inline double heat_kernel_value(double r2, double t, int n, double M) {
  if (!(t > 0.0)) throw DomainError("heat_kernel_value: t must be > 0");
  return M * std::pow(4.0 * std::numbers::pi * t, -0.5 * n) * std::exp(-r2 / (4.0 * t));
}

inline double heat_kernel_value(Vec2 x, double t, int n, double M) { return heat_kernel_value(dot(x, x), t, n, M); }

/// Scalar field of f(cell center).
template <class F>
ScalarField sample(std::shared_ptr<const Grid> g, F&& f) {
  ScalarField out(g);
  for (std::size_t c = 0; c < g->size(); ++c) out[c] = f(g->center(c));
  return out;
}

/// Cell averages of f: adaptive Gauss-Kronrod per cell in 1-D (it bisects
/// across kinks such as a compact-support front), 8x8 Gauss-Legendre in 2-D.
template <class F>
ScalarField cell_average(std::shared_ptr<const Grid> g, F&& f) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  ScalarField out(g);
  const double hx = g->h(0), hy = g->h(1);
  for (std::size_t c = 0; c < g->size(); ++c) {
    const Vec2 x = g->center(c);
    if (g->dims() == 1) {
      auto fx = [&](double s) { return f(Vec2{s, 0.0}); };
      out[c] = gauss_kronrod<double, 15>::integrate(fx, x[0] - 0.5 * hx, x[0] + 0.5 * hx, 5, 1e-10) / hx;
    } else {
      auto row = [&](double sy) {
        return gauss<double, 8>::integrate([&](double sx) { return f(Vec2{sx, sy}); }, x[0] - 0.5 * hx, x[0] + 0.5 * hx);
      };
      out[c] = gauss<double, 8>::integrate(row, x[1] - 0.5 * hy, x[1] + 0.5 * hy) / (hx * hy);
    }
  }
  return out;
}

/// Trajectory of point samples of a closed form at the given times.
template <class F>
Trajectory sample_trajectory(std::shared_ptr<const Grid> g, const std::vector<double>& times, F&& f) {
  Trajectory tr;
  tr.source = "oracle";
  for (double t : times) {
    StateVector s(g, 1, t);
    s[0] = sample(g, [&](Vec2 x) { return f(x, t); });
    tr.snapshots.push_back(std::move(s));
  }
  return tr;
}

inline Trajectory barenblatt_trajectory(std::shared_ptr<const Grid> g, const BarenblattParams& b,
                                        const std::vector<double>& times) {
  if (g->dims() != b.n) throw DomainError("barenblatt_trajectory: grid dims differ from n");
  return sample_trajectory(g, times, [&](Vec2 x, double t) { return barenblatt_value(x, t, b); });
}

inline Trajectory heat_kernel_trajectory(std::shared_ptr<const Grid> g, double M, const std::vector<double>& times) {
  return sample_trajectory(g, times, [&](Vec2 x, double t) { return heat_kernel_value(x, t, g->dims(), M); });
}

/// u^i = c_i v for a scalar trajectory v.
inline Trajectory proportional_reduction(const std::vector<double>& weights, const Trajectory& scalar) {
  scalar.require_nonempty("proportional_reduction");
  if (scalar.k() != 1) throw DomainError("proportional_reduction: scalar trajectory must have k = 1");
  if (weights.empty()) throw DomainError("proportional_reduction: no weights");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("proportional_reduction: weights must be > 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-14) throw DomainError("proportional_reduction: weights must sum to 1 (within 1e-14)");
  Trajectory out;
  out.source = "oracle";
  for (const auto& s : scalar.snapshots) {
    StateVector v(s.grid_ptr(), static_cast<int>(weights.size()), s.time);
    for (std::size_t i = 0; i < weights.size(); ++i)
      for (std::size_t c = 0; c < s.grid().size(); ++c) v[i][c] = weights[i] * s[0][c];
    out.snapshots.push_back(std::move(v));
  }
  return out;
}

struct ResidualPoint {
  double t = 0.0;
  std::vector<double> norm;  ///< discrete L2 norm per component
};

/// Residual of the semi-discrete operator along a trajectory: centered time
/// difference of the snapshots minus the solver's right-hand side. With
/// `mask_fraction` > 0 only cells where u^i exceeds that fraction of its max
/// are counted.
inline std::vector<ResidualPoint> residual(const Trajectory& tr, const Problem& pb, double mask_fraction = 0.0,
                                           const SolverConfig& cfg = {}) {
  if (tr.size() < 3) throw DomainError("residual: need at least 3 snapshots");
  std::vector<ResidualPoint> out;
  Integrator it(pb, cfg);
  const double vol = tr.grid().cell_volume();
  for (std::size_t s = 1; s + 1 < tr.size(); ++s) {
    const auto& prev = tr.snapshots[s - 1];
    const auto& next = tr.snapshots[s + 1];
    const auto& now = tr.snapshots[s];
    const double span = next.time - prev.time;
    if (!(span > 0.0)) throw DomainError("residual: snapshot times must increase");
    const auto rhs = it.rhs(now);
    ResidualPoint p;
    p.t = now.time;
    for (int c = 0; c < now.k(); ++c) {
      const auto ci = static_cast<std::size_t>(c);
      const double cut = mask_fraction > 0.0 ? mask_fraction * extrema(now[ci]).sup : -1.0;
      double acc = 0.0;
      for (std::size_t x = 0; x < now.grid().size(); ++x) {
        if (mask_fraction > 0.0 && !(now[ci][x] > cut)) continue;
        const double r = (next[ci][x] - prev[ci][x]) / span - rhs[ci][x];
        acc += r * r;
      }
      p.norm.push_back(std::sqrt(acc * vol));
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace degenflow
