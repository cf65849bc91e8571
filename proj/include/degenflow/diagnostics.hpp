#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "degenflow/errors.hpp"
#include "degenflow/grid.hpp"
#include "degenflow/model/coupler.hpp"
#include "degenflow/model/exponents.hpp"
#include "degenflow/model/laws.hpp"
#include "degenflow/solver.hpp"
#include "degenflow/trajectory.hpp"

namespace degenflow {

struct Series {
  std::vector<double> t;
  std::vector<double> value;

  std::size_t size() const { return t.size(); }
};

inline nlohmann::json to_json(const Series& s) { return {{"t", s.t}, {"value", s.value}}; }

namespace detail {

inline void check_component(const Trajectory& tr, int i, const char* what) {
  tr.require_nonempty(what);
  if (i < 0 || i >= tr.k()) throw DomainError(std::string(what) + ": component index out of range");
}

inline double time_tol(const Trajectory& tr) { return 1e-12 * std::max(1.0, std::abs(tr.back().time)); }

// Snapshot indices with lo <= time <= hi (inclusive, up to round-off).
inline std::vector<std::size_t> snapshots_between(const Trajectory& tr, double lo, double hi) {
  const double tol = time_tol(tr);
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < tr.size(); ++s)
    if (tr.snapshots[s].time >= lo - tol && tr.snapshots[s].time <= hi + tol) out.push_back(s);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Mass and sup U

struct MassSeries {
  Series series;
  double max_drift = 0.0;  ///< max_t |M(t) - M(0)| / M(0), absolute when M(0) = 0
  bool absolute = false;
};

inline MassSeries mass_series(const Trajectory& tr, int i) {
  detail::check_component(tr, i, "mass_series");
  MassSeries out;
  for (const auto& s : tr.snapshots) {
    out.series.t.push_back(s.time);
    out.series.value.push_back(integrate(s[static_cast<std::size_t>(i)]));
  }
  const double m0 = out.series.value.front();
  out.absolute = m0 == 0.0;
  for (double m : out.series.value) out.max_drift = std::max(out.max_drift, std::abs(m - m0) / (out.absolute ? 1.0 : std::abs(m0)));
  return out;
}

inline nlohmann::json to_json(const MassSeries& m) {
  return {{"series", to_json(m.series)}, {"max_drift", m.max_drift}, {"absolute", m.absolute}};
}

inline ScalarField coupler_field(const StateVector& s, const CouplerSpec& coupler) {
  ScalarField U(s.grid_ptr());
  detail::coupler_field(s, coupler, U.values);
  return U;
}

inline Series sup_U_series(const Trajectory& tr, const CouplerSpec& coupler) {
  tr.require_nonempty("sup_U_series");
  Series out;
  for (const auto& s : tr.snapshots) {
    out.t.push_back(s.time);
    out.value.push_back(extrema(coupler_field(s, coupler)).sup);
  }
  return out;
}

/// K_hat(t0) = max of the series over t >= t0.
inline double K_hat(const Series& sup, double t0) {
  double k = -std::numeric_limits<double>::infinity();
  const double tol = 1e-12 * std::max(1.0, std::abs(t0));
  for (std::size_t s = 0; s < sup.size(); ++s)
    if (sup.t[s] >= t0 - tol) k = std::max(k, sup.value[s]);
  if (!std::isfinite(k)) throw DomainError("K_hat: no snapshot at or after t0");
  return k;
}

/// Largest increase between consecutive entries, ignoring the step out of
/// the first entry.
inline double max_increase(const Series& s) {
  double worst = 0.0;
  for (std::size_t k = 2; k < s.size(); ++k) worst = std::max(worst, s.value[k] - s.value[k - 1]);
  return worst;
}

struct PowerLawFit {
  double exponent = 0.0;   ///< alpha_hat in y = A x^{-alpha_hat}
  double prefactor = 0.0;  ///< A
};

/// Least-squares line through (log x, log y).
inline PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_power_law: need >= 2 matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw DomainError("fit_power_law: data must be positive");
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) throw DomainError("fit_power_law: x values must differ");
  const double slope = (n * sxy - sx * sy) / den;
  return {-slope, std::exp((sy - slope * sx) / n)};
}

// ---------------------------------------------------------------------------
// Truncation energies

struct TruncationDiagnostics {
  double K = 0.0;
  double t0 = 0.0;
  double m = 1.0;
  int jmax = 0;
  std::vector<double> levels;          ///< L_j
  std::vector<double> times;           ///< T_j
  std::vector<double> sup_terms;       ///< sup_{t >= T_j} int U_j^{1+m}
  std::vector<double> gradient_terms;  ///< int_{T_j} int |grad U_j^m|^2
  std::vector<double> energies;        ///< A_j
  double max_snapshot_spacing = 0.0;
  double required_spacing = 0.0;  ///< t0 2^{-(1+m) jmax} / 4
  bool resolution_ok = false;
  bool covers_T0 = false;  ///< the trajectory starts at or before T_0
};

namespace detail {

inline double truncated_power_integral(const ScalarField& U, double L, double p) {
  double s = 0.0;
  for (double v : U.values)
    if (v > L) s += std::pow(v - L, p);
  return s * U.grid->cell_volume();
}

inline double truncated_gradient_energy(const ScalarField& U, double L, double m) {
  ScalarField w(U.grid);
  for (std::size_t c = 0; c < U.size(); ++c) w[c] = U[c] > L ? std::pow(U[c] - L, m) : 0.0;
  const FaceValues g = face_gradient(w);
  double s = 0.0;
  for (const auto& axis : g.axis)
    for (double v : axis) s += v * v;
  return s * U.grid->cell_volume();
}

}  // namespace detail

inline TruncationDiagnostics truncation_energy(const Trajectory& tr, const CouplerSpec& coupler, double K, double t0,
                                               int jmax, double m) {
  tr.require_nonempty("truncation_energy");
  if (!(K > 2.0)) throw DomainError("truncation_energy: K must be > 2");
  if (!(t0 > 0.0)) throw DomainError("truncation_energy: t0 must be > 0");
  if (jmax < 0) throw DomainError("truncation_energy: jmax must be >= 0");
  if (tr.back().time < t0) throw DomainError("truncation_energy: trajectory ends before t0");

  TruncationDiagnostics d;
  d.K = K, d.t0 = t0, d.m = m, d.jmax = jmax;
  std::vector<ScalarField> U;
  for (const auto& s : tr.snapshots) U.push_back(coupler_field(s, coupler));
  for (std::size_t s = 1; s < tr.size(); ++s)
    d.max_snapshot_spacing = std::max(d.max_snapshot_spacing, tr.snapshots[s].time - tr.snapshots[s - 1].time);
  d.required_spacing = t0 * std::pow(2.0, -(1.0 + m) * jmax) / 4.0;
  d.resolution_ok = d.max_snapshot_spacing <= d.required_spacing;
  d.covers_T0 = tr.front().time <= 0.0;

  for (int j = 0; j <= jmax; ++j) {
    const double L = K * (1.0 - std::pow(2.0, -j));
    const double T = t0 * (1.0 - std::pow(2.0, -(1.0 + m) * j));
    d.levels.push_back(L);
    d.times.push_back(T);
    double sup = 0.0;
    std::vector<double> g(tr.size(), 0.0);
    for (std::size_t s = 0; s < tr.size(); ++s) {
      g[s] = detail::truncated_gradient_energy(U[s], L, m);
      if (tr.snapshots[s].time >= T) sup = std::max(sup, detail::truncated_power_integral(U[s], L, 1.0 + m));
    }
    // Trapezoids over [T, t_end], the first one cut at T by linear
    // interpolation.
    double grad = 0.0;
    for (std::size_t s = 1; s < tr.size(); ++s) {
      const double a = tr.snapshots[s - 1].time, b = tr.snapshots[s].time;
      if (b <= T || b <= a) continue;
      double ga = g[s - 1];
      double lo = a;
      if (a < T) {
        ga = g[s - 1] + (g[s] - g[s - 1]) * (T - a) / (b - a);
        lo = T;
      }
      grad += 0.5 * (ga + g[s]) * (b - lo);
    }
    d.sup_terms.push_back(sup);
    d.gradient_terms.push_back(grad);
    d.energies.push_back(sup + grad);
  }
  return d;
}

inline nlohmann::json to_json(const TruncationDiagnostics& d) {
  return {{"K", d.K},
          {"t0", d.t0},
          {"m", d.m},
          {"jmax", d.jmax},
          {"levels", d.levels},
          {"times", d.times},
          {"sup_terms", d.sup_terms},
          {"gradient_terms", d.gradient_terms},
          {"energies", d.energies},
          {"max_snapshot_spacing", d.max_snapshot_spacing},
          {"required_spacing", d.required_spacing},
          {"resolution_ok", d.resolution_ok},
          {"covers_T0", d.covers_T0}};
}

// ---------------------------------------------------------------------------
// Harnack ratios

struct HarnackRecord {
  int component = 0;
  Vec2 y{0.0, 0.0};
  double rho = 0.0, s = 0.0, t = 0.0;
  double theta = 0.0;
  double lhs = 0.0;
  double rhs_inf = 0.0;
  double coefficient = 0.0;
  double tail = 0.0;
  double gamma_fit = 0.0;
  std::size_t snapshots = 0;
};

namespace detail {

struct HarnackSetup {
  double theta = 0.0;
  double p = 0.0;  ///< 1 / (beta_i (1-m))
  double coefficient = 0.0;
};

inline HarnackSetup harnack_setup(const Trajectory& tr, int i, Vec2 y, double rho, double s, double t,
                                  const Exponents& e, const StructureConstants& k, double outer) {
  check_component(tr, i, "harnack");
  if (!(rho > 0.0)) throw DomainError("harnack: rho must be > 0");
  if (!(s < t)) throw DomainError("harnack: need s < t");
  const auto d = derive(e);
  const auto ii = static_cast<std::size_t>(i);
  HarnackSetup h;
  h.theta = d.components.at(ii).theta_i;
  if (!(e.m < 1.0)) throw RegimeError("harnack: requires the singular regime m < 1");
  if (!(h.theta > 0.0)) throw RegimeError("harnack: theta_i = n beta_i (m-1) + 2 must be > 0");
  const double b = e.beta.at(ii) * (1.0 - e.m);
  if (!(b > 0.0)) throw RegimeError("harnack: beta_i (1-m) must be > 0");
  h.p = 1.0 / b;
  h.coefficient = std::sqrt(1.0 + k.C4) + (k.C4 + std::sqrt(k.C2 + k.C4)) * std::pow(rho, h.p);
  if (!region_inside(tr.grid(), Ball{y, outer * rho}))
    throw ClippingError("harnack: ball of radius " + std::to_string(outer * rho) + " leaves the grid");
  const double tol = time_tol(tr);
  if (s < tr.front().time - tol || t > tr.back().time + tol)
    throw ClippingError("harnack: time window [" + std::to_string(s) + ", " + std::to_string(t) +
                        "] outside trajectory range [" + std::to_string(tr.front().time) + ", " +
                        std::to_string(tr.back().time) + "]");
  return h;
}

}  // namespace detail

/// Integral Harnack ratio: sup over time of int_{B_rho} u^i against the inf
/// over time of int_{B_2rho} u^i plus the tail term, both over snapshots with
/// s <= tau <= t.
inline HarnackRecord harnack_ratio(const Trajectory& tr, int i, Vec2 y, double rho, double s, double t,
                                   const Exponents& e, const StructureConstants& k) {
  const auto h = detail::harnack_setup(tr, i, y, rho, s, t, e, k, 2.0);
  const auto idx = detail::snapshots_between(tr, s, t);
  if (idx.empty()) throw ClippingError("harnack_ratio: no snapshot in [s, t]");
  HarnackRecord r;
  r.component = i, r.y = y, r.rho = rho, r.s = s, r.t = t, r.theta = h.theta;
  r.snapshots = idx.size();
  r.lhs = 0.0;
  r.rhs_inf = std::numeric_limits<double>::infinity();
  for (std::size_t n : idx) {
    const auto& f = tr.snapshots[n][static_cast<std::size_t>(i)];
    r.lhs = std::max(r.lhs, integrate(f, Ball{y, rho}).value);
    r.rhs_inf = std::min(r.rhs_inf, integrate(f, Ball{y, 2.0 * rho}).value);
  }
  r.coefficient = h.coefficient;
  r.tail = h.coefficient * std::pow((t - s) / std::pow(rho, h.theta), h.p);
  const double den = r.rhs_inf + r.tail;
  r.gamma_fit = den > 0.0 ? r.lhs / den : (r.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  return r;
}

inline nlohmann::json to_json(const HarnackRecord& r) {
  return {{"component", r.component + 1}, {"y", r.y},       {"rho", r.rho},
          {"s", r.s},                     {"t", r.t},       {"theta", r.theta},
          {"lhs", r.lhs},                 {"rhs_inf", r.rhs_inf}, {"coefficient", r.coefficient},
          {"rhs_tail", r.tail},           {"gamma_fit", r.gamma_fit}, {"snapshots", r.snapshots}};
}

struct PointwiseHarnackRecord {
  int component = 0;
  Vec2 y{0.0, 0.0};
  double rho = 0.0, s = 0.0, t = 0.0;
  double theta = 0.0;
  double sup_lhs = 0.0;       ///< sup of u^i over B_rho x [s, t]
  double inf_integral = 0.0;  ///< inf over [2s - t, t] of int_{B_4rho} u^i
  double A = 0.0, A_prime = 0.0;
  double rhs = 0.0;  ///< bracket multiplying gamma
  double gamma_fit = 0.0;
};

/// Pointwise sup bound: sup_{B_rho x (s,t]} u^i against
/// A (inf int_{B_4rho} u^i)^{2/theta} + (1 + A' coef^{2/theta}) ((t-s)/rho^2)^{1/(beta(1-m))},
/// with A = (2 + (C2+C4) rho^2)^{(n+2)/theta} (t-s+rho^2)^{(n+2)/theta} / (t-s)^{2(n+1)/theta}
/// and A' the same with (t-s)^{(n+2)/theta} in the denominator.
inline PointwiseHarnackRecord pointwise_harnack(const Trajectory& tr, int i, Vec2 y, double rho, double s, double t,
                                                const Exponents& e, const StructureConstants& k) {
  const auto h = detail::harnack_setup(tr, i, y, rho, s, t, e, k, 4.0);
  const double lower = 2.0 * s - t;
  if (lower < tr.front().time - detail::time_tol(tr))
    throw ClippingError("pointwise_harnack: needs data from t = " + std::to_string(lower));
  PointwiseHarnackRecord r;
  r.component = i, r.y = y, r.rho = rho, r.s = s, r.t = t, r.theta = h.theta;
  const auto ci = static_cast<std::size_t>(i);
  const auto upper_idx = detail::snapshots_between(tr, s, t);
  const auto lower_idx = detail::snapshots_between(tr, lower, t);
  if (upper_idx.empty()) throw ClippingError("pointwise_harnack: no snapshot in [s, t]");
  for (std::size_t n : upper_idx) r.sup_lhs = std::max(r.sup_lhs, extrema(tr.snapshots[n][ci], Ball{y, rho}).sup);
  r.inf_integral = std::numeric_limits<double>::infinity();
  for (std::size_t n : lower_idx)
    r.inf_integral = std::min(r.inf_integral, integrate(tr.snapshots[n][ci], Ball{y, 4.0 * rho}).value);
  const double nd = e.n, th = h.theta, dt = t - s;
  const double base = std::pow(2.0 + (k.C2 + k.C4) * rho * rho, (nd + 2.0) / th) * std::pow(dt + rho * rho, (nd + 2.0) / th);
  r.A = base / std::pow(dt, 2.0 * (nd + 1.0) / th);
  r.A_prime = base / std::pow(dt, (nd + 2.0) / th);
  r.rhs = r.A * std::pow(r.inf_integral, 2.0 / th) +
          (1.0 + r.A_prime * std::pow(h.coefficient, 2.0 / th)) * std::pow(dt / (rho * rho), h.p);
  r.gamma_fit = r.rhs > 0.0 ? r.sup_lhs / r.rhs : (r.sup_lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  return r;
}

inline nlohmann::json to_json(const PointwiseHarnackRecord& r) {
  return {{"component", r.component + 1}, {"y", r.y}, {"rho", r.rho}, {"s", r.s}, {"t", r.t},
          {"theta", r.theta}, {"sup_lhs", r.sup_lhs}, {"inf_integral", r.inf_integral}, {"A", r.A},
          {"A_prime", r.A_prime}, {"rhs", r.rhs}, {"gamma_fit", r.gamma_fit}};
}

// ---------------------------------------------------------------------------
// Intrinsic-cylinder oscillation

struct OscillationRecord {
  int component = 0;
  Vec2 point{0.0, 0.0};
  double R = 0.0;
  double epsilon = 0.1;
  double t_top = 0.0;
  double parent_depth = 0.0;
  std::vector<double> omega;  ///< per component, over the parent cylinder
  double omega_M = 0.0;
  double theta = 0.0;
  double alpha0 = 0.0;
  double intrinsic_depth = 0.0;
  bool depth_clipped = false;  ///< theta^{-alpha0} R^2 exceeded the parent depth
  double osc = 0.0;
  double lower_fraction = 0.0;
  std::vector<double> slice_times;
  std::vector<std::vector<double>> upper_level_fractions;  ///< [slice][s-1]
  bool theta_condition = false;                            ///< theta^{alpha0} > R^epsilon
  bool degenerate = false;                                 ///< omega_M = 0
};

namespace detail {

struct CylinderData {
  std::vector<std::size_t> cells;
  std::vector<std::size_t> snaps;
};

inline CylinderData cylinder_data(const Trajectory& tr, Vec2 x, double R, double top, double depth, const char* what) {
  const Grid& g = tr.grid();
  const double tol = time_tol(tr);
  if (!region_inside(g, Ball{x, R}) || top - depth < tr.front().time - tol || top > tr.back().time + tol) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%s: cylinder B_%.6g(%.6g, %.6g) x [%.6g, %.6g] escapes data range [%.6g, %.6g] in time", what, R,
                  x[0], x[1], top - depth, top, tr.front().time, tr.back().time);
    throw ClippingError(buf);
  }
  CylinderData d;
  d.cells = cells_in(g, Ball{x, R});
  if (d.cells.empty()) throw DomainError(std::string(what) + ": ball contains no cell centers");
  d.snaps = snapshots_between(tr, top - depth, top);
  return d;
}

inline Extrema cylinder_extrema(const Trajectory& tr, int i, const CylinderData& d) {
  Extrema e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t s : d.snaps) {
    const auto& f = tr.snapshots[s][static_cast<std::size_t>(i)];
    for (std::size_t c : d.cells) {
      e.inf = std::min(e.inf, f[c]);
      e.sup = std::max(e.sup, f[c]);
    }
  }
  return e;
}

}  // namespace detail

inline OscillationRecord oscillation_probe(const Trajectory& tr, int i, Vec2 point, double R, const Exponents& e,
                                           double epsilon = 0.1, int s_max = 8,
                                           std::optional<double> t_top = std::nullopt) {
  detail::check_component(tr, i, "oscillation_probe");
  if (!(R > 0.0)) throw DomainError("oscillation_probe: R must be > 0");
  OscillationRecord r;
  r.component = i, r.point = point, r.R = R, r.epsilon = epsilon;
  r.t_top = t_top.value_or(tr.back().time);
  r.parent_depth = std::pow(R, 2.0 - epsilon);
  r.alpha0 = derive(e).components.at(static_cast<std::size_t>(i)).alpha0;
  const auto parent = detail::cylinder_data(tr, point, R, r.t_top, r.parent_depth, "oscillation_probe");
  for (int c = 0; c < tr.k(); ++c) {
    const Extrema x = detail::cylinder_extrema(tr, c, parent);
    r.omega.push_back(x.sup - x.inf);
  }
  r.omega_M = *std::max_element(r.omega.begin(), r.omega.end());
  r.theta = r.omega_M / 4.0;
  if (r.omega_M == 0.0) {
    r.degenerate = true;
    r.lower_fraction = 1.0;
    r.intrinsic_depth = r.parent_depth;
    return r;
  }
  r.theta_condition = std::pow(r.theta, r.alpha0) > std::pow(R, epsilon);
  r.intrinsic_depth = std::pow(r.theta, -r.alpha0) * R * R;
  if (r.intrinsic_depth > r.parent_depth) {
    r.intrinsic_depth = r.parent_depth;
    r.depth_clipped = true;
  }
  const auto cyl = detail::cylinder_data(tr, point, R, r.t_top, r.intrinsic_depth, "oscillation_probe");
  const Extrema x = detail::cylinder_extrema(tr, i, cyl);
  r.osc = x.sup - x.inf;
  const auto ci = static_cast<std::size_t>(i);
  std::size_t below = 0;
  for (std::size_t s : cyl.snaps) {
    const auto& f = tr.snapshots[s][ci];
    std::vector<double> fr;
    for (int lev = 1; lev <= s_max; ++lev) {
      const double level = (1.0 - std::pow(2.0, -lev)) * r.omega_M;
      std::size_t above = 0;
      for (std::size_t c : cyl.cells) above += f[c] > level;
      fr.push_back(static_cast<double>(above) / static_cast<double>(cyl.cells.size()));
    }
    for (std::size_t c : cyl.cells) below += f[c] < 0.5 * r.omega_M;
    r.slice_times.push_back(tr.snapshots[s].time);
    r.upper_level_fractions.push_back(std::move(fr));
  }
  r.lower_fraction = static_cast<double>(below) / static_cast<double>(cyl.cells.size() * cyl.snaps.size());
  return r;
}

inline nlohmann::json to_json(const OscillationRecord& r) {
  return {{"component", r.component + 1},
          {"point", r.point},
          {"R", r.R},
          {"epsilon", r.epsilon},
          {"t_top", r.t_top},
          {"parent_depth", r.parent_depth},
          {"omega", r.omega},
          {"omega_M", r.omega_M},
          {"theta", r.theta},
          {"alpha0", r.alpha0},
          {"intrinsic_depth", r.intrinsic_depth},
          {"depth_clipped", r.depth_clipped},
          {"osc", r.osc},
          {"lower_fraction", r.lower_fraction},
          {"slice_times", r.slice_times},
          {"upper_level_fractions", r.upper_level_fractions},
          {"theta_condition", r.theta_condition},
          {"degenerate", r.degenerate}};
}

struct OscillationDecay {
  int component = 0;
  Vec2 point{0.0, 0.0};
  std::vector<double> R;
  std::vector<double> depth;
  std::vector<double> omega;
  std::vector<double> sigma;  ///< sigma[n-1] = omega_n / omega_{n-1}
  std::vector<std::size_t> snapshots;
  double max_sigma = 0.0;
  bool exact_continuity = false;  ///< stopped because some omega_n was 0
};

/// Nested intrinsic cylinders: Q(R0, R0^{2-eps}) first, then R_n = R0/2^n
/// with depth_n = min(theta_{n-1}^{-alpha0} R_n^2, R_n^{2-eps}, depth_{n-1})
/// and theta_n = omega_n / 4.
inline OscillationDecay oscillation_decay(const Trajectory& tr, int i, Vec2 point, double R0, int levels,
                                          const Exponents& e, double epsilon = 0.1,
                                          std::optional<double> t_top = std::nullopt) {
  detail::check_component(tr, i, "oscillation_decay");
  if (!(R0 > 0.0)) throw DomainError("oscillation_decay: R0 must be > 0");
  if (levels < 1) throw DomainError("oscillation_decay: levels must be >= 1");
  const double top = t_top.value_or(tr.back().time);
  const double alpha0 = derive(e).components.at(static_cast<std::size_t>(i)).alpha0;
  OscillationDecay out;
  out.component = i;
  out.point = point;
  double R = R0, depth = std::pow(R0, 2.0 - epsilon);
  for (int n = 0; n <= levels; ++n) {
    if (n > 0) {
      R = R0 / std::pow(2.0, n);
      const double theta = out.omega.back() / 4.0;
      depth = std::min({std::pow(theta, -alpha0) * R * R, std::pow(R, 2.0 - epsilon), depth});
    }
    const auto cyl = detail::cylinder_data(tr, point, R, top, depth, "oscillation_decay");
    const Extrema x = detail::cylinder_extrema(tr, i, cyl);
    const double w = x.sup - x.inf;
    out.R.push_back(R);
    out.depth.push_back(depth);
    out.omega.push_back(w);
    out.snapshots.push_back(cyl.snaps.size());
    if (n > 0) {
      out.sigma.push_back(w / out.omega[out.omega.size() - 2]);
      out.max_sigma = std::max(out.max_sigma, out.sigma.back());
    }
    if (w == 0.0) {
      out.exact_continuity = true;
      break;
    }
  }
  return out;
}

inline nlohmann::json to_json(const OscillationDecay& d) {
  return {{"component", d.component + 1}, {"point", d.point}, {"R", d.R}, {"depth", d.depth},
          {"omega", d.omega}, {"sigma", d.sigma}, {"snapshots", d.snapshots}, {"max_sigma", d.max_sigma},
          {"exact_continuity", d.exact_continuity}};
}

// ---------------------------------------------------------------------------
// Weighted gradient functional

/// Midpoint of the admissible interval (max(-1, -m_i), 0) for alpha.
inline double default_weight_exponent(const Exponents& e, int i) {
  const double mi = derive(e).components.at(static_cast<std::size_t>(i)).m_i;
  return 0.5 * std::max(-1.0, -mi);
}

/// Sum over interior faces of U^{m-1} (u^i)^{alpha-1} |grad u^i|^2 times the
/// cell volume, face values by arithmetic mean. Faces with u^i = 0 or U = 0
/// are skipped.
inline double weighted_gradient_energy(const StateVector& s, int i, const CouplerSpec& coupler, const Exponents& e,
                                       std::optional<double> alpha = std::nullopt) {
  if (i < 0 || i >= s.k()) throw DomainError("weighted_gradient_energy: component index out of range");
  const double a = alpha.value_or(default_weight_exponent(e, i));
  const ScalarField U = coupler_field(s, coupler);
  const auto& u = s[static_cast<std::size_t>(i)];
  const Grid& g = s.grid();
  double acc = 0.0;
  detail::for_each_face(
      g,
      [&](int axis, std::size_t L, std::size_t R, int, int) {
        const double ub = 0.5 * (u[L] + u[R]), Ub = 0.5 * (U[L] + U[R]);
        if (ub <= 0.0 || Ub <= 0.0) return;
        const double p = (u[R] - u[L]) / g.h(axis);
        acc += std::pow(Ub, e.m - 1.0) * std::pow(ub, a - 1.0) * p * p;
      },
      [](int, std::size_t, int, int, int) {});
  return acc * g.cell_volume();
}

}  // namespace degenflow
