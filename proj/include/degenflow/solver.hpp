#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "degenflow/errors.hpp"
#include "degenflow/grid.hpp"
#include "degenflow/model/coupler.hpp"
#include "degenflow/model/exponents.hpp"
#include "degenflow/model/laws.hpp"
#include "degenflow/trajectory.hpp"

namespace degenflow {

enum class CoefficientMean { Arithmetic, HarmonicRegularized };

inline const char* to_string(CoefficientMean c) {
  return c == CoefficientMean::Arithmetic ? "arithmetic" : "harmonic";
}

struct SolverConfig {
  double cfl_safety = 0.4;
  bool clip_negative = true;
  CoefficientMean coefficient_mean = CoefficientMean::Arithmetic;
  double epsilon_reg = 1e-12;
  double t_end = 0.0;
  /// 0 emits only the initial and final states.
  double snapshot_interval = 0.0;
  /// Ledger rows are written every `ledger_stride` steps and at snapshots.
  std::size_t ledger_stride = 1;
  /// Abort when the step count exceeds this.
  std::size_t max_steps = 50'000'000;

  void validate() const {
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw DomainError("cfl_safety must lie in (0, 1]");
    if (!(epsilon_reg >= 0.0)) throw DomainError("epsilon_reg must be >= 0");
    if (!(snapshot_interval >= 0.0)) throw DomainError("snapshot_interval must be >= 0");
    if (ledger_stride == 0) throw DomainError("ledger_stride must be >= 1");
  }
};

/// Everything that defines the right-hand side.
struct Problem {
  Exponents exponents;
  CouplerSpec coupler;
  FluxLaw flux;
  DriftLaw drift;
};

struct StepReport {
  double dt = 0.0;
  double clipped_mass = 0.0;   ///< summed over components
  double boundary_flux = 0.0;  ///< mass that left through the boundary, summed over components
};

namespace detail {

inline constexpr double kTiny = 1e-300;

inline double mean_of(double a, double b, CoefficientMean how) {
  if (how == CoefficientMean::Arithmetic) return 0.5 * (a + b);
  const double s = a + b;
  return s > 0.0 ? 2.0 * a * b / s : 0.0;
}

[[noreturn, gnu::cold]] inline void singular_coefficient() {
  throw RegimeError("singular coefficient: m < 1 with vanishing U and epsilon_reg = 0");
}

/// m * ubar^{m-1} with the regularization floor for m < 1.
inline double coefficient(double ubar, double m, double eps) {
  if (m == 1.0) return 1.0;
  if (m == 2.0) return 2.0 * ubar;
  if (m < 1.0) {
    ubar = std::max(ubar, eps);
    if (ubar == 0.0) singular_coefficient();
  }
  return m * std::pow(ubar, m - 1.0);
}

inline void coupler_field(const StateVector& s, const CouplerSpec& c, std::vector<double>& U) {
  const std::size_t n = s.grid().size();
  const int k = s.k();
  U.resize(n);
  if (std::holds_alternative<SumCoupler>(c.variant())) {
    std::copy(s[0].values.begin(), s[0].values.end(), U.begin());
    for (int i = 1; i < k; ++i) {
      const auto& v = s[static_cast<std::size_t>(i)].values;
      for (std::size_t x = 0; x < n; ++x) U[x] += v[x];
    }
    return;
  }
  std::vector<double> u(static_cast<std::size_t>(k));
  for (std::size_t x = 0; x < n; ++x) {
    for (int i = 0; i < k; ++i) u[static_cast<std::size_t>(i)] = std::max(0.0, s[static_cast<std::size_t>(i)][x]);
    U[x] = c.value(u);
  }
}

// Visit every face once. `interior(axis, L, R, xi, xj)` gets the two cells
// across the face, `dirichlet(axis, inner, outward_sign, xi, xj)` the cell
// next to an absorbing boundary face. ZeroFlux boundary faces are skipped;
// each periodic wrap face is visited once with L the last cell.
template <class Interior, class Dirichlet>
void for_each_face(const Grid& g, Interior&& interior, Dirichlet&& dirichlet) {
  const int nx = g.cells(0), ny = g.cells(1);
  const Boundary bc = g.bc();
  for (int j = 0; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) interior(0, g.index(i - 1, j), g.index(i, j), i, j);
    if (bc == Boundary::Periodic) {
      interior(0, g.index(nx - 1, j), g.index(0, j), 0, j);
    } else if (bc == Boundary::DirichletZero) {
      dirichlet(0, g.index(0, j), -1, 0, j);
      dirichlet(0, g.index(nx - 1, j), +1, nx, j);
    }
  }
  if (g.dims() < 2) return;
  for (int i = 0; i < nx; ++i) {
    for (int j = 1; j < ny; ++j) interior(1, g.index(i, j - 1), g.index(i, j), i, j);
    if (bc == Boundary::Periodic) {
      interior(1, g.index(i, ny - 1), g.index(i, 0), i, 0);
    } else if (bc == Boundary::DirichletZero) {
      dirichlet(1, g.index(i, 0), -1, i, 0);
      dirichlet(1, g.index(i, ny - 1), +1, i, ny);
    }
  }
}

// Centered derivative of f along `axis` at cell (i, j), ghost cells by bc.
inline double centered(const Grid& g, const double* f, int axis, int i, int j) {
  const int n = g.cells(axis);
  const int c = axis == 0 ? i : j;
  auto at = [&](int p) { return axis == 0 ? f[g.index(p, j)] : f[g.index(i, p)]; };
  const double self = at(c);
  const double up = c + 1 < n ? at(c + 1) : ghost(g.bc(), self, at(0));
  const double dn = c > 0 ? at(c - 1) : ghost(g.bc(), self, at(n - 1));
  return (up - dn) / (2.0 * g.h(axis));
}

inline std::pair<int, int> cell_ij(const Grid& g, std::size_t idx) {
  const auto nx = static_cast<std::size_t>(g.cells(0));
  return {static_cast<int>(idx % nx), static_cast<int>(idx / nx)};
}

// du[c][x] = divergence of the face fluxes of component c. Returns the rate
// at which mass leaves through the boundary (summed over components).
template <class Flux, class Drift>
double rhs_kernel(const StateVector& s, const std::vector<double>& U, const Flux& flux, const Drift& drift,
                  double m, const SolverConfig& cfg, std::vector<std::vector<double>>& du) {
  const Grid& g = s.grid();
  const int k = s.k();
  const double t = s.time;
  const bool tangential = g.dims() == 2 && flux.uses_tangential();
  const double vol = g.cell_volume();
  for (auto& d : du) std::fill(d.begin(), d.end(), 0.0);
  double outflow = 0.0;

  auto flux_at = [&](double D, int axis, Vec2 p, double z, Vec2 xf) {
    const auto a = static_cast<std::size_t>(axis);
    double F = D * flux(p, z, xf, t)[a];
    if constexpr (Drift::active) F += drift(z, xf, t)[a];
    return F;
  };

  auto interior = [&](int axis, std::size_t L, std::size_t R, int fi, int fj) {
    const double h = g.h(axis);
    const double D = coefficient(mean_of(U[L], U[R], cfg.coefficient_mean), m, cfg.epsilon_reg);
    const Vec2 xf = g.face_center(axis, fi, fj);
    const int other = 1 - axis;
    for (int c = 0; c < k; ++c) {
      const auto ci = static_cast<std::size_t>(c);
      const double* u = s[ci].values.data();
      Vec2 p{0.0, 0.0};
      p[static_cast<std::size_t>(axis)] = (u[R] - u[L]) / h;
      if (tangential) {
        const auto [li, lj] = cell_ij(g, L);
        const auto [ri, rj] = cell_ij(g, R);
        p[static_cast<std::size_t>(other)] =
            0.5 * (centered(g, u, other, li, lj) + centered(g, u, other, ri, rj));
      }
      const double F = flux_at(D, axis, p, 0.5 * (u[L] + u[R]), xf);
      du[ci][L] += F / h;
      du[ci][R] -= F / h;
    }
  };

  auto dirichlet = [&](int axis, std::size_t inner, int sign, int fi, int fj) {
    const double h = g.h(axis);
    const double D = coefficient(mean_of(U[inner], 0.0, cfg.coefficient_mean), m, cfg.epsilon_reg);
    const Vec2 xf = g.face_center(axis, fi, fj);
    const double area = vol / h;
    for (int c = 0; c < k; ++c) {
      const auto ci = static_cast<std::size_t>(c);
      const double ui = s[ci][inner];
      // Ghost value -ui: the face gradient points from ghost to cell.
      Vec2 p{0.0, 0.0};
      p[static_cast<std::size_t>(axis)] = sign > 0 ? -2.0 * ui / h : 2.0 * ui / h;
      const double F = flux_at(D, axis, p, 0.0, xf);
      if (sign > 0) {
        du[ci][inner] += F / h;
        outflow -= F * area;
      } else {
        du[ci][inner] -= F / h;
        outflow += F * area;
      }
    }
  };

  // Fluxes linear in p without drift: F = scale * D * (u_R - u_L) / h.
  if constexpr (!Drift::active && (std::is_same_v<Flux, IdentityFlux> || std::is_same_v<Flux, ScaledRotationFlux>)) {
    if (!tangential) {
      double scale = 1.0;
      if constexpr (std::is_same_v<Flux, ScaledRotationFlux>) scale = flux.scale;
      const std::array<double, 2> w{scale / (g.h(0) * g.h(0)), scale / (g.h(1) * g.h(1))};
      std::vector<const double*> up(static_cast<std::size_t>(k));
      std::vector<double*> dp(static_cast<std::size_t>(k));
      for (int c = 0; c < k; ++c) {
        up[static_cast<std::size_t>(c)] = s[static_cast<std::size_t>(c)].values.data();
        dp[static_cast<std::size_t>(c)] = du[static_cast<std::size_t>(c)].data();
      }
      auto linear = [&](int axis, std::size_t L, std::size_t R, int, int) {
        const double D = w[static_cast<std::size_t>(axis)] *
                         coefficient(mean_of(U[L], U[R], cfg.coefficient_mean), m, cfg.epsilon_reg);
        for (std::size_t c = 0; c < up.size(); ++c) {
          const double f = D * (up[c][R] - up[c][L]);
          dp[c][L] += f;
          dp[c][R] -= f;
        }
      };
      for_each_face(g, linear, dirichlet);
      return outflow;
    }
  }
  for_each_face(g, interior, dirichlet);
  return outflow;
}

template <class F>
decltype(auto) dispatch(const Problem& pb, F&& f) {
  return std::visit(
      [&](const auto& fl) -> decltype(auto) {
        return std::visit([&](const auto& dr) -> decltype(auto) { return f(fl, dr); }, pb.drift.law);
      },
      pb.flux.law);
}

}  // namespace detail

/// D = m * mean(U)^{m-1} on every face (layout as Grid::face_index). Boundary
/// faces use the ghost value of U: the inner value for ZeroFlux, 0 for
/// DirichletZero, the wrapped value for Periodic.
inline FaceValues face_coefficient(const StateVector& state, const CouplerSpec& coupler, double m,
                                   CoefficientMean mean = CoefficientMean::Arithmetic,
                                   double epsilon_reg = 1e-12) {
  if (!state.nonnegative()) throw DomainError("face_coefficient: state has negative values");
  std::vector<double> U;
  detail::coupler_field(state, coupler, U);
  const Grid& g = state.grid();
  const int nx = g.cells(0), ny = g.cells(1);
  FaceValues out;
  auto D = [&](double a, double b) { return detail::coefficient(detail::mean_of(a, b, mean), m, epsilon_reg); };
  auto bnd = [&](double inner, double wrap) {
    switch (g.bc()) {
      case Boundary::ZeroFlux: return inner;
      case Boundary::DirichletZero: return 0.0;
      case Boundary::Periodic: return wrap;
    }
    return inner;
  };
  out.axis[0].assign(g.face_count(0), 0.0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) out.axis[0][g.face_index(0, i, j)] = D(U[g.index(i - 1, j)], U[g.index(i, j)]);
    const double first = U[g.index(0, j)], last = U[g.index(nx - 1, j)];
    out.axis[0][g.face_index(0, 0, j)] = D(bnd(first, last), first);
    out.axis[0][g.face_index(0, nx, j)] = D(last, bnd(last, first));
  }
  if (g.dims() == 2) {
    out.axis[1].assign(g.face_count(1), 0.0);
    for (int i = 0; i < nx; ++i) {
      for (int j = 1; j < ny; ++j) out.axis[1][g.face_index(1, i, j)] = D(U[g.index(i, j - 1)], U[g.index(i, j)]);
      const double first = U[g.index(i, 0)], last = U[g.index(i, ny - 1)];
      out.axis[1][g.face_index(1, i, 0)] = D(bnd(first, last), first);
      out.axis[1][g.face_index(1, i, ny)] = D(last, bnd(last, first));
    }
  }
  return out;
}

/// Reusable scratch space for repeated steps on one grid.
class Integrator {
 public:
  Integrator(Problem problem, SolverConfig config) : pb_(std::move(problem)), cfg_(config) {
    cfg_.validate();
    pb_.exponents.validate();
  }

  const Problem& problem() const { return pb_; }
  const SolverConfig& config() const { return cfg_; }

  /// Largest stable step at the current state, capped by what remains to
  /// t_end when the state is before t_end.
  double stable_dt(const StateVector& s) {
    refresh_U(s);
    return stable_dt_from_U(s);
  }

  /// Advance in place by dt.
  StepReport step(StateVector& s, double dt) {
    refresh_U(s);
    return step_with_U(s, dt);
  }

  /// Spatial operator only: du_i/dt at the current state.
  std::vector<ScalarField> rhs(const StateVector& s) {
    refresh_U(s);
    ensure_buffers(s);
    detail::dispatch(pb_, [&](const auto& fl, const auto& dr) {
      return detail::rhs_kernel(s, U_, fl, dr, pb_.exponents.m, cfg_, du_);
    });
    std::vector<ScalarField> out;
    for (int c = 0; c < s.k(); ++c) out.emplace_back(s.grid_ptr(), du_[static_cast<std::size_t>(c)]);
    return out;
  }

  Trajectory simulate(const StateVector& initial) {
    if (!initial.nonnegative()) throw DomainError("simulate: initial state has negative values");
    Trajectory tr;
    tr.snapshots.push_back(initial);
    StateVector s = initial;
    const double t0 = initial.time;
    const double t_end = cfg_.t_end;
    double clipped = 0.0, outflow = 0.0;
    refresh_U(s);
    tr.ledger.push_back(ledger_row(s, 0, 0.0, clipped, outflow));
    if (!(t_end > t0)) return tr;

    const double snap_tol = 1e-12 * std::max(1.0, std::abs(t_end));
    std::size_t snap_count = 1;
    auto next_snapshot = [&] {
      if (cfg_.snapshot_interval <= 0.0) return t_end;
      return std::min(t_end, t0 + static_cast<double>(snap_count) * cfg_.snapshot_interval);
    };
    double target = next_snapshot();
    std::size_t steps = 0;
    try {
      while (s.time < t_end) {
        if (steps >= cfg_.max_steps) throw NumericalBlowup("step budget exhausted before t_end");
        double dt = stable_dt_from_U(s);
        bool hit = false;
        if (s.time + dt >= target - snap_tol) {
          dt = target - s.time;
          hit = true;
        }
        const StepReport rep = step_with_U(s, dt);
        if (hit) s.time = target;
        ++steps;
        clipped += rep.clipped_mass;
        outflow += rep.boundary_flux;
        refresh_U(s);
        const bool final_step = s.time >= t_end;
        if (hit || final_step || steps % cfg_.ledger_stride == 0) {
          LedgerRow row = ledger_row(s, steps, dt, clipped, outflow);
          for (double mass : row.mass)
            if (!std::isfinite(mass)) throw NumericalBlowup("non-finite mass at t = " + std::to_string(s.time));
          tr.ledger.push_back(std::move(row));
        }
        if (hit) {
          tr.snapshots.push_back(s);
          ++snap_count;
          target = next_snapshot();
          while (target <= s.time && s.time < t_end) {
            ++snap_count;
            target = next_snapshot();
          }
        }
      }
    } catch (const NumericalBlowup& e) {
      tr.aborted = true;
      tr.abort_reason = e.what();
    }
    tr.steps = steps;
    return tr;
  }

 private:
  void refresh_U(const StateVector& s) { detail::coupler_field(s, pb_.coupler, U_); }

  void ensure_buffers(const StateVector& s) {
    du_.resize(static_cast<std::size_t>(s.k()));
    for (auto& d : du_) d.resize(s.grid().size());
  }

  double stable_dt_from_U(const StateVector& s) const {
    const Grid& g = s.grid();
    const double m = pb_.exponents.m;
    // D is monotone in the face mean, so its maximum sits at an extreme mean.
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    auto track = [&](double a, double b) {
      const double u = detail::mean_of(a, b, cfg_.coefficient_mean);
      lo = std::min(lo, u);
      hi = std::max(hi, u);
    };
    detail::for_each_face(
        g, [&](int, std::size_t L, std::size_t R, int, int) { track(U_[L], U_[R]); },
        [&](int, std::size_t in, int, int, int) { track(U_[in], 0.0); });
    double Dmax = 1.0;
    if (m > 1.0) Dmax = detail::coefficient(hi, m, cfg_.epsilon_reg);
    else if (m < 1.0) Dmax = detail::coefficient(lo, m, cfg_.epsilon_reg);

    const double C3 = pb_.flux.constants.C3;
    double dt = std::numeric_limits<double>::infinity();
    for (int a = 0; a < g.dims(); ++a) {
      const double h = g.h(a);
      dt = std::min(dt, h * h / (2.0 * g.dims() * std::max(Dmax * C3, detail::kTiny)));
    }
    dt *= cfg_.cfl_safety;
    if (!pb_.drift.absent() && pb_.drift.constants.C5 > 0.0) {
      double zmax = 0.0;
      for (const auto& f : s.components)
        for (double v : f.values) zmax = std::max(zmax, v);
      const double speed = pb_.drift.speed(zmax);
      for (int a = 0; a < g.dims(); ++a)
        dt = std::min(dt, cfg_.cfl_safety * g.h(a) / std::max(speed, detail::kTiny));
    }
    if (cfg_.t_end > s.time) dt = std::min(dt, cfg_.t_end - s.time);
    return dt;
  }

  StepReport step_with_U(StateVector& s, double dt) {
    ensure_buffers(s);
    StepReport rep;
    rep.dt = dt;
    const double rate = detail::dispatch(pb_, [&](const auto& fl, const auto& dr) {
      return detail::rhs_kernel(s, U_, fl, dr, pb_.exponents.m, cfg_, du_);
    });
    rep.boundary_flux = rate * dt;
    const Grid& g = s.grid();
    const double vol = g.cell_volume();
    for (int c = 0; c < s.k(); ++c) {
      auto& u = s[static_cast<std::size_t>(c)].values;
      const auto& d = du_[static_cast<std::size_t>(c)];
      double clipped = 0.0;
      bool finite = true;
      for (std::size_t x = 0; x < u.size(); ++x) {
        double v = u[x] + dt * d[x];
        finite &= std::isfinite(v);
        if (cfg_.clip_negative && v < 0.0) {
          clipped -= v;
          v = 0.0;
        }
        u[x] = v;
      }
      if (!finite) {
        for (std::size_t x = 0; x < u.size(); ++x) {
          if (std::isfinite(u[x])) continue;
          const Vec2 p = g.center(x);
          char buf[200];
          std::snprintf(buf, sizeof buf, "non-finite value in component %d at cell %zu (x = %.6g, y = %.6g), t = %.9g",
                        c + 1, x, p[0], p[1], s.time);
          throw NumericalBlowup(buf);
        }
      }
      rep.clipped_mass += clipped * vol;
    }
    s.time += dt;
    return rep;
  }

  LedgerRow ledger_row(const StateVector& s, std::size_t step, double dt, double clipped, double outflow) const {
    LedgerRow row;
    row.step = step;
    row.t = s.time;
    row.dt = dt;
    for (const auto& f : s.components) row.mass.push_back(integrate(f));
    row.clipped_mass = clipped;
    row.boundary_flux = outflow;
    row.sup_U = U_.empty() ? 0.0 : *std::max_element(U_.begin(), U_.end());
    return row;
  }

  Problem pb_;
  SolverConfig cfg_;
  std::vector<double> U_;
  std::vector<std::vector<double>> du_;
};

inline double stable_dt(const StateVector& state, const SolverConfig& config, const Problem& problem) {
  if (!state.nonnegative()) throw DomainError("stable_dt: state has negative values");
  Integrator it(problem, config);
  return it.stable_dt(state);
}

/// One explicit step; the returned state carries time + dt.
inline StateVector step(const StateVector& state, double dt, const Problem& problem, const SolverConfig& config = {},
                        StepReport* report = nullptr) {
  if (!(dt >= 0.0)) throw DomainError("step: dt must be >= 0");
  Integrator it(problem, config);
  StateVector next = state;
  const StepReport r = it.step(next, dt);
  if (report) *report = r;
  return next;
}

inline std::vector<ScalarField> evaluate_rhs(const StateVector& state, const Problem& problem,
                                             const SolverConfig& config = {}) {
  Integrator it(problem, config);
  return it.rhs(state);
}

inline Trajectory simulate(const StateVector& initial, const SolverConfig& config, const Problem& problem) {
  Integrator it(problem, config);
  return it.simulate(initial);
}

}  // namespace degenflow
