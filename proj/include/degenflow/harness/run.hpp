#pragma once

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "degenflow/diagnostics.hpp"
#include "degenflow/errors.hpp"
#include "degenflow/harness/config.hpp"
#include "degenflow/harness/thresholds.hpp"
#include "degenflow/io.hpp"
#include "degenflow/model/validation.hpp"
#include "degenflow/oracles.hpp"
#include "degenflow/solver.hpp"

namespace degenflow::harness {

namespace fs = std::filesystem;
using nlohmann::json;

enum ExitCode : int { Ok = 0, ChecksFailed = 1, ConfigFailure = 2, StructureFailure = 3, BlowupFailure = 4 };

enum class Status { Pass, Fail, Measured };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Measured: return "MEASURED";
  }
  return "?";
}

struct Check {
  std::string name;
  Status status = Status::Measured;
  double value = 0.0;
  double threshold = std::numeric_limits<double>::quiet_NaN();
  std::string detail;
};

inline json to_json(const Check& c) {
  json j{{"name", c.name}, {"status", to_string(c.status)}, {"value", c.value}};
  if (!std::isnan(c.threshold)) j["threshold"] = c.threshold;
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

/// value <= threshold passes.
inline Check at_most(std::string name, double value, double threshold, std::string detail = {}) {
  const bool ok = std::isfinite(value) && value <= threshold;
  return {std::move(name), ok ? Status::Pass : Status::Fail, value, threshold, std::move(detail)};
}

inline Check at_least(std::string name, double value, double threshold, std::string detail = {}) {
  const bool ok = std::isfinite(value) && value >= threshold;
  return {std::move(name), ok ? Status::Pass : Status::Fail, value, threshold, std::move(detail)};
}

inline Check measured(std::string name, double value, std::string detail = {}) {
  return {std::move(name), Status::Measured, value, std::numeric_limits<double>::quiet_NaN(), std::move(detail)};
}

struct RunResult {
  int exit_code = Ok;
  fs::path dir;
  std::string error;
  std::vector<Check> checks;
  json validation;
  json diagnostics = json::object();
  Trajectory trajectory;
  double runtime_s = 0.0;

  bool passed() const {
    if (exit_code != Ok) return false;
    for (const auto& c : checks)
      if (c.status == Status::Fail) return false;
    return true;
  }

  const Check* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Artifact root: $DEGENFLOW_OUT, else ./degenflow_out.
inline fs::path artifact_root() {
  if (const char* env = std::getenv("DEGENFLOW_OUT"); env && *env) return env;
  return "degenflow_out";
}

// ---------------------------------------------------------------------------
// Comparison

enum class Norm { L1, Linf };

inline Norm norm_from_string(const std::string& s) {
  if (s == "l1") return Norm::L1;
  if (s == "linf") return Norm::Linf;
  throw ConfigError("unknown norm '" + s + "' (expected l1 or linf)");
}

struct CompareResult {
  std::vector<double> times;
  std::vector<std::vector<double>> errors;  ///< [component][snapshot]
  std::vector<double> max_per_component;
  double max = 0.0;
  bool nearest_in_time = false;  ///< some snapshot of b was matched by nearest time
};

inline double field_distance(const ScalarField& a, const ScalarField& b, Norm n) {
  double acc = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = std::abs(a[c] - b[c]);
    acc = n == Norm::L1 ? acc + d : std::max(acc, d);
  }
  return n == Norm::L1 ? acc * a.grid->cell_volume() : acc;
}

inline CompareResult compare(const Trajectory& a, const Trajectory& b, Norm n) {
  a.require_nonempty("compare");
  b.require_nonempty("compare");
  if (!(a.grid() == b.grid())) throw DomainError("compare: trajectories live on different grids");
  if (a.k() != b.k()) throw DomainError("compare: component counts differ");
  CompareResult r;
  r.errors.assign(static_cast<std::size_t>(a.k()), {});
  r.max_per_component.assign(static_cast<std::size_t>(a.k()), 0.0);
  const double tol = 1e-12 * std::max(1.0, std::abs(a.back().time));
  for (const auto& sa : a.snapshots) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < b.size(); ++s)
      if (std::abs(b.snapshots[s].time - sa.time) < std::abs(b.snapshots[best].time - sa.time)) best = s;
    const auto& sb = b.snapshots[best];
    if (std::abs(sb.time - sa.time) > tol) r.nearest_in_time = true;
    r.times.push_back(sa.time);
    for (int c = 0; c < a.k(); ++c) {
      const auto ci = static_cast<std::size_t>(c);
      const double e = field_distance(sa[ci], sb[ci], n);
      r.errors[ci].push_back(e);
      r.max_per_component[ci] = std::max(r.max_per_component[ci], e);
      r.max = std::max(r.max, e);
    }
  }
  return r;
}

inline json to_json(const CompareResult& r) {
  json comps = json::array();
  for (std::size_t c = 0; c < r.errors.size(); ++c)
    comps.push_back({{"component", c + 1}, {"errors", r.errors[c]}, {"max", r.max_per_component[c]}});
  return {{"times", r.times}, {"components", comps}, {"max", r.max}, {"nearest_in_time", r.nearest_in_time}};
}

// ---------------------------------------------------------------------------
// Structure validation

struct ValidationOutcome {
  bool ok = false;
  std::string message;
  json report;
};

inline ValidationOutcome run_validation(const ExperimentConfig& cfg) {
  ValidationOutcome out;
  const Problem pb = cfg.problem();
  const auto samples = generate_samples(cfg.grid.dims, cfg.exponents.k, cfg.validation_samples, cfg.seed);
  try {
    const ValidationReport rep = validate_structure(pb.flux, pb.drift, pb.coupler, pb.exponents, samples);
    out.report = rep.to_json();
    out.report["samples"] = samples.size();
    out.report["seed"] = cfg.seed;
    out.ok = rep.passed();
    if (!out.ok) {
      for (const auto& c : rep.conditions)
        if (c.status == CheckStatus::Fail) {
          out.message = "structure condition " + c.condition + " fails: " + c.detail;
          break;
        }
    }
  } catch (const RegimeError& e) {
    out.ok = false;
    out.message = e.what();
    out.report = {{"passed", false}, {"error", e.what()}, {"samples", samples.size()}, {"seed", cfg.seed}};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Oscillation probe placement

/// Resolves `front`, `interior`, `max` or explicit coordinates against the
/// last snapshot of component i. Named points are searched along the grid
/// row through the maximum, towards +x.
inline Vec2 locate_point(const Trajectory& tr, int i, const std::string& spec) {
  const auto& f = tr.back()[static_cast<std::size_t>(i)];
  const Grid& g = tr.grid();
  if (spec != "front" && spec != "interior" && spec != "max") return detail::to_point("oscillation_points", spec);
  const std::size_t imax =
      static_cast<std::size_t>(std::max_element(f.values.begin(), f.values.end()) - f.values.begin());
  const Vec2 pmax = g.center(imax);
  if (spec == "max") return pmax;
  const auto [ci, cj] = degenflow::detail::cell_ij(g, imax);
  int last = ci;
  for (int x = ci; x < g.cells(0); ++x)
    if (f[g.index(x, cj)] > 0.0) last = x;
  const Vec2 front = g.center(last, cj);
  if (spec == "front") return front;
  return {0.5 * (pmax[0] + front[0]), pmax[1]};
}

// ---------------------------------------------------------------------------
// Experiment runs

struct RunOptions {
  bool write_artifacts = true;
  std::string config_text;  ///< copied to config.ini when nonempty
};

namespace detail {

struct Resolution {
  int cells = 0;
  Trajectory trajectory;
};

inline double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline void write_series_csv(const fs::path& path, const Series& s) {
  std::ofstream out(path);
  out << "t,value\n";
  for (std::size_t k = 0; k < s.size(); ++k) out << fmt(s.t[k]) << ',' << fmt(s.value[k]) << '\n';
}

inline Trajectory simulate_config(const ExperimentConfig& cfg, const GridSpec& gs, const SolverConfig& sc) {
  const auto grid = gs.make();
  const StateVector init = initial_state(cfg, grid);
  return simulate(init, sc, cfg.problem());
}

inline double total_mass(const StateVector& s) {
  double m = 0.0;
  for (const auto& f : s.components) m += integrate(f);
  return m;
}

inline std::string summary_text(const std::string& name, const std::vector<Check>& checks, int exit_code,
                                const std::string& error, double runtime) {
  std::ostringstream os;
  os << "experiment " << name << "\n";
  for (const auto& c : checks) {
    os << "  " << to_string(c.status) << "  " << c.name << " = " << fmt(c.value);
    if (!std::isnan(c.threshold)) os << " (threshold " << fmt(c.threshold) << ")";
    if (!c.detail.empty()) os << "  [" << c.detail << "]";
    os << "\n";
  }
  if (!error.empty()) os << "  error: " << error << "\n";
  os << "exit " << exit_code << ", runtime " << fmt(runtime) << " s\n";
  return os.str();
}

}  // namespace detail

/// Runs a validated experiment end to end. Never throws for configuration,
/// structure or blowup failures; those come back as exit codes.
inline RunResult run_experiment(const ExperimentConfig& cfg, const fs::path& dir, const RunOptions& opt = {}) {
  const auto t_begin = std::chrono::steady_clock::now();
  RunResult res;
  res.dir = dir;
  auto finish = [&]() -> RunResult& {
    res.runtime_s = detail::elapsed(t_begin);
    if (res.exit_code == Ok)
      for (const auto& c : res.checks)
        if (c.status == Status::Fail) res.exit_code = ChecksFailed;
    if (opt.write_artifacts) {
      fs::create_directories(dir);
      if (!opt.config_text.empty()) std::ofstream(dir / "config.ini") << opt.config_text;
      if (!res.validation.is_null()) write_json(dir / "validation.json", res.validation);
      write_json(dir / "diagnostics.json", res.diagnostics);
      json checks = json::array();
      for (const auto& c : res.checks) checks.push_back(to_json(c));
      write_json(dir / "summary.json", {{"experiment", cfg.name},
                                        {"exit_code", res.exit_code},
                                        {"error", res.error},
                                        {"runtime_s", res.runtime_s},
                                        {"checks", checks}});
      std::ofstream(dir / "summary.txt") << detail::summary_text(cfg.name, res.checks, res.exit_code, res.error,
                                                                  res.runtime_s);
    }
    return res;
  };

  try {
    check_config(cfg);
  } catch (const Error& e) {
    res.exit_code = ConfigFailure;
    res.error = e.what();
    return finish();
  }

  // Structure conditions and hypotheses.
  const ValidationOutcome val = run_validation(cfg);
  res.validation = val.report;
  if (!val.ok) {
    if (cfg.waive_validation && val.report.contains("conditions")) {
      res.checks.push_back(measured("structure_validation", 0.0, "waived: " + val.message));
    } else {
      res.exit_code = StructureFailure;
      res.error = val.message;
      return finish();
    }
  } else {
    res.checks.push_back({"structure_validation", Status::Pass, 1.0, 1.0, ""});
  }
  const Exponents ex = cfg.model_exponents();
  const StructureConstants& sc = cfg.flux.constants;
  const RegimeReport regime = classify_regime(ex, sc.C2 == 0.0 && sc.C4 == 0.0);
  {
    json comps = json::array();
    for (std::size_t i = 0; i < regime.per_component.size(); ++i) {
      json list = json::object();
      for (const auto& a : regime.per_component[i])
        list[to_string(a.result)] = a.applies ? json("applies") : json(a.violated);
      const auto& d = regime.derived.components[i];
      comps.push_back({{"component", i + 1},
                       {"alpha0", d.alpha0},
                       {"m_i", d.m_i},
                       {"theta_i", d.theta_i},
                       {"results", list}});
    }
    res.diagnostics["regime"] = {{"regime", to_string(regime.derived.regime)}, {"components", comps}};
  }
  for (const auto& name : cfg.theorems) {
    std::string violated;
    bool only_dimension = true;
    for (std::size_t i = 0; i < regime.per_component.size(); ++i)
      for (const auto& a : regime.per_component[i])
        if (to_string(a.result) == name && !a.applies) {
          if (violated.empty()) violated = "component " + std::to_string(i + 1) + ": " + a.violated;
          only_dimension = only_dimension && a.violated == "n >= 2";
        }
    if (violated.empty())
      res.checks.push_back({"hypotheses:" + name, Status::Pass, 1.0, 1.0, ""});
    else if (only_dimension && ex.n == 1)
      // 1-D runs test the discrete property outside the n >= 2 setting.
      res.checks.push_back(measured("hypotheses:" + name, 0.0, violated + " (1-D run)"));
    else
      res.checks.push_back({"hypotheses:" + name, Status::Fail, 0.0, 1.0, violated});
  }

  // Simulations, coarse to fine; the finest is the main trajectory.
  const auto& dg = cfg.diagnostics;
  std::vector<detail::Resolution> runs;
  {
    std::vector<GridSpec> grids;
    if (dg.refinement.empty()) grids.push_back(cfg.grid);
    for (int n : dg.refinement) grids.push_back(cfg.grid.with_cells(n));
    for (const auto& gs : grids) {
      detail::Resolution r;
      r.cells = gs.cells[0];
      try {
        r.trajectory = detail::simulate_config(cfg, gs, cfg.solver);
      } catch (const Error& e) {
        res.exit_code = ConfigFailure;
        res.error = e.what();
        return finish();
      }
      if (r.trajectory.aborted) {
        res.exit_code = BlowupFailure;
        res.error = r.trajectory.abort_reason;
        res.trajectory = std::move(r.trajectory);
        if (opt.write_artifacts) write_trajectory(dir / "trajectory", res.trajectory, {{"experiment", cfg.name}});
        return finish();
      }
      runs.push_back(std::move(r));
    }
  }
  const Trajectory& tr = runs.back().trajectory;
  const CouplerSpec coupler = cfg.coupler_spec();
  const int k = cfg.exponents.k;
  const double m = cfg.exponents.m;
  const bool conservative_setup = cfg.drift.kind == "none" && cfg.grid.bc != Boundary::DirichletZero;
  const double M0 = detail::total_mass(tr.front());
  res.diagnostics["steps"] = tr.steps;
  res.diagnostics["snapshots"] = tr.size();

  if (opt.write_artifacts) {
    fs::create_directories(dir);
    write_trajectory(dir / "trajectory", tr, {{"experiment", cfg.name}});
  }

  // Mass.
  if (dg.mass) {
    json arr = json::array();
    double worst = 0.0;
    for (int i = 0; i < k; ++i) {
      const MassSeries ms = mass_series(tr, i);
      worst = std::max(worst, ms.max_drift);
      arr.push_back(to_json(ms));
      if (opt.write_artifacts) detail::write_series_csv(dir / ("mass_" + std::to_string(i + 1) + ".csv"), ms.series);
    }
    res.diagnostics["mass"] = arr;
    const double limit = m < 1.0 ? thresholds::mass_drift_singular : thresholds::mass_drift;
    if (conservative_setup && !cfg.solver.clip_negative)
      res.checks.push_back(at_most("mass_drift", worst, limit, "max relative drift over components"));
    else
      res.checks.push_back(measured("mass_drift", worst, cfg.solver.clip_negative ? "clipping on" : "open system"));
  }

  if (dg.clip_check) {
    SolverConfig clipped = cfg.solver;
    clipped.clip_negative = true;
    const GridSpec gs = dg.refinement.empty() ? cfg.grid : cfg.grid.with_cells(dg.refinement.back());
    const Trajectory ct = detail::simulate_config(cfg, gs, clipped);
    if (ct.aborted) {
      res.exit_code = BlowupFailure;
      res.error = ct.abort_reason;
      return finish();
    }
    const double frac = ct.ledger.back().clipped_mass / M0;
    res.diagnostics["clip_check"] = {{"clipped_mass", ct.ledger.back().clipped_mass}, {"fraction", frac}};
    res.checks.push_back(at_most("clipped_mass_fraction", frac, thresholds::clipped_mass_fraction));
  }

  if (dg.boundary_guard) {
    double worst = 0.0;
    for (const auto& s : tr.snapshots) {
      double b = 0.0;
      for (const auto& f : s.components) b += boundary_layer_mass(f);
      worst = std::max(worst, M0 > 0.0 ? b / M0 : b);
    }
    res.diagnostics["boundary_guard"] = {{"max_fraction", worst}};
    res.checks.push_back(at_most("boundary_mass_fraction", worst, thresholds::boundary_mass_fraction));
  }

  // sup U and the bound exponent.
  Series sup;
  if (dg.sup_U || !dg.K_hat_t0.empty() || dg.truncation) {
    sup = sup_U_series(tr, coupler);
    if (opt.write_artifacts) detail::write_series_csv(dir / "sup_U.csv", sup);
    const double inc = max_increase(sup);
    res.diagnostics["sup_U"] = {{"series", to_json(sup)}, {"max_increase", inc}};
    if (conservative_setup && cfg.grid.bc == Boundary::ZeroFlux)
      res.checks.push_back(at_most("sup_U_monotone", inc, thresholds::sup_monotone_tolerance,
                                   "largest increase of sup U between snapshots"));
  }
  if (!dg.K_hat_t0.empty()) {
    std::vector<double> K;
    for (double t0 : dg.K_hat_t0) K.push_back(K_hat(sup, t0));
    const PowerLawFit fit = fit_power_law(dg.K_hat_t0, K);
    const double nd = cfg.exponents.n;
    const double alpha = nd / (nd * (m - 1.0) + 2.0);
    const double rel = std::abs(fit.exponent - alpha) / alpha;
    res.diagnostics["K_hat"] = {{"t0", dg.K_hat_t0}, {"K_hat", K}, {"alpha_hat", fit.exponent},
                                {"prefactor", fit.prefactor}, {"alpha", alpha}, {"relative_error", rel}};
    res.checks.push_back(measured("K_hat_exponent", fit.exponent, "alpha = " + fmt(alpha)));
    res.checks.push_back(at_most("K_hat_exponent_relative_error", rel, thresholds::bound_exponent_relative));
  }
  if (dg.truncation) {
    const double smax = *std::max_element(sup.value.begin(), sup.value.end());
    const double K = dg.truncation_K > 0.0 ? dg.truncation_K : std::max(2.5, 2.0 * smax);
    try {
      const TruncationDiagnostics td = truncation_energy(tr, coupler, K, dg.truncation_t0, dg.truncation_jmax, m);
      res.diagnostics["truncation"] = to_json(td);
      // A_j must vanish exactly once L_j clears sup U on [T_j, t_end].
      bool ok = true;
      for (std::size_t j = 0; j < td.levels.size(); ++j) {
        double s = 0.0;
        for (std::size_t n = 0; n < sup.size(); ++n)
          if (sup.t[n] >= td.times[j]) s = std::max(s, sup.value[n]);
        if (td.levels[j] >= s && td.energies[j] != 0.0) ok = false;
      }
      res.checks.push_back({"truncation_vanishing", ok ? Status::Pass : Status::Fail, ok ? 1.0 : 0.0, 1.0,
                            "A_j = 0 wherever L_j >= sup U"});
      res.checks.push_back(measured("truncation_A_last", td.energies.back()));
    } catch (const DomainError& e) {
      res.diagnostics["truncation"] = {{"error", e.what()}};
      res.checks.push_back({"truncation_vanishing", Status::Fail, 0.0, 1.0, e.what()});
    }
  }

  // Oracle comparison.
  if (dg.oracle == "barenblatt") {
    const BarenblattParams bp = cfg.barenblatt();
    json per = json::array();
    std::vector<double> final_err;
    for (const auto& r : runs) {
      const Trajectory oracle = barenblatt_trajectory(r.trajectory.front().grid_ptr(), bp, r.trajectory.times());
      const CompareResult cr = compare(r.trajectory, oracle, Norm::L1);
      final_err.push_back(cr.errors[0].back());
      per.push_back({{"cells", r.cells}, {"l1_errors", cr.errors[0]}, {"times", cr.times},
                     {"final_l1", cr.errors[0].back()}});
    }
    json orders = json::array();
    for (std::size_t r = 1; r < runs.size(); ++r) {
      const double order = std::log(final_err[r - 1] / final_err[r]) /
                           std::log(static_cast<double>(runs[r].cells) / runs[r - 1].cells);
      orders.push_back(order);
      res.checks.push_back(at_least("oracle_order_" + std::to_string(runs[r - 1].cells) + "_" +
                                        std::to_string(runs[r].cells),
                                    order, thresholds::oracle_min_order));
    }
    res.diagnostics["oracle"] = {{"kind", "barenblatt"}, {"M", bp.M}, {"C", bp.C}, {"alpha", bp.alpha},
                                 {"resolutions", per}, {"orders", orders}};
    const double rel = final_err.back() / bp.M;
    if (runs.size() > 1)
      res.checks.push_back(at_most("oracle_final_l1_over_M", rel, thresholds::oracle_final_l1));
    else
      res.checks.push_back(measured("oracle_final_l1_over_M", rel));
  }

  // Proportional data stays proportional.
  if (cfg.initial.kind == "proportional") {
    double dev = 0.0, smax = 0.0;
    for (const auto& s : tr.snapshots) {
      for (std::size_t c = 0; c < s.grid().size(); ++c) {
        double U = 0.0;
        for (const auto& f : s.components) U += f[c];
        smax = std::max(smax, U);
        for (int i = 0; i < k; ++i)
          dev = std::max(dev, std::abs(s[static_cast<std::size_t>(i)][c] -
                                       cfg.initial.weights[static_cast<std::size_t>(i)] * U));
      }
    }
    const double rel = smax > 0.0 ? dev / smax : dev;
    res.diagnostics["proportional"] = {{"max_deviation", dev}, {"sup", smax}, {"relative", rel}};
    if (cfg.coupler == "sum" && conservative_setup)
      res.checks.push_back(at_most("proportional_deviation", rel, thresholds::proportional_deviation));
    else
      res.checks.push_back(measured("proportional_deviation", rel));
  }

  // Harnack ratios.
  if (!dg.harnack.empty()) {
    const int i = dg.harnack_component - 1;
    json per = json::array();
    std::vector<std::vector<double>> gammas(runs.size());
    bool finite = true;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      json list = json::array();
      for (const auto& cyl : dg.harnack) {
        try {
          const HarnackRecord h = harnack_ratio(runs[r].trajectory, i, cyl.y, cyl.rho, cyl.s, cyl.t, ex, sc);
          gammas[r].push_back(h.gamma_fit);
          finite = finite && std::isfinite(h.gamma_fit);
          json j = to_json(h);
          if (dg.pointwise_harnack) {
            try {
              j["pointwise"] = to_json(pointwise_harnack(runs[r].trajectory, i, cyl.y, cyl.rho, cyl.s, cyl.t, ex, sc));
            } catch (const Error& e) {
              j["pointwise"] = {{"error", e.what()}};
            }
          }
          list.push_back(j);
        } catch (const Error& e) {
          gammas[r].push_back(std::numeric_limits<double>::quiet_NaN());
          finite = false;
          list.push_back({{"error", e.what()}});
        }
      }
      per.push_back({{"cells", runs[r].cells}, {"records", list}});
    }
    res.diagnostics["harnack"] = per;
    res.checks.push_back({"harnack_gamma_finite", finite ? Status::Pass : Status::Fail, finite ? 1.0 : 0.0, 1.0, ""});
    if (runs.size() >= 2) {
      const auto& a = gammas[gammas.size() - 2];
      const auto& b = gammas.back();
      double worst = 0.0;
      for (std::size_t c = 0; c < b.size(); ++c) worst = std::max(worst, std::abs(a[c] - b[c]) / std::abs(b[c]));
      if (!finite) worst = std::numeric_limits<double>::infinity();
      res.checks.push_back(at_most("harnack_gamma_stability", worst, thresholds::harnack_stability,
                                   "max relative change between the two finest grids"));
    }
  }

  // Oscillation decay.
  if (!dg.oscillation_points.empty()) {
    const int i = dg.oscillation_component - 1;
    json list = json::array();
    double worst = 0.0;
    bool all_below_one = true;
    for (const auto& spec : dg.oscillation_points) {
      try {
        const Vec2 p = locate_point(tr, i, spec);
        const OscillationDecay d =
            oscillation_decay(tr, i, p, dg.oscillation_R0, dg.oscillation_levels, ex, dg.oscillation_epsilon);
        const OscillationRecord probe = oscillation_probe(tr, i, p, dg.oscillation_R0, ex, dg.oscillation_epsilon);
        json j = to_json(d);
        j["label"] = spec;
        j["probe"] = to_json(probe);
        list.push_back(j);
        for (double s : d.sigma) all_below_one = all_below_one && s < 1.0;
        worst = std::max(worst, d.max_sigma);
      } catch (const Error& e) {
        list.push_back({{"label", spec}, {"error", e.what()}});
        all_below_one = false;
        worst = std::numeric_limits<double>::infinity();
      }
    }
    res.diagnostics["oscillation"] = list;
    res.checks.push_back({"oscillation_sigma_below_one", all_below_one ? Status::Pass : Status::Fail,
                          all_below_one ? 1.0 : 0.0, 1.0, ""});
    res.checks.push_back(at_most("oscillation_max_sigma", worst, thresholds::oscillation_sigma_max));
  }

  if (dg.weighted_gradient) {
    json arr = json::array();
    for (int i = 0; i < k; ++i) {
      Series s;
      for (const auto& snap : tr.snapshots) {
        s.t.push_back(snap.time);
        s.value.push_back(weighted_gradient_energy(snap, i, coupler, ex));
      }
      arr.push_back({{"component", i + 1}, {"alpha", default_weight_exponent(ex, i)}, {"series", to_json(s)}});
    }
    res.diagnostics["weighted_gradient"] = arr;
  }

  if (cfg.runtime_limit > 0.0)
    res.checks.push_back(at_most("runtime_s", detail::elapsed(t_begin), cfg.runtime_limit));
  res.trajectory = tr;
  return finish();
}

/// Re-renders summary.txt from summary.json.
inline std::string report(const fs::path& dir) {
  const json s = read_json(dir / "summary.json");
  std::vector<Check> checks;
  for (const auto& c : s.at("checks")) {
    Check x;
    x.name = c.at("name").get<std::string>();
    const std::string st = c.at("status").get<std::string>();
    x.status = st == "PASS" ? Status::Pass : st == "FAIL" ? Status::Fail : Status::Measured;
    x.value = c.at("value").is_number() ? c.at("value").get<double>() : std::numeric_limits<double>::quiet_NaN();
    if (c.contains("threshold")) x.threshold = c.at("threshold").get<double>();
    x.detail = c.value("detail", "");
    checks.push_back(std::move(x));
  }
  return detail::summary_text(s.at("experiment").get<std::string>(), checks, s.at("exit_code").get<int>(),
                              s.value("error", ""), s.value("runtime_s", 0.0));
}

}  // namespace degenflow::harness
