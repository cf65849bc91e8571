#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "degenflow/errors.hpp"
#include "degenflow/grid.hpp"
#include "degenflow/io.hpp"
#include "degenflow/model/coupler.hpp"
#include "degenflow/model/exponents.hpp"
#include "degenflow/model/laws.hpp"
#include "degenflow/oracles.hpp"
#include "degenflow/solver.hpp"

namespace degenflow::harness {

struct GridSpec {
  int dims = 1;
  Vec2 lower{-1.0, 0.0};
  Vec2 upper{1.0, 1.0};
  std::array<int, 2> cells{64, 1};
  Boundary bc = Boundary::ZeroFlux;

  /// Same box with `n` cells on every axis.
  GridSpec with_cells(int n) const {
    GridSpec g = *this;
    g.cells = {n, dims == 2 ? n : 1};
    return g;
  }

  std::shared_ptr<const Grid> make() const {
    return std::make_shared<const Grid>(dims, lower, upper, cells, bc);
  }
};

struct FluxSpec {
  std::string kind = "identity";  ///< identity | scaled
  double a = 1.0;
  double b = 0.0;
  StructureConstants constants;
};

struct DriftSpec {
  std::string kind = "none";  ///< none | power
  double coef = 0.0;
  double q = 1.0;
  Vec2 direction{1.0, 0.0};
};

struct InitialSpec {
  std::string kind = "bump";  ///< barenblatt | gaussian | bump | proportional | file
  std::string base = "bump";  ///< profile used by `proportional`
  std::vector<Vec2> center{{0.0, 0.0}};
  std::vector<double> radius{0.5};
  std::vector<double> height{1.0};
  std::vector<double> mass{1.0};
  double width = 0.1;  ///< gaussian standard deviation
  double time = 0.0;   ///< barenblatt time of the initial profile
  std::vector<double> weights;
  std::string path;
};

struct HarnackCylinder {
  Vec2 y{0.0, 0.0};
  double rho = 0.0;
  double s = 0.0;
  double t = 0.0;
};

struct DiagnosticsSpec {
  bool mass = true;
  bool sup_U = true;
  std::vector<double> K_hat_t0;
  bool truncation = false;
  double truncation_K = 0.0;  ///< 0 picks max(2.5, 2 max sup U)
  double truncation_t0 = 0.0;
  int truncation_jmax = 3;
  std::vector<HarnackCylinder> harnack;
  bool pointwise_harnack = false;
  int harnack_component = 1;
  std::vector<std::string> oscillation_points;  ///< front | interior | max | coordinates
  double oscillation_R0 = 0.0;
  int oscillation_levels = 5;
  double oscillation_epsilon = 0.1;
  int oscillation_component = 1;
  std::string oracle;       ///< empty | barenblatt
  std::vector<int> refinement;
  bool boundary_guard = false;
  bool clip_check = false;  ///< rerun with clipping on and ledger the clipped mass
  bool weighted_gradient = false;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<std::string> theorems;  ///< Result names whose hypotheses must hold
  std::uint64_t seed = 1;
  bool waive_validation = false;
  std::size_t validation_samples = 10000;
  double runtime_limit = 0.0;  ///< seconds, 0 = none

  Exponents exponents;
  std::string coupler = "sum";
  FluxSpec flux;
  DriftSpec drift;
  GridSpec grid;
  InitialSpec initial;
  SolverConfig solver;
  std::optional<double> t_start;
  DiagnosticsSpec diagnostics;

  CouplerSpec coupler_spec() const {
    if (coupler == "sum") return CouplerSpec::sum();
    if (coupler == "euclidean") return CouplerSpec::euclidean();
    if (coupler == "weighted_power") return CouplerSpec::weighted_power(exponents.lambda, exponents.beta);
    throw ConfigError("unknown coupler '" + coupler + "'");
  }

  FluxLaw flux_law() const {
    if (flux.kind == "identity") {
      FluxLaw f = FluxLaw::identity();
      f.constants = flux.constants;
      return f;
    }
    if (flux.kind == "scaled") return FluxLaw::scaled(flux.a, flux.b, flux.constants);
    throw ConfigError("unknown flux kind '" + flux.kind + "'");
  }

  DriftLaw drift_law() const {
    if (drift.kind == "none") return DriftLaw::none();
    if (drift.kind == "power") return DriftLaw::power(drift.coef, drift.q, drift.direction);
    throw ConfigError("unknown drift kind '" + drift.kind + "'");
  }

  /// Exponents with q filled in from the drift.
  Exponents model_exponents() const {
    Exponents e = exponents;
    if (drift.kind == "power") e.q = drift.q;
    return e;
  }

  Problem problem() const { return Problem{model_exponents(), coupler_spec(), flux_law(), drift_law()}; }

  /// Starting time: explicit t_start, else the barenblatt profile time, else 0.
  double start_time() const {
    if (t_start) return *t_start;
    if (initial.kind == "barenblatt" || (initial.kind == "proportional" && initial.base == "barenblatt"))
      return initial.time;
    return 0.0;
  }

  /// Barenblatt parameters of the initial data (k = 1 or proportional).
  BarenblattParams barenblatt(std::size_t component = 0) const {
    const Vec2 c = initial.center.at(std::min(component, initial.center.size() - 1));
    const double M = initial.mass.at(std::min(component, initial.mass.size() - 1));
    return make_barenblatt(exponents.m, grid.dims, M, c);
  }
};

namespace detail {

template <class T>
const T& pick(const std::vector<T>& v, std::size_t i) {
  return v.at(std::min(i, v.size() - 1));
}

inline double profile(const InitialSpec& in, const std::string& kind, std::size_t comp, Vec2 x, int dims,
                      const std::vector<BarenblattParams>& barenblatt) {
  const Vec2 c = pick(in.center, comp);
  const Vec2 d = x - c;
  const double r2 = dims == 1 ? d[0] * d[0] : dot(d, d);
  if (kind == "bump") {
    const double R = pick(in.radius, comp);
    const double s = 1.0 - r2 / (R * R);
    return s > 0.0 ? pick(in.height, comp) * s * s : 0.0;
  }
  if (kind == "gaussian") {
    const double w = in.width;
    return pick(in.mass, comp) * std::pow(2.0 * std::numbers::pi * w * w, -0.5 * dims) * std::exp(-r2 / (2.0 * w * w));
  }
  if (kind == "barenblatt") return barenblatt_value(r2, in.time, pick(barenblatt, comp));
  throw ConfigError("unknown initial profile '" + kind + "'");
}

}  // namespace detail

/// Initial state on grid `g` at the configured start time.
inline StateVector initial_state(const ExperimentConfig& cfg, std::shared_ptr<const Grid> g) {
  const auto& in = cfg.initial;
  const int k = cfg.exponents.k;
  if (in.kind == "file") {
    StateVector s = read_snapshot(in.path, g);
    if (!(s.grid() == *g)) throw ConfigError("initial file grid differs from [grid]");
    if (s.k() != k) throw ConfigError("initial file has a different component count");
    s.time = cfg.start_time();
    if (!s.nonnegative()) throw ConfigError("initial data must be nonnegative");
    return s;
  }
  StateVector s(g, k, cfg.start_time());
  std::vector<BarenblattParams> bb;
  if (in.kind == "barenblatt" || (in.kind == "proportional" && in.base == "barenblatt"))
    for (int i = 0; i < k; ++i) bb.push_back(cfg.barenblatt(static_cast<std::size_t>(i)));
  if (in.kind == "proportional") {
    if (static_cast<int>(in.weights.size()) != k) throw ConfigError("proportional: need one weight per component");
    double sum = 0.0;
    for (double w : in.weights) sum += w;
    if (std::abs(sum - 1.0) > 1e-14) throw ConfigError("proportional: weights must sum to 1");
    const ScalarField v = cell_average(g, [&](Vec2 x) { return detail::profile(in, in.base, 0, x, g->dims(), bb); });
    for (int i = 0; i < k; ++i)
      for (std::size_t c = 0; c < g->size(); ++c)
        s[static_cast<std::size_t>(i)][c] = in.weights[static_cast<std::size_t>(i)] * v[c];
  } else {
    for (int i = 0; i < k; ++i) {
      const auto comp = static_cast<std::size_t>(i);
      s[comp] = cell_average(g, [&](Vec2 x) { return detail::profile(in, in.kind, comp, x, g->dims(), bb); });
    }
  }
  if (!s.nonnegative()) throw ConfigError("initial data must be nonnegative");
  return s;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

using boost::property_tree::ptree;

inline const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"experiment", {"name", "theorems", "seed", "waive_validation", "validation_samples", "runtime_limit"}},
      {"model", {"n", "k", "m", "beta", "lambda", "coupler"}},
      {"flux", {"kind", "a", "b", "c", "C1", "C2", "C3", "C4"}},
      {"drift", {"kind", "coef", "q", "direction"}},
      {"grid", {"dims", "lower", "upper", "cells", "bc"}},
      {"initial", {"kind", "base", "center", "radius", "height", "mass", "width", "time", "weights", "path"}},
      {"solver",
       {"t_start", "t_end", "snapshot_interval", "cfl_safety", "clip_negative", "coefficient_mean", "epsilon_reg",
        "ledger_stride", "max_steps"}},
      {"diagnostics",
       {"mass", "sup_U", "K_hat_t0", "truncation", "truncation_K", "truncation_t0", "truncation_jmax", "harnack",
        "pointwise_harnack", "harnack_component", "oscillation_points", "oscillation_R0", "oscillation_levels",
        "oscillation_epsilon", "oscillation_component", "oracle", "refinement", "boundary_guard", "clip_check",
        "weighted_gradient"}},
  };
  return keys;
}

inline std::vector<std::string> split(const std::string& s, const char* sep) {
  std::vector<std::string> parts;
  boost::split(parts, s, boost::is_any_of(sep));
  for (auto& p : parts) boost::trim(p);
  parts.erase(std::remove(parts.begin(), parts.end(), std::string{}), parts.end());
  return parts;
}

inline double to_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + s + "' is not a number");
  }
}

inline long long to_int(const std::string& key, const std::string& s) {
  const double v = to_double(key, s);
  if (v != std::floor(v)) throw ConfigError(key + ": '" + s + "' is not an integer");
  return static_cast<long long>(v);
}

inline bool to_bool(const std::string& key, std::string s) {
  boost::to_lower(s);
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw ConfigError(key + ": '" + s + "' is not a boolean");
}

inline std::vector<double> to_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const auto& p : split(s, ",")) out.push_back(to_double(key, p));
  return out;
}

inline Vec2 to_point(const std::string& key, const std::string& s) {
  const auto v = to_list(key, s);
  if (v.empty() || v.size() > 2) throw ConfigError(key + ": expected 1 or 2 coordinates");
  return {v[0], v.size() > 1 ? v[1] : 0.0};
}

inline std::vector<Vec2> to_points(const std::string& key, const std::string& s) {
  std::vector<Vec2> out;
  for (const auto& p : split(s, "|")) out.push_back(to_point(key, p));
  return out;
}

class Reader {
 public:
  explicit Reader(const ptree& root) : root_(root) {}

  std::optional<std::string> get(const std::string& section, const std::string& key) const {
    const auto sec = root_.get_child_optional(section);
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    std::string s = *v;
    boost::trim(s);
    if (s.empty()) return std::nullopt;
    return s;
  }

  template <class F>
  void with(const std::string& section, const std::string& key, F&& f) const {
    if (auto v = get(section, key)) f(section + "." + key, *v);
  }

 private:
  const ptree& root_;
};

}  // namespace detail

/// Parses the INI text of an experiment. Throws ConfigError on any unknown
/// section or key, malformed value, or inconsistency.
inline ExperimentConfig parse_config(const std::string& text) {
  using namespace detail;
  ptree root;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  const auto& known = known_keys();
  for (const auto& [section, body] : root) {
    const auto it = known.find(section);
    if (it == known.end()) throw ConfigError("unknown section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  }

  Reader r(root);
  ExperimentConfig c;
  auto dbl = [](double& out) { return [&out](const std::string& k, const std::string& v) { out = to_double(k, v); }; };
  auto bol = [](bool& out) { return [&out](const std::string& k, const std::string& v) { out = to_bool(k, v); }; };
  auto str = [](std::string& out) { return [&out](const std::string&, const std::string& v) { out = v; }; };
  auto lst = [](std::vector<double>& out) {
    return [&out](const std::string& k, const std::string& v) { out = to_list(k, v); };
  };
  auto integer = [](auto& out) {
    return [&out](const std::string& k, const std::string& v) {
      out = static_cast<std::remove_reference_t<decltype(out)>>(to_int(k, v));
    };
  };

  // [experiment]
  r.with("experiment", "name", str(c.name));
  r.with("experiment", "theorems", [&](const std::string&, const std::string& v) { c.theorems = split(v, ","); });
  r.with("experiment", "seed", integer(c.seed));
  r.with("experiment", "waive_validation", bol(c.waive_validation));
  r.with("experiment", "validation_samples", integer(c.validation_samples));
  r.with("experiment", "runtime_limit", dbl(c.runtime_limit));

  // [model]
  int n = 1, k = 1;
  double m = 1.0;
  r.with("model", "n", integer(n));
  r.with("model", "k", integer(k));
  r.with("model", "m", dbl(m));
  if (k < 1) throw ConfigError("model.k must be >= 1");
  std::vector<double> beta{1.0}, lambda{1.0};
  r.with("model", "beta", lst(beta));
  r.with("model", "lambda", lst(lambda));
  auto expand = [&](std::vector<double>& v, const char* what) {
    if (v.size() == 1) v.assign(static_cast<std::size_t>(k), v[0]);
    if (v.size() != static_cast<std::size_t>(k)) throw ConfigError(std::string("model.") + what + ": need 1 or k values");
  };
  expand(beta, "beta");
  expand(lambda, "lambda");
  c.exponents = Exponents{n, k, m, beta, lambda, std::nullopt};
  r.with("model", "coupler", str(c.coupler));

  // [flux]
  r.with("flux", "kind", str(c.flux.kind));
  r.with("flux", "a", dbl(c.flux.a));
  r.with("flux", "b", dbl(c.flux.b));
  r.with("flux", "c", dbl(c.flux.constants.c));
  r.with("flux", "C1", dbl(c.flux.constants.C1));
  r.with("flux", "C2", dbl(c.flux.constants.C2));
  r.with("flux", "C3", dbl(c.flux.constants.C3));
  r.with("flux", "C4", dbl(c.flux.constants.C4));

  // [drift]
  r.with("drift", "kind", str(c.drift.kind));
  r.with("drift", "coef", dbl(c.drift.coef));
  r.with("drift", "q", dbl(c.drift.q));
  r.with("drift", "direction", [&](const std::string& key, const std::string& v) {
    c.drift.direction = to_point(key, v);
    const double len = norm(c.drift.direction);
    if (!(len > 0.0)) throw ConfigError("drift.direction must be nonzero");
    c.drift.direction = (1.0 / len) * c.drift.direction;
  });

  // [grid]
  r.with("grid", "dims", integer(c.grid.dims));
  r.with("grid", "lower", [&](const std::string& key, const std::string& v) { c.grid.lower = to_point(key, v); });
  r.with("grid", "upper", [&](const std::string& key, const std::string& v) { c.grid.upper = to_point(key, v); });
  r.with("grid", "cells", [&](const std::string& key, const std::string& v) {
    const auto cells = to_list(key, v);
    if (cells.empty() || cells.size() > 2) throw ConfigError(key + ": expected 1 or 2 counts");
    c.grid.cells = {static_cast<int>(cells[0]), cells.size() > 1 ? static_cast<int>(cells[1]) : 1};
  });
  r.with("grid", "bc", [&](const std::string& key, const std::string& v) {
    try {
      c.grid.bc = boundary_from_string(v);
    } catch (const DomainError& e) {
      throw ConfigError(key + ": " + e.what());
    }
  });
  if (c.grid.dims == 1) c.grid.lower[1] = 0.0, c.grid.upper[1] = 1.0, c.grid.cells[1] = 1;

  // [initial]
  auto& in = c.initial;
  r.with("initial", "kind", str(in.kind));
  r.with("initial", "base", str(in.base));
  r.with("initial", "center", [&](const std::string& key, const std::string& v) { in.center = to_points(key, v); });
  r.with("initial", "radius", lst(in.radius));
  r.with("initial", "height", lst(in.height));
  r.with("initial", "mass", lst(in.mass));
  r.with("initial", "width", dbl(in.width));
  r.with("initial", "time", dbl(in.time));
  r.with("initial", "weights", lst(in.weights));
  r.with("initial", "path", str(in.path));

  // [solver]
  auto& s = c.solver;
  r.with("solver", "t_start", [&](const std::string& key, const std::string& v) { c.t_start = to_double(key, v); });
  r.with("solver", "t_end", dbl(s.t_end));
  r.with("solver", "snapshot_interval", dbl(s.snapshot_interval));
  r.with("solver", "cfl_safety", dbl(s.cfl_safety));
  r.with("solver", "clip_negative", bol(s.clip_negative));
  r.with("solver", "coefficient_mean", [&](const std::string& key, const std::string& v) {
    if (v == "arithmetic") s.coefficient_mean = CoefficientMean::Arithmetic;
    else if (v == "harmonic") s.coefficient_mean = CoefficientMean::HarmonicRegularized;
    else throw ConfigError(key + ": expected arithmetic or harmonic");
  });
  r.with("solver", "epsilon_reg", dbl(s.epsilon_reg));
  r.with("solver", "ledger_stride", integer(s.ledger_stride));
  r.with("solver", "max_steps", integer(s.max_steps));

  // [diagnostics]
  auto& d = c.diagnostics;
  r.with("diagnostics", "mass", bol(d.mass));
  r.with("diagnostics", "sup_U", bol(d.sup_U));
  r.with("diagnostics", "K_hat_t0", lst(d.K_hat_t0));
  r.with("diagnostics", "truncation", bol(d.truncation));
  r.with("diagnostics", "truncation_K", dbl(d.truncation_K));
  r.with("diagnostics", "truncation_t0", dbl(d.truncation_t0));
  r.with("diagnostics", "truncation_jmax", integer(d.truncation_jmax));
  r.with("diagnostics", "harnack", [&](const std::string& key, const std::string& v) {
    for (const auto& part : split(v, "|")) {
      const auto x = to_list(key, part);
      if (x.size() != 5) throw ConfigError(key + ": each cylinder is 'y0, y1, rho, s, t'");
      d.harnack.push_back({{x[0], x[1]}, x[2], x[3], x[4]});
    }
  });
  r.with("diagnostics", "pointwise_harnack", bol(d.pointwise_harnack));
  r.with("diagnostics", "harnack_component", integer(d.harnack_component));
  r.with("diagnostics", "oscillation_points",
         [&](const std::string&, const std::string& v) { d.oscillation_points = split(v, "|"); });
  r.with("diagnostics", "oscillation_R0", dbl(d.oscillation_R0));
  r.with("diagnostics", "oscillation_levels", integer(d.oscillation_levels));
  r.with("diagnostics", "oscillation_epsilon", dbl(d.oscillation_epsilon));
  r.with("diagnostics", "oscillation_component", integer(d.oscillation_component));
  r.with("diagnostics", "oracle", str(d.oracle));
  r.with("diagnostics", "refinement", [&](const std::string& key, const std::string& v) {
    for (double x : to_list(key, v)) d.refinement.push_back(static_cast<int>(x));
  });
  r.with("diagnostics", "boundary_guard", bol(d.boundary_guard));
  r.with("diagnostics", "clip_check", bol(d.clip_check));
  r.with("diagnostics", "weighted_gradient", bol(d.weighted_gradient));
  return c;
}

/// Cross-field checks that need the whole config.
inline void check_config(const ExperimentConfig& c) {
  try {
    c.exponents.validate();
    c.solver.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (c.grid.dims != 1 && c.grid.dims != 2) throw ConfigError("grid.dims must be 1 or 2");
  if (c.grid.dims != c.exponents.n) throw ConfigError("grid.dims must equal model.n");
  try {
    (void)c.grid.make();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  (void)c.coupler_spec();
  (void)c.flux_law();
  (void)c.drift_law();
  static const std::set<std::string> kinds{"barenblatt", "gaussian", "bump", "proportional", "file"};
  if (!kinds.count(c.initial.kind)) throw ConfigError("unknown initial kind '" + c.initial.kind + "'");
  if (c.initial.kind == "file" && c.initial.path.empty()) throw ConfigError("initial.path is required for kind = file");
  const bool uses_barenblatt =
      c.initial.kind == "barenblatt" || (c.initial.kind == "proportional" && c.initial.base == "barenblatt");
  if (uses_barenblatt && !(c.initial.time > 0.0)) throw ConfigError("initial.time must be > 0 for barenblatt data");
  if (!(c.solver.t_end >= c.start_time())) throw ConfigError("solver.t_end must be >= the start time");
  const auto& d = c.diagnostics;
  if (!d.oracle.empty() && d.oracle != "barenblatt") throw ConfigError("diagnostics.oracle: only 'barenblatt'");
  if (d.oracle == "barenblatt" && (c.initial.kind != "barenblatt" || c.exponents.k != 1))
    throw ConfigError("diagnostics.oracle = barenblatt needs k = 1 and barenblatt initial data");
  if (d.harnack_component < 1 || d.harnack_component > c.exponents.k)
    throw ConfigError("diagnostics.harnack_component out of range");
  if (d.oscillation_component < 1 || d.oscillation_component > c.exponents.k)
    throw ConfigError("diagnostics.oscillation_component out of range");
  if (!d.oscillation_points.empty() && !(d.oscillation_R0 > 0.0))
    throw ConfigError("diagnostics.oscillation_R0 must be > 0 when oscillation points are given");
  if (d.truncation && !(d.truncation_t0 > 0.0)) throw ConfigError("diagnostics.truncation_t0 must be > 0");
  for (int n : d.refinement)
    if (n < 4) throw ConfigError("diagnostics.refinement: cell counts must be >= 4");
  for (const auto& t : c.theorems) {
    bool ok = false;
    for (Result res : {Result::UniformBound, Result::MassNondegenerate, Result::MassDegenerate, Result::MassSingular,
                       Result::IntegralHarnack, Result::LocalContinuity})
      ok = ok || t == to_string(res);
    if (!ok) throw ConfigError("experiment.theorems: unknown result '" + t + "'");
  }
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig c = parse_config(ss.str());
  if (c.initial.kind == "file" && std::filesystem::path(c.initial.path).is_relative())
    c.initial.path = (path.parent_path() / c.initial.path).string();
  check_config(c);
  return c;
}

}  // namespace degenflow::harness
