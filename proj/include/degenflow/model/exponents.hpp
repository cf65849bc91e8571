#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "degenflow/errors.hpp"

namespace degenflow {

/// Parameter record of the coupled system
///   (u^i)_t = div( m U^{m-1} A(grad u^i, u^i, x, t) + B(u^i, x, t) ),
/// with 0 <= lambda_i (u^i)^{beta_i} <= U.
struct Exponents {
  int n = 2;  ///< spatial dimension
  int k = 1;  ///< number of components
  double m = 1.0;
  std::vector<double> beta;    ///< one per component, >= 0
  std::vector<double> lambda;  ///< one per component, > 0
  /// Growth exponent of the drift; set only when the drift is active.
  std::optional<double> q;

  static Exponents uniform(int n, int k, double m, double beta = 1.0, double lambda = 1.0) {
    return Exponents{n, k, m, std::vector<double>(static_cast<std::size_t>(k), beta),
                     std::vector<double>(static_cast<std::size_t>(k), lambda), std::nullopt};
  }

  double beta_star() const { return *std::min_element(beta.begin(), beta.end()); }

  void validate() const {
    if (n < 1) throw DomainError("dimension n must be >= 1");
    if (k < 1) throw DomainError("component count k must be >= 1");
    if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("exponent m must be a positive finite number");
    if (beta.size() != static_cast<std::size_t>(k) || lambda.size() != static_cast<std::size_t>(k))
      throw DomainError("beta and lambda need exactly k entries");
    for (double b : beta)
      if (!(b >= 0.0)) throw DomainError("beta_i must be >= 0");
    for (double l : lambda)
      if (!(l > 0.0)) throw DomainError("lambda_i must be > 0");
  }
};

/// (n-2)/n: below it the scalar porous medium equation loses its L1 mass.
constexpr double critical_exponent(int n) { return static_cast<double>(n - 2) / static_cast<double>(n); }

/// Upper end of the admissible drift growth range, (m(1 + (1+m)/(mn)) - 1) beta_* + 1.
inline double q_upper_bound(double m, int n, double beta_star) {
  const double nd = static_cast<double>(n);
  return (m * (1.0 + (1.0 + m) / (m * nd)) - 1.0) * beta_star + 1.0;
}

/// Open interval (lower, 1) of effective exponents m_i for which the singular
/// system conserves each component's mass. `homogeneous` selects the sharper
/// bound available when C2 = C4 = 0.
inline std::pair<double, double> singular_mass_range(int n, bool homogeneous) {
  if (n < 2) throw DomainError("singular mass range is defined for n >= 2");
  const double d = static_cast<double>(n);
  double lower = 0.0;
  if (homogeneous)
    lower = (d * d - d + 3.0 + std::sqrt(7.0 * d * d + 2.0 * d - 7.0)) / (d * d + 2.0 * d + 4.0);
  else
    lower = (d * d + d + 4.0 + std::sqrt(2.0 * d * (7.0 * d + 11.0))) / (d * d + 5.0 * d + 8.0);
  return {lower, 1.0};
}

enum class Regime { Nondegenerate, Degenerate, Singular };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Nondegenerate: return "nondegenerate";
    case Regime::Degenerate: return "degenerate";
    case Regime::Singular: return "singular";
  }
  return "?";
}

struct ComponentExponents {
  double alpha0 = 0.0;   ///< beta_i (m-1), the intrinsic-scaling exponent
  double m_i = 1.0;      ///< alpha0 + 1, the effective scalar exponent
  double theta_i = 2.0;  ///< n alpha0 + 2, the Harnack exponent
};

struct DerivedExponents {
  Regime regime = Regime::Nondegenerate;
  std::vector<ComponentExponents> components;
};

// m_i and theta_i are built from the same alpha0 expression so that the
// identities m_i = alpha0 + 1 and theta_i = n alpha0 + 2 hold bit for bit.
inline DerivedExponents derive(const Exponents& e) {
  e.validate();
  DerivedExponents d;
  d.regime = e.m == 1.0 ? Regime::Nondegenerate : (e.m > 1.0 ? Regime::Degenerate : Regime::Singular);
  for (int i = 0; i < e.k; ++i) {
    ComponentExponents c;
    c.alpha0 = e.beta[static_cast<std::size_t>(i)] * (e.m - 1.0);
    c.m_i = c.alpha0 + 1.0;
    c.theta_i = static_cast<double>(e.n) * c.alpha0 + 2.0;
    d.components.push_back(c);
  }
  return d;
}

/// Qualitative results whose hypotheses the classifier checks.
enum class Result {
  UniformBound,           ///< sup_x U(x,t) <= K(t0) for t >= t0
  MassNondegenerate,      ///< per-component mass conservation, m = 1
  MassDegenerate,         ///< per-component mass conservation, m > 1
  MassSingular,           ///< per-component mass conservation, m < 1
  IntegralHarnack,        ///< integral and pointwise Harnack estimates, m < 1
  LocalContinuity,        ///< intrinsic-scaling oscillation decay
};

inline const char* to_string(Result r) {
  switch (r) {
    case Result::UniformBound: return "uniform_bound";
    case Result::MassNondegenerate: return "mass_conservation_nondegenerate";
    case Result::MassDegenerate: return "mass_conservation_degenerate";
    case Result::MassSingular: return "mass_conservation_singular";
    case Result::IntegralHarnack: return "integral_harnack";
    case Result::LocalContinuity: return "local_continuity";
  }
  return "?";
}

struct Applicability {
  Result result;
  bool applies = false;
  std::string violated;  ///< first violated hypothesis; empty when applies
};

struct RegimeReport {
  DerivedExponents derived;
  /// per_component[i] lists every Result with its status for component i.
  std::vector<std::vector<Applicability>> per_component;

  bool applies(int component, Result r) const {
    for (const auto& a : per_component.at(static_cast<std::size_t>(component)))
      if (a.result == r) return a.applies;
    return false;
  }
};

/// Per component, which qualitative results have their hypotheses met.
/// A set `q` means the drift is active (C5 > 0). `homogeneous` states that
/// C2 = C4 = 0, which widens the singular mass-conservation range.
inline RegimeReport classify_regime(const Exponents& e, bool homogeneous = false) {
  RegimeReport rep;
  rep.derived = derive(e);
  const bool drift = e.q.has_value();
  const double qmax = q_upper_bound(e.m, e.n, e.beta_star());
  const double mcrit = critical_exponent(e.n);

  for (int i = 0; i < e.k; ++i) {
    const auto& c = rep.derived.components[static_cast<std::size_t>(i)];
    const double beta = e.beta[static_cast<std::size_t>(i)];
    std::vector<Applicability> list;
    auto add = [&](Result r, std::string violated) {
      list.push_back({r, violated.empty(), std::move(violated)});
    };
    auto first = [](std::initializer_list<std::pair<bool, const char*>> conds) -> std::string {
      for (const auto& [ok, what] : conds)
        if (!ok) return what;
      return {};
    };
    const bool q_ok = !drift || (*e.q > 1.0 && *e.q < qmax);

    add(Result::UniformBound, first({{e.n >= 2, "n >= 2"},
                                     {e.m > mcrit, "m > (n-2)/n"},
                                     {q_ok, "1 < q < q_upper_bound(m, n, beta_*)"}}));
    add(Result::MassNondegenerate,
        first({{e.n >= 2, "n >= 2"}, {e.m == 1.0, "m = 1"}, {!drift, "C5 = 0 (no drift)"}}));
    const double deg_floor = beta > 0.0 ? std::max(1.0, 2.0 - 1.0 / beta) : 1.0;
    add(Result::MassDegenerate, first({{e.n >= 2, "n >= 2"},
                                       {e.m > deg_floor, "m > max(1, 2 - 1/beta_i)"},
                                       {!drift, "C5 = 0 (no drift)"}}));
    {
      std::string v;
      if (e.n < 2) {
        v = "n >= 2";
      } else {
        const auto [lo, hi] = singular_mass_range(e.n, homogeneous);
        v = first({{e.m < 1.0, "0 < m < 1"},
                   {c.m_i > lo && c.m_i < hi, "m_i inside the singular mass range"},
                   {!drift, "C5 = 0 (no drift)"}});
      }
      add(Result::MassSingular, v);
    }
    const double harnack_floor = beta > 0.0 ? 1.0 - 1.0 / beta : -1.0e300;
    add(Result::IntegralHarnack, first({{e.m < 1.0, "m < 1"},
                                        {e.m > harnack_floor, "m > 1 - 1/beta_i"},
                                        {c.theta_i > 0.0, "theta_i > 0"},
                                        {!drift, "C5 = 0 (no drift)"}}));
    const double q_cont_lo = 0.5 * (e.m - 1.0) * e.beta_star() + 1.0;
    const bool q_cont = !drift || (*e.q > q_cont_lo && *e.q < qmax);
    add(Result::LocalContinuity, first({{e.n >= 2, "n >= 2"},
                                        {e.m != 1.0, "m != 1 (degenerate or fast-diffusion system)"},
                                        {q_cont, "C5 = 0 or (m-1) beta_*/2 + 1 < q < q_upper_bound"}}));
    rep.per_component.push_back(std::move(list));
  }
  return rep;
}

}  // namespace degenflow
