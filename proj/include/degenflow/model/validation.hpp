#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "degenflow/errors.hpp"
#include "degenflow/model/coupler.hpp"
#include "degenflow/model/exponents.hpp"
#include "degenflow/model/laws.hpp"
#include "degenflow/vec.hpp"

namespace degenflow {

/// One probe point for the structure conditions. `p` and `z` feed the flux
/// and drift checks; `u` and the per-component gradients `grads` feed the
/// coupler conditions.
struct StructureSample {
  Vec2 p{0.0, 0.0};
  double z = 0.0;
  std::vector<double> u;
  std::vector<Vec2> grads;
  Vec2 x{0.0, 0.0};
  double t = 0.0;
};

/// Seeded sample set. The first three samples are the boundary cases
/// (p = 0, z = 0), (p = 0, z > 0) and (p != 0, z = 0); every tenth sample
/// afterwards has |p|/z of order 1e6.
inline std::vector<StructureSample> generate_samples(int dims, int k, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  auto log_uniform = [&](double lo_exp, double hi_exp) { return std::pow(10.0, lo_exp + (hi_exp - lo_exp) * unit(rng)); };
  auto vector = [&](double mag) -> Vec2 {
    if (dims == 1) return {unit(rng) < 0.5 ? -mag : mag, 0.0};
    const double a = angle(rng);
    return {mag * std::cos(a), mag * std::sin(a)};
  };

  std::vector<StructureSample> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    StructureSample smp;
    smp.u.resize(static_cast<std::size_t>(k));
    smp.grads.resize(static_cast<std::size_t>(k));
    smp.x = vector(log_uniform(-2.0, 1.0));
    smp.t = log_uniform(-3.0, 1.0);
    if (s == 0) {
      // all zero
    } else if (s == 1) {
      smp.z = log_uniform(-2.0, 1.0);
      for (auto& ui : smp.u) ui = log_uniform(-2.0, 1.0);
    } else if (s == 2) {
      smp.p = vector(log_uniform(-2.0, 1.0));
      for (auto& g : smp.grads) g = vector(log_uniform(-2.0, 1.0));
    } else {
      const double pm = log_uniform(-3.0, 3.0);
      smp.p = vector(pm);
      if (s % 10 == 0)
        smp.z = pm * 1e-6;
      else
        smp.z = unit(rng) < 0.05 ? 0.0 : log_uniform(-3.0, 2.0);
      for (auto& ui : smp.u) ui = unit(rng) < 0.1 ? 0.0 : log_uniform(-3.0, 2.0);
      for (auto& g : smp.grads) g = vector(log_uniform(-3.0, 3.0));
    }
    out.push_back(std::move(smp));
  }
  return out;
}

enum class CheckStatus { Pass, Fail, Declared, NotChecked };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Declared: return "declared";
    case CheckStatus::NotChecked: return "not_checked";
  }
  return "?";
}

struct ConditionReport {
  std::string condition;  ///< "A1" ... "A7", "band"
  CheckStatus status = CheckStatus::NotChecked;
  std::map<std::string, double> tightest;  ///< empirical tightest constants over the samples
  std::optional<std::size_t> failing_sample;
  std::string detail;
};

struct ValidationReport {
  std::vector<ConditionReport> conditions;
  std::vector<std::string> notes;
  std::vector<StructureSample> failing;  ///< copies of failing samples, by condition order

  bool passed() const {
    for (const auto& c : conditions)
      if (c.status == CheckStatus::Fail) return false;
    return true;
  }

  const ConditionReport& at(const std::string& condition) const {
    for (const auto& c : conditions)
      if (c.condition == condition) return c;
    throw std::out_of_range("no condition " + condition);
  }

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::array();
    std::size_t fail_idx = 0;
    for (const auto& c : conditions) {
      nlohmann::json e{{"condition", c.condition}, {"status", to_string(c.status)}};
      e["tightest_constants"] = c.tightest;
      if (!c.detail.empty()) e["detail"] = c.detail;
      if (c.failing_sample && fail_idx < failing.size()) {
        const auto& s = failing[fail_idx++];
        e["failing_sample"] = {{"index", *c.failing_sample}, {"p", s.p}, {"z", s.z},
                               {"u", s.u}, {"x", s.x}, {"t", s.t}};
      }
      j.push_back(std::move(e));
    }
    return nlohmann::json{{"passed", passed()}, {"conditions", j}, {"notes", notes}};
  }
};

namespace detail {

// Relative slack for "a >= b" comparisons that are equalities in exact
// arithmetic (e.g. p.p >= 1 * |p|^2 for the identity flux).
inline bool geq(double a, double b) { return a >= b - 1e-12 * (std::abs(a) + std::abs(b)); }

inline std::string describe(const StructureSample& s, std::size_t idx) {
  std::ostringstream os;
  os.precision(17);
  os << "sample " << idx << " (p=(" << s.p[0] << "," << s.p[1] << "), z=" << s.z << ")";
  return os.str();
}

}  // namespace detail

/// Checks the structure conditions on a sample set and reports, per
/// condition, pass/fail and the tightest constants observed. Throws
/// RegimeError when the drift is active and q lies outside
/// (1, q_upper_bound(m, n, beta_*)).
inline ValidationReport validate_structure(const FluxLaw& flux, const DriftLaw& drift, const CouplerSpec& coupler,
                                           const Exponents& exp, const std::vector<StructureSample>& samples) {
  exp.validate();
  if (samples.empty()) throw DomainError("validate_structure needs a nonempty sample set");
  bool has_p0 = false, has_z0 = false;
  for (const auto& s : samples) {
    has_p0 = has_p0 || (s.p[0] == 0.0 && s.p[1] == 0.0);
    has_z0 = has_z0 || s.z == 0.0;
  }
  if (!has_p0 || !has_z0) throw DomainError("sample set must contain p = 0 and z = 0 cases");

  const StructureConstants& sc = flux.constants;
  const double C5 = drift.constants.C5;
  const bool drift_active = !drift.absent() || C5 > 0.0;
  if (drift_active) {
    if (!exp.q) throw RegimeError("drift is active but no growth exponent q is set");
    const double qmax = q_upper_bound(exp.m, exp.n, exp.beta_star());
    if (!(*exp.q > 1.0 && *exp.q < qmax)) {
      std::ostringstream os;
      os.precision(17);
      os << "drift growth exponent q = " << *exp.q << " outside the admissible range (1, " << qmax
         << ") given by (m(1 + (1+m)/(mn)) - 1) beta_* + 1";
      throw RegimeError(os.str());
    }
  }

  ValidationReport rep;
  auto fail = [&](ConditionReport& c, std::size_t idx, const StructureSample& s, const std::string& what) {
    if (c.failing_sample) return;
    c.status = CheckStatus::Fail;
    c.failing_sample = idx;
    c.detail = what + " violated at " + detail::describe(s, idx);
    rep.failing.push_back(s);
  };

  const std::size_t k = static_cast<std::size_t>(exp.k);
  const double m = exp.m;

  // A1
  {
    ConditionReport c{"A1", CheckStatus::Declared, {}, std::nullopt,
                      coupler.sobolev_declared() ? "declared, not checked (Sobolev membership cannot be sampled)"
                                                 : "not declared by the coupler"};
    if (!coupler.sobolev_declared()) c.status = CheckStatus::NotChecked;
    rep.conditions.push_back(std::move(c));
  }

  // A2: U(0) = 0, U_{u^i} >= 0, sum_i |U_{u^i} u^i| <= C1 U.
  {
    ConditionReport c{"A2", CheckStatus::Pass, {}, std::nullopt, {}};
    std::vector<double> zero(k, 0.0);
    const double U0 = coupler.value(zero);
    if (U0 != 0.0) {
      c.status = CheckStatus::Fail;
      c.detail = "U(0,...,0) != 0";
    }
    double c1_obs = 0.0, min_partial = std::numeric_limits<double>::infinity();
    std::vector<double> du(k);
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const auto& smp = samples[s];
      const auto val = compute_U(coupler, smp.u);
      double growth = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        min_partial = std::min(min_partial, val.dU[i]);
        growth += std::abs(val.dU[i] * smp.u[i]);
        if (val.dU[i] < 0.0) fail(c, s, smp, "monotonicity U_{u^i} >= 0");
      }
      if (val.U > 0.0) c1_obs = std::max(c1_obs, growth / val.U);
      if (!detail::geq(sc.C1 * val.U, growth)) fail(c, s, smp, "growth sum |U_{u^i} u^i| <= C1 U");
    }
    c.tightest = {{"C1", c1_obs}, {"min_partial", min_partial}};
    rep.conditions.push_back(std::move(c));
  }

  // band: lambda_i (u^i)^{beta_i} <= U
  {
    ConditionReport c{"band", CheckStatus::Pass, {}, std::nullopt, {}};
    double worst = 0.0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const auto& smp = samples[s];
      const double U = coupler.value(smp.u);
      for (std::size_t i = 0; i < k; ++i) {
        const double lower =
            smp.u[i] > 0.0 ? exp.lambda[i] * (exp.beta[i] == 0.0 ? 1.0 : std::pow(smp.u[i], exp.beta[i])) : 0.0;
        if (U > 0.0) worst = std::max(worst, lower / U);
        if (!detail::geq(U, lower)) fail(c, s, smp, "lambda_i (u^i)^beta_i <= U");
      }
    }
    c.tightest = {{"max_lower_over_U", worst}};
    rep.conditions.push_back(std::move(c));
  }

  // A3: sum_i (m U^{m-1} A(grad u^i, u^i) + B(u^i)) . grad U_{u^i} >= 0, with
  // grad U_{u^i} = sum_j U_{u^i u^j} grad u^j.
  {
    ConditionReport c{"A3", CheckStatus::Pass, {}, std::nullopt, {}};
    if (!coupler.has_hessian()) {
      c.status = CheckStatus::NotChecked;
      c.detail = "coupler does not expose U_{u^i u^j}; not reducible to a pointwise check";
    } else {
      std::vector<double> h(k * k);
      double min_lhs = std::numeric_limits<double>::infinity();
      std::size_t skipped = 0;
      for (std::size_t s = 0; s < samples.size(); ++s) {
        const auto& smp = samples[s];
        const double U = coupler.value(smp.u);
        if (m < 1.0 && U == 0.0) {
          ++skipped;
          continue;
        }
        coupler.hessian(smp.u, h);
        const double coef = m * (m == 1.0 ? 1.0 : std::pow(U, m - 1.0));
        double lhs = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
          Vec2 gUi{0.0, 0.0};
          for (std::size_t j = 0; j < k; ++j) gUi = gUi + h[i * k + j] * smp.grads[j];
          const Vec2 v = coef * flux(smp.grads[i], smp.u[i], smp.x, smp.t) + drift(smp.u[i], smp.x, smp.t);
          lhs += dot(v, gUi);
          scale += norm(v) * norm(gUi);
        }
        min_lhs = std::min(min_lhs, lhs);
        if (lhs < -1e-12 * scale) fail(c, s, smp, "(m U^{m-1} A + B) . grad U_{u^i} >= 0");
      }
      c.tightest = {{"min_lhs", min_lhs}};
      if (skipped > 0) c.detail = std::to_string(skipped) + " samples with U = 0 skipped (m < 1)";
    }
    rep.conditions.push_back(std::move(c));
  }

  // A4: grad U . sum_i U_{u^i} A(grad u^i, u^i) >= c |grad U|^2 - C2 U^2.
  {
    ConditionReport c{"A4", CheckStatus::Pass, {}, std::nullopt, {}};
    std::vector<double> du(k);
    double c_obs = std::numeric_limits<double>::infinity(), c2_obs = 0.0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const auto& smp = samples[s];
      const double U = coupler.value(smp.u);
      coupler.gradient(smp.u, du);
      Vec2 gU{0.0, 0.0}, S{0.0, 0.0};
      for (std::size_t i = 0; i < k; ++i) {
        gU = gU + du[i] * smp.grads[i];
        S = S + du[i] * flux(smp.grads[i], smp.u[i], smp.x, smp.t);
      }
      const double lhs = dot(gU, S);
      const double g2 = dot(gU, gU);
      if (g2 > 0.0) c_obs = std::min(c_obs, (lhs + sc.C2 * U * U) / g2);
      if (U > 0.0) c2_obs = std::max(c2_obs, (sc.c * g2 - lhs) / (U * U));
      if (!detail::geq(lhs, sc.c * g2 - sc.C2 * U * U)) fail(c, s, smp, "c|grad U|^2 - C2 U^2 lower bound");
    }
    c.tightest = {{"c", c_obs}, {"C2", c2_obs}};
    rep.conditions.push_back(std::move(c));
  }

  // A5: A(p,z,x,t).p >= c|p|^2 - C2 z^2.
  // A6: |A(p,z,x,t)| <= C3|p| + C4 z.
  {
    ConditionReport c5{"A5", CheckStatus::Pass, {}, std::nullopt, {}};
    ConditionReport c6{"A6", CheckStatus::Pass, {}, std::nullopt, {}};
    double c_obs = std::numeric_limits<double>::infinity(), c2_obs = 0.0, c3_obs = 0.0, c4_obs = 0.0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const auto& smp = samples[s];
      const Vec2 a = flux(smp.p, smp.z, smp.x, smp.t);
      const double ap = dot(a, smp.p), p2 = dot(smp.p, smp.p), pn = std::sqrt(p2), an = norm(a);
      if (p2 > 0.0) c_obs = std::min(c_obs, (ap + sc.C2 * smp.z * smp.z) / p2);
      if (smp.z > 0.0) c2_obs = std::max(c2_obs, (sc.c * p2 - ap) / (smp.z * smp.z));
      if (!detail::geq(ap, sc.c * p2 - sc.C2 * smp.z * smp.z)) fail(c5, s, smp, "coercivity A.p >= c|p|^2 - C2 z^2");
      if (pn > 0.0) c3_obs = std::max(c3_obs, (an - sc.C4 * smp.z) / pn);
      if (smp.z > 0.0) c4_obs = std::max(c4_obs, (an - sc.C3 * pn) / smp.z);
      if (!detail::geq(sc.C3 * pn + sc.C4 * smp.z, an)) fail(c6, s, smp, "growth |A| <= C3|p| + C4 z");
    }
    c5.tightest = {{"c", c_obs}, {"C2", c2_obs}};
    c6.tightest = {{"C3", std::max(c3_obs, 0.0)}, {"C4", c4_obs}};
    rep.conditions.push_back(std::move(c5));
    rep.conditions.push_back(std::move(c6));
  }

  // A7: |B(z,x,t)| <= C5 z^q.
  {
    ConditionReport c{"A7", CheckStatus::Pass, {}, std::nullopt, {}};
    const double q = exp.q.value_or(1.0);
    double c5_obs = 0.0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const auto& smp = samples[s];
      const double bn = norm(drift(smp.z, smp.x, smp.t));
      const double zq = smp.z > 0.0 ? std::pow(smp.z, q) : 0.0;
      if (zq > 0.0) c5_obs = std::max(c5_obs, bn / zq);
      if (!detail::geq(C5 * zq, bn)) fail(c, s, smp, "drift growth |B| <= C5 z^q");
    }
    c.tightest = {{"C5", c5_obs}};
    rep.conditions.push_back(std::move(c));
  }

  auto band_note = [&](const char* name, double v) {
    if (v < 1.0) {
      std::ostringstream os;
      os << name << " = " << v << " is below 1 (outside the stated band 1 <= C < inf; admitted, 0 means term absent)";
      rep.notes.push_back(os.str());
    }
  };
  if (!(sc.c > 0.0 && sc.c <= 1.0)) rep.notes.push_back("coercivity constant c outside (0, 1]");
  band_note("C1", sc.C1);
  band_note("C2", sc.C2);
  band_note("C3", sc.C3);
  band_note("C4", sc.C4);
  band_note("C5", C5);
  return rep;
}

}  // namespace degenflow
