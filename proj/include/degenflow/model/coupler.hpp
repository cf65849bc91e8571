#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "degenflow/errors.hpp"

namespace degenflow {

/// U = sum_i u^i (total population).
struct SumCoupler {};

/// U = |u| (Euclidean size of the component vector).
struct EuclideanNormCoupler {};

/// U = sum_i lambda_i (u^i)^{beta_i}. For k = 1 this is exactly
/// U = lambda (u)^beta, the single-component equivalence case.
struct WeightedPowerCoupler {
  std::vector<double> lambda;
  std::vector<double> beta;
};

/// Caller-supplied U. `hessian` is optional; without it the conditions that
/// involve grad U_{u^i} cannot be reduced to pointwise checks.
struct CustomCoupler {
  std::string name = "custom";
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  std::function<void(std::span<const double>, std::span<double>)> hessian;  // k*k, row-major
};

struct CouplerValue {
  double U = 0.0;
  std::vector<double> dU;  ///< partials U_{u^i}
};

class CouplerSpec {
 public:
  using Variant = std::variant<SumCoupler, EuclideanNormCoupler, WeightedPowerCoupler, CustomCoupler>;

  CouplerSpec() = default;
  CouplerSpec(Variant v, bool sobolev_declared = true) : v_(std::move(v)), a1_declared_(sobolev_declared) {}

  static CouplerSpec sum() { return CouplerSpec(SumCoupler{}); }
  static CouplerSpec euclidean() { return CouplerSpec(EuclideanNormCoupler{}); }
  static CouplerSpec weighted_power(std::vector<double> lambda, std::vector<double> beta) {
    return CouplerSpec(WeightedPowerCoupler{std::move(lambda), std::move(beta)});
  }

  const Variant& variant() const { return v_; }

  /// The Sobolev membership U^m U_{u^i} in H^1_0 cannot be sampled; it is
  /// carried as a declaration and echoed in validation reports.
  bool sobolev_declared() const { return a1_declared_; }

  std::string name() const {
    return std::visit(
        [](const auto& c) -> std::string {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, SumCoupler>) return "sum";
          else if constexpr (std::is_same_v<T, EuclideanNormCoupler>) return "euclidean";
          else if constexpr (std::is_same_v<T, WeightedPowerCoupler>) return "weighted_power";
          else return c.name;
        },
        v_);
  }

  bool has_hessian() const {
    if (const auto* c = std::get_if<CustomCoupler>(&v_)) return static_cast<bool>(c->hessian);
    return true;
  }

  /// U only, without argument checks. This is the solver's hot path.
  double value(std::span<const double> u) const {
    return std::visit(
        [&](const auto& c) -> double {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, SumCoupler>) {
            double s = 0.0;
            for (double x : u) s += x;
            return s;
          } else if constexpr (std::is_same_v<T, EuclideanNormCoupler>) {
            double s = 0.0;
            for (double x : u) s += x * x;
            return std::sqrt(s);
          } else if constexpr (std::is_same_v<T, WeightedPowerCoupler>) {
            double s = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) s += c.lambda.at(i) * power(u[i], c.beta.at(i));
            return s;
          } else {
            return c.value(u);
          }
        },
        v_);
  }

  /// Partials U_{u^i} written into `du` (size k).
  void gradient(std::span<const double> u, std::span<double> du) const {
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, SumCoupler>) {
            for (auto& d : du) d = 1.0;
          } else if constexpr (std::is_same_v<T, EuclideanNormCoupler>) {
            // Undefined at the origin; 0 keeps U_{u^i} >= 0.
            double s = 0.0;
            for (double x : u) s += x * x;
            const double r = std::sqrt(s);
            for (std::size_t i = 0; i < u.size(); ++i) du[i] = r > 0.0 ? u[i] / r : 0.0;
          } else if constexpr (std::is_same_v<T, WeightedPowerCoupler>) {
            for (std::size_t i = 0; i < u.size(); ++i) {
              const double b = c.beta.at(i);
              du[i] = (u[i] > 0.0 || b >= 1.0) ? c.lambda.at(i) * b * power(u[i], b - 1.0) : 0.0;
            }
          } else {
            c.gradient(u, du);
          }
        },
        v_);
  }

  /// Second partials U_{u^i u^j} (row-major k*k). Returns false when the
  /// coupler does not expose them.
  bool hessian(std::span<const double> u, std::span<double> h) const {
    const std::size_t k = u.size();
    return std::visit(
        [&](const auto& c) -> bool {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, SumCoupler>) {
            for (auto& x : h) x = 0.0;
            return true;
          } else if constexpr (std::is_same_v<T, EuclideanNormCoupler>) {
            double s = 0.0;
            for (double x : u) s += x * x;
            const double r = std::sqrt(s);
            for (std::size_t i = 0; i < k; ++i)
              for (std::size_t j = 0; j < k; ++j)
                h[i * k + j] = r > 0.0 ? ((i == j ? 1.0 : 0.0) - u[i] * u[j] / s) / r : 0.0;
            return true;
          } else if constexpr (std::is_same_v<T, WeightedPowerCoupler>) {
            for (auto& x : h) x = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
              const double b = c.beta.at(i);
              if (b != 1.0 && (u[i] > 0.0 || b >= 2.0))
                h[i * k + i] = c.lambda.at(i) * b * (b - 1.0) * power(u[i], b - 2.0);
            }
            return true;
          } else {
            if (!c.hessian) return false;
            c.hessian(u, h);
            return true;
          }
        },
        v_);
  }

 private:
  static double power(double x, double p) {
    if (p == 0.0) return 1.0;
    if (p == 1.0) return x;
    return std::pow(x, p);
  }

  Variant v_ = SumCoupler{};
  bool a1_declared_ = true;
};

/// U and all partials at a nonnegative state. Throws DomainError on a
/// negative component.
inline CouplerValue compute_U(const CouplerSpec& coupler, std::span<const double> u) {
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!(u[i] >= 0.0)) throw DomainError("compute_U: component " + std::to_string(i) + " is negative");
  CouplerValue out;
  out.U = coupler.value(u);
  out.dU.assign(u.size(), 0.0);
  coupler.gradient(u, out.dU);
  return out;
}

}  // namespace degenflow
