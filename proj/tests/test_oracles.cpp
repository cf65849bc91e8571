#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "degenflow/oracles.hpp"

using namespace degenflow;

namespace {

// Mass of a radial profile by composite Simpson on [0, rmax]; independent of
// the library's quadrature.
template <class F>
double radial_mass(F&& f, int n, double rmax, int intervals = 200000) {
  const double h = rmax / intervals;
  const double area = n == 1 ? 2.0 : 2.0 * std::numbers::pi;
  auto g = [&](double r) { return area * (n == 1 ? 1.0 : r) * f(r); };
  double s = g(0.0) + g(rmax);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * g(i * h);
  return s * h / 3.0;
}

// C from the Beta-function closed form of the radial integral.
double closed_form_C(double m, int n, double M) {
  const double nd = n;
  const double alpha = nd / (nd * (m - 1.0) + 2.0);
  const double kappa = alpha * std::abs(m - 1.0) / (2.0 * m * nd);
  const double omega = n == 1 ? 2.0 : 2.0 * std::numbers::pi;
  double I, e;
  if (m > 1.0) {
    const double p = 1.0 / (m - 1.0);
    I = 0.5 * std::beta(0.5 * nd, p + 1.0);
    e = 0.5 * nd + p;
  } else {
    const double p = 1.0 / (1.0 - m);
    I = 0.5 * std::beta(0.5 * nd, p - 0.5 * nd);
    e = 0.5 * nd - p;
  }
  return std::pow(M * std::pow(kappa, 0.5 * nd) / (omega * I), 1.0 / e);
}

std::shared_ptr<const Grid> line(double a, double b, int n, Boundary bc = Boundary::ZeroFlux) {
  return std::make_shared<const Grid>(Grid::line(a, b, n, bc));
}

Problem scalar_problem(int n, double m) {
  return {Exponents::uniform(n, 1, m), CouplerSpec::sum(), FluxLaw::identity(), DriftLaw::none()};
}

}  // namespace

TEST(Barenblatt, ConstantMatchesBetaClosedForm) {
  for (int n : {1, 2})
    for (double m : {3.0, 2.0, 1.5, 0.95, 0.8}) {
      if (n == 1 && m < 1.0) continue;
      const auto b = make_barenblatt(m, n, 1.7);
      EXPECT_NEAR(b.C, closed_form_C(m, n, 1.7), 1e-11 * b.C) << "n=" << n << " m=" << m;
    }
  const auto b = make_barenblatt(0.5, 1, 1.0);
  EXPECT_NEAR(b.C, closed_form_C(0.5, 1, 1.0), 1e-11 * b.C);
}

TEST(Barenblatt, VanishesAtFrontRadius) {
  const auto b = make_barenblatt(2.0, 2, 1.0);
  for (double t : {0.01, 0.1, 1.0}) {
    const double r = b.front_radius(t);
    EXPECT_EQ(barenblatt_value(r * r * (1.0 + 1e-12), t, b), 0.0);
    EXPECT_GT(barenblatt_value(0.99 * r * 0.99 * r, t, b), 0.0);
  }
}

TEST(Barenblatt, PeakDecreasesAndMatchesFormula) {
  const auto b = make_barenblatt(2.0, 2, 1.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double t : {0.01, 0.02, 0.05, 0.1, 0.5}) {
    const double v = barenblatt_value(Vec2{0.0, 0.0}, t, b);
    EXPECT_NEAR(v, std::pow(t, -b.alpha) * std::pow(b.C, 1.0 / (b.m - 1.0)), 1e-13 * v);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Barenblatt, MassIsConstantInTime) {
  struct Case {
    int n;
    double m, rmax;
  };
  for (const Case c : {Case{1, 2.0, 0.0}, Case{2, 2.0, 0.0}, Case{1, 3.0, 0.0}, Case{2, 0.95, 60.0}}) {
    const auto b = make_barenblatt(c.m, c.n, 1.3);
    for (double t : {0.05, 0.1}) {
      const double rmax = c.m > 1.0 ? b.front_radius(t) : c.rmax;
      const double M = radial_mass([&](double r) { return barenblatt_value(r * r, t, b); }, c.n, rmax);
      // m < 1 keeps a power tail beyond rmax; r^{-40} there is negligible.
      EXPECT_NEAR(M, 1.3, 1e-8 * 1.3) << "n=" << c.n << " m=" << c.m << " t=" << t;
    }
  }
}

TEST(Barenblatt, RejectsBadArguments) {
  const auto b = make_barenblatt(2.0, 1, 1.0);
  EXPECT_THROW(barenblatt_value(0.0, 0.0, b), DomainError);
  EXPECT_THROW(barenblatt_value(0.0, -1.0, b), DomainError);
  EXPECT_THROW(make_barenblatt(1.0, 2, 1.0), RegimeError);
  EXPECT_THROW(make_barenblatt(0.0, 2, 1.0), RegimeError);
  EXPECT_THROW(make_barenblatt(2.0, 2, 0.0), DomainError);
  // n = 3 critical exponent is 1/3.
  EXPECT_THROW(make_barenblatt(0.3, 3, 1.0), RegimeError);
}

TEST(Barenblatt, TendsToHeatKernelAsMApproachesOne) {
  const double t = 0.05, M = 1.0;
  for (double m : {1.0 + 1e-3, 1.0 - 1e-3}) {
    const auto b = make_barenblatt(m, 2, M);
    const double peak = heat_kernel_value(0.0, t, 2, M);
    for (double r = 0.0; r < 1.0; r += 0.02) {
      const double k = heat_kernel_value(r * r, t, 2, M);
      if (k < 0.1 * peak) break;
      EXPECT_NEAR(barenblatt_value(r * r, t, b), k, 0.01 * k) << "m=" << m << " r=" << r;
    }
  }
}

// The residual gate: sampled closed forms must satisfy the discrete operator
// to second order on the region away from the front.
TEST(Barenblatt, ResidualOfDiscreteOperatorIsSecondOrderAwayFromFront) {
  const auto b = make_barenblatt(2.0, 1, 1.0);
  const double t = 0.2;
  std::vector<double> res;
  for (int cells : {200, 400, 800}) {
    const auto g = line(-2.0, 2.0, cells);
    const double d = 1e-4;
    const auto tr = barenblatt_trajectory(g, b, {t - d, t, t + d});
    res.push_back(residual(tr, scalar_problem(1, 2.0), 0.1).front().norm[0]);
  }
  for (std::size_t i = 1; i < res.size(); ++i) {
    const double order = std::log2(res[i - 1] / res[i]);
    EXPECT_GT(order, 1.8) << res[i - 1] << " -> " << res[i];
  }
}

TEST(Barenblatt, ResidualIsFirstOrderGlobally) {
  const auto b = make_barenblatt(2.0, 1, 1.0);
  const double t = 0.2;
  std::vector<double> res;
  for (int cells : {400, 1600}) {
    const auto g = line(-2.0, 2.0, cells);
    const auto tr = barenblatt_trajectory(g, b, {t - 1e-4, t, t + 1e-4});
    res.push_back(residual(tr, scalar_problem(1, 2.0)).front().norm[0]);
  }
  // The front caps the global rate; it must still converge.
  EXPECT_LT(res[1], res[0]);
}

TEST(Barenblatt, FastDiffusionResidualIsSecondOrder) {
  const auto b = make_barenblatt(0.95, 2, 1.0);
  const double t = 0.1;
  std::vector<double> res;
  for (int cells : {64, 128}) {
    const auto g = std::make_shared<const Grid>(Grid::plane({-2, -2}, {2, 2}, cells, cells));
    const auto tr = barenblatt_trajectory(g, b, {t - 1e-5, t, t + 1e-5});
    res.push_back(residual(tr, scalar_problem(2, 0.95), 0.1).front().norm[0]);
  }
  EXPECT_GT(std::log2(res[0] / res[1]), 1.8);
}

TEST(HeatKernel, ClosedFormValues) {
  EXPECT_NEAR(heat_kernel_value(Vec2{0.0, 0.0}, 1.0 / (4.0 * std::numbers::pi), 2, 1.0), 1.0, 1e-15);
  const double t = 0.3;
  const double c = heat_kernel_value(0.0, t, 2, 2.0);
  EXPECT_NEAR(heat_kernel_value(4.0 * t * std::log(2.0), t, 2, 2.0), 0.5 * c, 1e-15 * c);
  EXPECT_THROW(heat_kernel_value(0.0, 0.0, 1, 1.0), DomainError);
}

TEST(HeatKernel, GridMassIsM) {
  const auto g = line(-4.0, 4.0, 4000);
  const auto f = sample(g, [](Vec2 x) { return heat_kernel_value(x, 0.1, 1, 1.5); });
  EXPECT_NEAR(integrate(f), 1.5, 1e-8);
  const auto g2 = std::make_shared<const Grid>(Grid::plane({-3, -3}, {3, 3}, 600, 600));
  const auto f2 = sample(g2, [](Vec2 x) { return heat_kernel_value(x, 0.05, 2, 1.0); });
  EXPECT_NEAR(integrate(f2), 1.0, 1e-8);
}

TEST(HeatKernel, ResidualOrderTwoInSpaceAndTime) {
  std::vector<double> res;
  double d = 2e-4;
  for (int cells : {100, 200, 400}) {
    const auto g = line(-3.0, 3.0, cells);
    const auto tr = sample_trajectory(g, {0.1 - d, 0.1, 0.1 + d},
                                      [](Vec2 x, double t) { return heat_kernel_value(x, t, 1, 1.0); });
    res.push_back(residual(tr, scalar_problem(1, 1.0)).front().norm[0]);
    d *= 0.5;
  }
  for (std::size_t i = 1; i < res.size(); ++i) EXPECT_GT(std::log2(res[i - 1] / res[i]), 1.9);
}

TEST(Residual, ConstantStateIsZeroAndShortTrajectoriesFail) {
  const auto g = line(0.0, 1.0, 16);
  const auto tr = sample_trajectory(g, {0.1, 0.2, 0.3}, [](Vec2, double) { return 0.7; });
  for (const auto& p : residual(tr, scalar_problem(1, 2.0))) EXPECT_EQ(p.norm[0], 0.0);
  const auto two = sample_trajectory(g, {0.1, 0.2}, [](Vec2, double) { return 0.7; });
  EXPECT_THROW(residual(two, scalar_problem(1, 2.0)), DomainError);
}

TEST(Oracle, TrajectoriesAreTaggedOracle) {
  const auto g = line(-1.0, 1.0, 32);
  EXPECT_EQ(barenblatt_trajectory(g, make_barenblatt(2.0, 1, 1.0), {0.1}).source, "oracle");
  EXPECT_EQ(heat_kernel_trajectory(g, 1.0, {0.1}).source, "oracle");
  EXPECT_THROW(barenblatt_trajectory(g, make_barenblatt(2.0, 2, 1.0), {0.1}), DomainError);
}

TEST(ProportionalReduction, IdentityForSingleWeight) {
  const auto g = line(-1.0, 1.0, 32);
  const auto v = barenblatt_trajectory(g, make_barenblatt(2.0, 1, 1.0), {0.1, 0.2});
  const auto u = proportional_reduction({1.0}, v);
  ASSERT_EQ(u.size(), v.size());
  for (std::size_t s = 0; s < v.size(); ++s) EXPECT_EQ(u.snapshots[s][0].values, v.snapshots[s][0].values);
}

TEST(ProportionalReduction, MassesSplitByWeight) {
  const auto g = line(-2.0, 2.0, 400);
  const auto b = make_barenblatt(2.0, 1, 1.0);
  const auto v = barenblatt_trajectory(g, b, {0.1, 0.2, 0.4});
  const auto u = proportional_reduction({0.3, 0.7}, v);
  for (const auto& s : u.snapshots) {
    const double M = integrate(s[0]) + integrate(s[1]);
    EXPECT_NEAR(integrate(s[0]), 0.3 * M, 1e-15);
    EXPECT_NEAR(integrate(s[1]), 0.7 * M, 1e-15);
  }
}

TEST(ProportionalReduction, SatisfiesTheCoupledOperator) {
  // (c_i v)_t - div((sum_j c_j v)^{m-1} grad(c_i v)) = c_i * scalar residual.
  const auto g = line(-2.0, 2.0, 200);
  const auto b = make_barenblatt(2.0, 1, 1.0);
  const auto v = barenblatt_trajectory(g, b, {0.2 - 1e-4, 0.2, 0.2 + 1e-4});
  const std::vector<double> w{0.2, 0.3, 0.5};
  const auto u = proportional_reduction(w, v);
  const Problem multi{Exponents::uniform(1, 3, 2.0), CouplerSpec::sum(), FluxLaw::identity(), DriftLaw::none()};
  const double rv = residual(v, scalar_problem(1, 2.0)).front().norm[0];
  const auto ru = residual(u, multi).front().norm;
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(ru[i], w[i] * rv, 1e-12 * rv);
}

TEST(ProportionalReduction, RejectsBadWeights) {
  const auto g = line(-1.0, 1.0, 16);
  const auto v = heat_kernel_trajectory(g, 1.0, {0.1});
  EXPECT_THROW(proportional_reduction({0.3, 0.6}, v), DomainError);
  EXPECT_THROW(proportional_reduction({1.2, -0.2}, v), DomainError);
  EXPECT_THROW(proportional_reduction({}, v), DomainError);
  EXPECT_NO_THROW(proportional_reduction({0.5, 0.5 + 5e-15}, v));
}
