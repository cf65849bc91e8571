// Three species with proportional initial data u^i = c_i v stay proportional
// under the Sum coupler; compares against the scalar run scaled by c_i.

#include <cstdio>
#include <memory>

#include "degenflow/degenflow.hpp"

using namespace degenflow;

int main() {
  const auto grid = std::make_shared<const Grid>(Grid::line(-2.0, 2.0, 512));
  const std::vector<double> weights{0.2, 0.3, 0.5};
  const double m = 2.0;

  StateVector scalar0(grid, 1);
  for (std::size_t c = 0; c < grid->size(); ++c) {
    const double x = grid->center(c)[0];
    const double r = 1.0 - x * x / 0.36;
    scalar0[0][c] = r > 0.0 ? r * r : 0.0;
  }
  StateVector multi0(grid, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t c = 0; c < grid->size(); ++c) multi0[i][c] = weights[i] * scalar0[0][c];

  SolverConfig cfg;
  cfg.t_end = 0.2;
  cfg.snapshot_interval = 0.05;
  cfg.clip_negative = false;

  const Problem scalar_pb{Exponents::uniform(1, 1, m), CouplerSpec::sum(), FluxLaw::identity(), DriftLaw::none()};
  const Problem multi_pb{Exponents::uniform(1, 3, m), CouplerSpec::sum(), FluxLaw::identity(), DriftLaw::none()};

  const Trajectory v = simulate(scalar0, cfg, scalar_pb);
  const Trajectory u = simulate(multi0, cfg, multi_pb);
  const Trajectory oracle = proportional_reduction(weights, v);

  const auto d = harness::compare(u, oracle, harness::Norm::Linf);
  double sup = 0.0;
  for (const auto& s : v.snapshots) sup = std::max(sup, extrema(s[0]).sup);
  std::printf("steps %zu, snapshots %zu\n", u.steps, u.size());
  for (std::size_t n = 0; n < d.times.size(); ++n)
    std::printf("t = %-6.3g  max_i |u^i - c_i v| = %.3e\n", d.times[n],
                std::max({d.errors[0][n], d.errors[1][n], d.errors[2][n]}));
  std::printf("relative to sup v: %.3e\n", d.max / sup);
  return 0;
}
