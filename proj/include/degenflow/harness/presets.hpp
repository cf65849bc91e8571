#pragma once

#include <map>
#include <string>
#include <vector>

#include "degenflow/errors.hpp"
#include "degenflow/harness/config.hpp"

namespace degenflow::harness {

namespace detail {

inline const std::map<std::string, std::string>& preset_texts() {
  static const std::map<std::string, std::string> texts{
      {"thm11_bound", R"(# Scalar porous medium flow from a Barenblatt profile; sup U is measured
# against the t0^{-alpha} rate with alpha = n / (n(m-1) + 2) = 1/2.
[experiment]
name = thm11_bound
theorems = uniform_bound
seed = 11

[model]
n = 2
k = 1
m = 2
beta = 1
coupler = sum

[flux]
kind = identity

[grid]
dims = 2
lower = -1.5, -1.5
upper = 1.5, 1.5
cells = 128, 128
bc = zero_flux

[initial]
kind = barenblatt
mass = 1
time = 0.005
center = 0, 0

[solver]
t_end = 0.1
snapshot_interval = 0.0025
clip_negative = true
ledger_stride = 100

[diagnostics]
K_hat_t0 = 0.01, 0.02, 0.04, 0.08
truncation = true
truncation_t0 = 0.02
truncation_jmax = 3
oracle = barenblatt
)"},
      {"thm12_mass_m1", R"(# Two species, linear diffusion through a rotated flux a p + b p_perp.
# Claimed constants: c = 0.5 <= a, C3 = 2 >= sqrt(a^2 + b^2).
[experiment]
name = thm12_mass_m1
theorems = mass_conservation_nondegenerate
seed = 12
runtime_limit = 120

[model]
n = 2
k = 2
m = 1
beta = 1
coupler = sum

[flux]
kind = scaled
a = 1
b = 1.5
c = 0.5
C3 = 2

[grid]
dims = 2
lower = -5, -5
upper = 5, 5
cells = 128, 128
bc = zero_flux

[initial]
kind = bump
center = -0.4, 0 | 0.4, 0.2
radius = 0.6, 0.5
height = 1, 0.8

[solver]
t_end = 0.1
snapshot_interval = 0.01
clip_negative = false
ledger_stride = 50

[diagnostics]
boundary_guard = true
)"},
      {"thm13_mass_degenerate", R"(# Two species, porous-medium coupling m = 2 through U = u1 + u2, compact
# bumps that merge while spreading.
[experiment]
name = thm13_mass_degenerate
theorems = mass_conservation_degenerate
seed = 13
runtime_limit = 120

[model]
n = 1
k = 2
m = 2
beta = 1
coupler = sum

[flux]
kind = identity

[grid]
dims = 1
lower = -2
upper = 2
cells = 4096
bc = zero_flux

[initial]
kind = bump
center = -0.5 | 0.45
radius = 0.45, 0.4
height = 0.3, 0.25

[solver]
t_end = 0.5
snapshot_interval = 0.05
cfl_safety = 0.9
clip_negative = false
ledger_stride = 10000

[diagnostics]
boundary_guard = true
clip_check = true
)"},
      {"thm14_mass_singular", R"(# Fast diffusion m = 0.95 (m_i = 0.95 above the n = 2 threshold 10/11),
# compact bump data on a box wide enough that the tails never reach the
# boundary layer.
[experiment]
name = thm14_mass_singular
theorems = mass_conservation_singular
seed = 14
runtime_limit = 600

[model]
n = 2
k = 2
m = 0.95
beta = 1
coupler = sum

[flux]
kind = identity

[grid]
dims = 2
lower = -7, -7
upper = 7, 7
cells = 256, 256
bc = zero_flux

[initial]
kind = bump
center = -0.5, 0 | 0.5, 0.3
radius = 0.6, 0.5
height = 1, 0.8

[solver]
t_end = 0.05
snapshot_interval = 0.005
clip_negative = false
epsilon_reg = 1e-12
ledger_stride = 50

[diagnostics]
boundary_guard = true
)"},
      {"thm16_continuity", R"(# Degenerate two-species run; oscillation decay over nested intrinsic
# cylinders at the front, in the interior and at the maximum of u1.
[experiment]
name = thm16_continuity
seed = 16

[model]
n = 1
k = 2
m = 2
beta = 1
coupler = sum

[flux]
kind = identity

[grid]
dims = 1
lower = -2
upper = 2
cells = 1024
bc = zero_flux

[initial]
kind = bump
center = -0.3 | 0.4
radius = 0.5, 0.5
height = 0.6, 0.5

[solver]
t_end = 0.3
snapshot_interval = 0.001
clip_negative = true
ledger_stride = 1000

[diagnostics]
oscillation_points = front | interior | max
oscillation_R0 = 0.3
oscillation_levels = 5
oscillation_component = 1
)"},
      {"oracle_convergence", R"(# Scalar m = 2 porous medium flow against the Barenblatt solution on three
# grids.
[experiment]
name = oracle_convergence
seed = 5
runtime_limit = 180

[model]
n = 1
k = 1
m = 2
beta = 1
coupler = sum

[flux]
kind = identity

[grid]
dims = 1
lower = -2.5
upper = 2.5
cells = 4096
bc = zero_flux

[initial]
kind = barenblatt
mass = 1
time = 0.1
center = 0

[solver]
t_end = 0.5
snapshot_interval = 0.1
clip_negative = true
ledger_stride = 10000

[diagnostics]
oracle = barenblatt
refinement = 1024, 2048, 4096
)"},
      {"harnack_fit", R"(# Fast diffusion Barenblatt flow (n = 2, m = 0.95); integral Harnack ratios
# on five cylinders, measured on two grids.
[experiment]
name = harnack_fit
theorems = integral_harnack
seed = 7

[model]
n = 2
k = 1
m = 0.95
beta = 1
coupler = sum

[flux]
kind = identity

[grid]
dims = 2
lower = -3, -3
upper = 3, 3
cells = 256, 256
bc = zero_flux

[initial]
kind = barenblatt
mass = 1
time = 0.05
center = 0, 0

[solver]
t_end = 0.25
snapshot_interval = 0.005
clip_negative = true
ledger_stride = 100

[diagnostics]
harnack = 0, 0, 0.5, 0.1, 0.2 | 0.5, 0, 0.4, 0.1, 0.25 | -0.5, 0.5, 0.4, 0.15, 0.25 | 0, 0, 0.8, 0.05, 0.25 | 1, 0, 0.5, 0.08, 0.2
pointwise_harnack = true
refinement = 128, 256
)"},
  };
  return texts;
}

}  // namespace detail

inline std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : detail::preset_texts()) names.push_back(name);
  return names;
}

inline const std::string& preset_text(const std::string& name) {
  const auto& texts = detail::preset_texts();
  const auto it = texts.find(name);
  if (it == texts.end()) {
    std::string msg = "unknown preset '" + name + "'; valid names:";
    for (const auto& n : preset_names()) msg += " " + n;
    throw ConfigError(msg);
  }
  return it->second;
}

inline ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c = parse_config(preset_text(name));
  check_config(c);
  return c;
}

}  // namespace degenflow::harness
