#pragma once

// Pass criteria of the acceptance checks. The harness summary and the
// acceptance suite both read these; nothing else defines a tolerance for a
// theorem check.

namespace degenflow::thresholds {

inline constexpr double mass_drift = 1e-12;               ///< relative, m >= 1 runs without clipping
inline constexpr double mass_drift_singular = 1e-10;      ///< relative, m < 1
inline constexpr double clipped_mass_fraction = 1e-9;     ///< clipped mass / total mass, clipping on
inline constexpr double boundary_mass_fraction = 1e-10;   ///< outermost-layer mass / total mass
inline constexpr double sup_monotone_tolerance = 1e-10;   ///< allowed increase of sup U between snapshots
inline constexpr double bound_exponent_relative = 0.15;   ///< |alpha_hat - alpha| / alpha
inline constexpr double oracle_min_order = 0.8;           ///< empirical L1 order per refinement
inline constexpr double oracle_final_l1 = 2e-3;           ///< final L1 error / M
inline constexpr double proportional_deviation = 1e-10;   ///< / sup over the run
inline constexpr double harnack_stability = 0.20;         ///< relative gamma change between resolutions
inline constexpr double oscillation_sigma_max = 0.95;
inline constexpr int validator_samples = 10000;
inline constexpr double truncation_relative = 1e-10;

inline constexpr double runtime_mass_nondegenerate_s = 120.0;
inline constexpr double runtime_mass_degenerate_s = 120.0;
inline constexpr double runtime_mass_singular_s = 600.0;
inline constexpr double runtime_oracle_convergence_s = 180.0;

}  // namespace degenflow::thresholds
