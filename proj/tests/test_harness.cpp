#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "degenflow/harness/presets.hpp"
#include "degenflow/harness/run.hpp"

using namespace degenflow;
using namespace degenflow::harness;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("degenflow_harness_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* tiny = R"([experiment]
name = tiny
seed = 3
validation_samples = 500

[model]
n = 1
k = 2
m = 2
beta = 1

[grid]
dims = 1
lower = -1
upper = 1
cells = 64

[initial]
kind = bump
center = -0.2 | 0.3
radius = 0.3
height = 1, 0.5

[solver]
t_end = 0.02
snapshot_interval = 0.005
clip_negative = false
)";

std::string with(const std::string& extra) { return std::string(tiny) + extra; }

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  if (pos != std::string::npos) text.replace(pos, from.size(), to);
  return text;
}

ExperimentConfig checked(const std::string& text) {
  ExperimentConfig c = parse_config(text);
  check_config(c);
  return c;
}

RunResult run_text(const std::string& text, const fs::path& dir, bool write = false) {
  return run_experiment(parse_config(text), dir, {write, text});
}

}  // namespace

TEST(Config, TinyParses) {
  const auto c = checked(tiny);
  EXPECT_EQ(c.name, "tiny");
  EXPECT_EQ(c.exponents.k, 2);
  EXPECT_EQ(c.exponents.beta, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(c.initial.center.size(), 2u);
  EXPECT_EQ(c.initial.height, (std::vector<double>{1.0, 0.5}));
  EXPECT_EQ(c.grid.cells[0], 64);
  EXPECT_EQ(c.grid.cells[1], 1);
  EXPECT_EQ(c.solver.t_end, 0.02);
  EXPECT_EQ(c.start_time(), 0.0);
}

TEST(Config, RejectsUnknownNames) {
  EXPECT_THROW(parse_config(with("[extra]\nx = 1\n")), ConfigError);
  EXPECT_THROW(parse_config(with("[diagnostics]\nsupU = true\n")), ConfigError);
  EXPECT_THROW(parse_config("stray = 1\n" + std::string(tiny)), ConfigError);
}

TEST(Config, RejectsMalformedValues) {
  EXPECT_THROW(parse_config(replace(tiny, "m = 2", "m = two")), ConfigError);
  EXPECT_THROW(parse_config(replace(tiny, "cells = 64", "cells = 64, 64, 64")), ConfigError);
  EXPECT_THROW(parse_config(replace(tiny, "clip_negative = false", "clip_negative = maybe")), ConfigError);
  EXPECT_THROW(parse_config(replace(tiny, "beta = 1", "beta = 1, 1, 1")), ConfigError);
  EXPECT_THROW(parse_config(with("[grid]\nbc = sticky\n")), ConfigError);
  EXPECT_THROW(parse_config(with("[drift]\ndirection = 0, 0\n")), ConfigError);
  EXPECT_THROW(parse_config("[model\nn = 1\n"), ConfigError);
}

TEST(Config, CrossFieldChecks) {
  EXPECT_THROW(checked(replace(tiny, "n = 1", "n = 2")), ConfigError);
  EXPECT_THROW(checked(replace(tiny, "t_end = 0.02", "t_end = -1")), ConfigError);
  EXPECT_THROW(checked(replace(tiny, "cells = 64", "cells = 2")), ConfigError);
  EXPECT_THROW(checked(with("[diagnostics]\noracle = barenblatt\n")), ConfigError);
  EXPECT_THROW(checked(with("[diagnostics]\noracle = gaussian\n")), ConfigError);
  EXPECT_THROW(checked(with("[diagnostics]\nharnack_component = 3\n")), ConfigError);
  EXPECT_THROW(checked(with("[diagnostics]\nrefinement = 64, 2\n")), ConfigError);
  EXPECT_THROW(checked(with("[diagnostics]\noscillation_points = max\n")), ConfigError);
  EXPECT_THROW(checked(with("[diagnostics]\ntruncation = true\n")), ConfigError);
  EXPECT_THROW(checked(replace(tiny, "seed = 3", "seed = 3\ntheorems = fermat")), ConfigError);
  EXPECT_THROW(checked(replace(tiny, "kind = bump", "kind = barenblatt")), ConfigError);
  EXPECT_THROW(checked(replace(tiny, "kind = bump", "kind = file")), ConfigError);
  EXPECT_THROW(checked(replace(tiny, "m = 2", "m = 2\ncoupler = max")), ConfigError);
}

TEST(Config, StartTimeFollowsBarenblattProfile) {
  auto text = replace(tiny, "kind = bump", "kind = barenblatt\ntime = 0.01");
  text = replace(text, "k = 2", "k = 1");
  const auto c = checked(text);
  EXPECT_EQ(c.start_time(), 0.01);
  EXPECT_EQ(checked(replace(text, "[solver]", "[solver]\nt_start = 0.005")).start_time(), 0.005);
}

TEST(Config, LoadResolvesRelativeFilePaths) {
  const fs::path dir = scratch("load");
  fs::create_directories(dir);
  std::ofstream(dir / "c.ini") << replace(tiny, "kind = bump", "kind = file\npath = init.csv");
  EXPECT_EQ(load_config(dir / "c.ini").initial.path, (dir / "init.csv").string());
  EXPECT_THROW(load_config(dir / "missing.ini"), ConfigError);
}

TEST(Presets, AllParseValidateAndRoundTrip) {
  const auto names = preset_names();
  EXPECT_EQ(names, (std::vector<std::string>{"harnack_fit", "oracle_convergence", "thm11_bound", "thm12_mass_m1",
                                             "thm13_mass_degenerate", "thm14_mass_singular", "thm16_continuity"}));
  for (const auto& name : names) {
    SCOPED_TRACE(name);
    const ExperimentConfig c = preset(name);
    EXPECT_EQ(c.name, name);
    const ExperimentConfig again = checked(preset_text(name));
    EXPECT_EQ(again.exponents.m, c.exponents.m);
    EXPECT_EQ(again.grid.cells, c.grid.cells);
    const ValidationOutcome v = run_validation(c);
    EXPECT_TRUE(v.ok) << v.message;
    EXPECT_EQ(v.report["samples"].get<std::size_t>(), c.validation_samples);
  }
}

TEST(Presets, MassSingularHypotheses) {
  const auto c = preset("thm14_mass_singular");
  EXPECT_EQ(c.exponents.n, 2);
  EXPECT_EQ(c.exponents.m, 0.95);
  EXPECT_EQ(c.exponents.beta, std::vector<double>(static_cast<std::size_t>(c.exponents.k), 1.0));
  const auto [lo, hi] = singular_mass_range(2, false);
  EXPECT_DOUBLE_EQ(lo, 10.0 / 11.0);
  for (const auto& d : derive(c.exponents).components) {
    EXPECT_GT(d.m_i, lo);
    EXPECT_LT(d.m_i, hi);
  }
  EXPECT_EQ(c.initial.kind, "bump");
  EXPECT_EQ(c.solver.epsilon_reg, 1e-12);
  EXPECT_EQ(c.grid.cells, (std::array<int, 2>{256, 256}));
  EXPECT_EQ(c.solver.t_end, 0.05);
}

TEST(Presets, MassNondegenerateHypotheses) {
  const auto c = preset("thm12_mass_m1");
  EXPECT_EQ(c.exponents.m, 1.0);
  EXPECT_EQ(c.exponents.k, 2);
  EXPECT_EQ(c.coupler, "sum");
  EXPECT_EQ(c.drift.kind, "none");
  EXPECT_EQ(c.problem().drift.constants.C5, 0.0);
  EXPECT_EQ(c.flux.constants.c, 0.5);
  EXPECT_EQ(c.flux.constants.C3, 2.0);
  EXPECT_EQ(c.grid.cells, (std::array<int, 2>{128, 128}));
  EXPECT_EQ(c.solver.t_end, 0.1);
  EXPECT_FALSE(c.solver.clip_negative);
}

TEST(Presets, MassDegenerateAndBound) {
  const auto d = preset("thm13_mass_degenerate");
  EXPECT_EQ(d.exponents.m, 2.0);
  EXPECT_EQ(d.exponents.k, 2);
  EXPECT_GT(d.exponents.m, std::max(1.0, 2.0 - 1.0 / d.exponents.beta[0]));
  EXPECT_EQ(d.grid.cells[0], 4096);
  EXPECT_EQ(d.solver.t_end, 0.5);
  EXPECT_TRUE(d.diagnostics.clip_check);

  const auto b = preset("thm11_bound");
  EXPECT_EQ(b.exponents.k, 1);
  EXPECT_EQ(b.exponents.m, 2.0);
  EXPECT_GT(b.exponents.m, (b.exponents.n - 2.0) / b.exponents.n);
  EXPECT_EQ(b.diagnostics.K_hat_t0, (std::vector<double>{0.01, 0.02, 0.04, 0.08}));
  EXPECT_EQ(b.initial.kind, "barenblatt");
}

TEST(Presets, UnknownNameListsValidNames) {
  try {
    (void)preset("thm99");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const auto& name : preset_names()) EXPECT_NE(msg.find(name), std::string::npos) << name;
  }
}

TEST(Run, TinyPassesAndWritesArtifacts) {
  const fs::path dir = scratch("tiny");
  const RunResult r = run_text(tiny, dir, true);
  EXPECT_EQ(r.exit_code, Ok) << r.error;
  EXPECT_TRUE(r.passed());
  ASSERT_NE(r.find("mass_drift"), nullptr);
  EXPECT_EQ(r.find("mass_drift")->status, Status::Pass);
  EXPECT_LE(r.find("mass_drift")->value, thresholds::mass_drift);
  EXPECT_EQ(r.find("structure_validation")->status, Status::Pass);
  for (const char* f : {"summary.json", "summary.txt", "diagnostics.json", "validation.json", "config.ini",
                        "mass_1.csv", "mass_2.csv", "sup_U.csv", "trajectory/meta.json", "trajectory/ledger.csv"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  EXPECT_EQ(slurp(dir / "config.ini"), tiny);
  EXPECT_EQ(r.trajectory.size(), 5u);
  EXPECT_EQ(read_json(dir / "validation.json")["seed"], 3);
  EXPECT_EQ(report(dir), slurp(dir / "summary.txt"));
}

TEST(Run, ZeroDurationGivesSingleSnapshot) {
  const fs::path dir = scratch("zero");
  const RunResult r = run_text(replace(tiny, "t_end = 0.02", "t_end = 0"), dir, true);
  EXPECT_EQ(r.exit_code, Ok) << r.error;
  ASSERT_EQ(r.trajectory.size(), 1u);
  for (const char* name : {"mass_1.csv", "mass_2.csv", "sup_U.csv"}) {
    std::ifstream in(dir / name);
    int rows = 0;
    for (std::string l; std::getline(in, l);) ++rows;
    EXPECT_EQ(rows, 2) << name;
  }
  const json d = read_json(dir / "diagnostics.json");
  EXPECT_EQ(d["sup_U"]["series"]["t"].size(), 1u);
  EXPECT_EQ(d["mass"][0]["series"]["t"].size(), 1u);
}

TEST(Run, ConfigErrorExitsTwo) {
  const fs::path dir = scratch("cfg");
  const RunResult r = run_text(replace(tiny, "n = 1", "n = 2"), dir, true);
  EXPECT_EQ(r.exit_code, ConfigFailure);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_FALSE(r.error.empty());
  EXPECT_EQ(read_json(dir / "summary.json")["exit_code"], 2);
}

TEST(Run, DriftExponentAboveBoundExitsThree) {
  // m = 1, beta_* = 1, n = 1: admissible q lies in (1, 3).
  auto text = replace(tiny, "m = 2", "m = 1");
  text += "[drift]\nkind = power\ncoef = 0.5\nq = 3.1\n";
  const RunResult r = run_text(text, scratch("q"));
  EXPECT_EQ(r.exit_code, StructureFailure);
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.error.find("q = 3.1"), std::string::npos) << r.error;
  EXPECT_NE(r.error.find("admissible range (1, 3)"), std::string::npos) << r.error;
  EXPECT_TRUE(r.trajectory.empty());

  const RunResult ok = run_text(replace(text, "q = 3.1", "q = 2.9"), scratch("q_ok"));
  EXPECT_EQ(ok.exit_code, Ok) << ok.error;
}

TEST(Run, StructureFailureExitsThreeUnlessWaived) {
  const std::string text = with("[flux]\nkind = scaled\na = -1\n");
  const RunResult r = run_text(text, scratch("flip"));
  EXPECT_EQ(r.exit_code, StructureFailure);
  EXPECT_FALSE(r.error.empty());
  bool a5_fails = false;
  for (const auto& c : r.validation["conditions"])
    a5_fails = a5_fails || (c["condition"] == "A5" && c["status"] == "fail");
  EXPECT_TRUE(a5_fails) << r.validation.dump();
  const RunResult waived =
      run_text(replace(replace(text, "seed = 3", "seed = 3\nwaive_validation = true"), "t_end = 0.02", "t_end = 0"),
               scratch("flip_waived"));
  EXPECT_NE(waived.exit_code, StructureFailure) << waived.error;
  ASSERT_NE(waived.find("structure_validation"), nullptr);
  EXPECT_EQ(waived.find("structure_validation")->status, Status::Measured);
}

TEST(Run, StepBudgetExhaustionExitsFour) {
  const fs::path dir = scratch("blowup");
  const RunResult r = run_text(replace(tiny, "clip_negative = false", "clip_negative = false\nmax_steps = 10"), dir, true);
  EXPECT_EQ(r.exit_code, BlowupFailure);
  EXPECT_EQ(r.exit_code, 4);
  EXPECT_TRUE(r.trajectory.aborted);
  EXPECT_TRUE(fs::exists(dir / "trajectory" / "ledger.csv"));
  EXPECT_EQ(read_json(dir / "summary.json")["exit_code"], 4);
}

TEST(Run, FailedHypothesisMakesExitOne) {
  // Two dimensions, m = 0.5 lies below the singular mass range.
  const std::string text = R"([experiment]
name = low_m
theorems = mass_conservation_singular
validation_samples = 200
[model]
n = 2
m = 0.5
[grid]
dims = 2
cells = 8, 8
[initial]
kind = bump
[solver]
t_end = 0
)";
  const RunResult r = run_text(text, scratch("low_m"));
  EXPECT_EQ(r.exit_code, ChecksFailed) << r.error;
  ASSERT_NE(r.find("hypotheses:mass_conservation_singular"), nullptr);
  EXPECT_EQ(r.find("hypotheses:mass_conservation_singular")->status, Status::Fail);
}

TEST(Run, DeterministicBytes) {
  const std::string text = with("[diagnostics]\ntruncation = true\ntruncation_t0 = 0.005\n");
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const RunResult ra = run_text(text, a, true);
  const RunResult rb = run_text(text, b, true);
  ASSERT_EQ(ra.exit_code, Ok) << ra.error;
  ASSERT_EQ(rb.exit_code, Ok) << rb.error;
  for (const char* f : {"mass_1.csv", "mass_2.csv", "sup_U.csv", "validation.json", "trajectory/ledger.csv",
                        "trajectory/snap_0.csv", "trajectory/snap_4.csv", "trajectory/meta.json"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  auto strip_runtime = [](json j) {
    j.erase("runtime_s");
    for (auto& c : j["checks"])
      if (c["name"] == "runtime_s") c.erase("value");
    return j;
  };
  EXPECT_EQ(strip_runtime(read_json(a / "summary.json")), strip_runtime(read_json(b / "summary.json")));
}

TEST(Run, ProportionalDataStaysProportional) {
  const std::string text = R"([experiment]
name = prop
validation_samples = 200
[model]
n = 1
k = 3
m = 2
[grid]
dims = 1
lower = -1
upper = 1
cells = 128
[initial]
kind = proportional
base = bump
weights = 0.2, 0.3, 0.5
radius = 0.4
height = 1.5
[solver]
t_end = 0.05
snapshot_interval = 0.01
)";
  const RunResult r = run_text(text, scratch("prop"));
  ASSERT_EQ(r.exit_code, Ok) << r.error;
  ASSERT_NE(r.find("proportional_deviation"), nullptr);
  EXPECT_EQ(r.find("proportional_deviation")->status, Status::Pass);

  const ExperimentConfig c = checked(text);
  std::string scalar_text = replace(text, "k = 3", "k = 1");
  scalar_text = replace(scalar_text, "kind = proportional\nbase = bump\nweights = 0.2, 0.3, 0.5", "kind = bump");
  const ExperimentConfig sc = checked(scalar_text);
  const Trajectory scalar = harness::detail::simulate_config(sc, sc.grid, sc.solver);
  const Trajectory oracle = proportional_reduction(c.initial.weights, scalar);
  const CompareResult cmp = compare(r.trajectory, oracle, Norm::Linf);
  EXPECT_FALSE(cmp.nearest_in_time);
  EXPECT_LE(cmp.max, thresholds::proportional_deviation * 1.5);
}

TEST(Compare, IdenticalTrajectoriesGiveZero) {
  const RunResult r = run_text(tiny, scratch("cmp"));
  ASSERT_EQ(r.exit_code, Ok);
  for (Norm n : {Norm::L1, Norm::Linf}) {
    const CompareResult c = compare(r.trajectory, r.trajectory, n);
    EXPECT_EQ(c.max, 0.0);
    EXPECT_EQ(c.times.size(), r.trajectory.size());
    ASSERT_EQ(c.errors.size(), 2u);
    EXPECT_FALSE(c.nearest_in_time);
  }
}

TEST(Compare, NormsAndFlags) {
  const auto g = std::make_shared<const Grid>(Grid::line(0, 1, 4));
  Trajectory a, b;
  StateVector s(g, 1, 0.0), t(g, 1, 0.1);
  s[0].values = {1, 2, 3, 4};
  t[0].values = {1, 2, 3, 6};
  a.snapshots.push_back(s);
  b.snapshots.push_back(t);
  EXPECT_DOUBLE_EQ(compare(a, b, Norm::L1).max, 0.5);
  EXPECT_DOUBLE_EQ(compare(a, b, Norm::Linf).max, 2.0);
  EXPECT_TRUE(compare(a, b, Norm::L1).nearest_in_time);
  EXPECT_EQ(norm_from_string("l1"), Norm::L1);
  EXPECT_EQ(norm_from_string("linf"), Norm::Linf);
  EXPECT_THROW(norm_from_string("l2"), ConfigError);
}

TEST(Compare, IncompatibleTrajectoriesThrow) {
  Trajectory a, b, c;
  a.snapshots.emplace_back(std::make_shared<const Grid>(Grid::line(0, 1, 4)), 1);
  b.snapshots.emplace_back(std::make_shared<const Grid>(Grid::line(0, 1, 8)), 1);
  c.snapshots.emplace_back(std::make_shared<const Grid>(Grid::line(0, 1, 4)), 2);
  EXPECT_THROW(compare(a, b, Norm::L1), DomainError);
  EXPECT_THROW(compare(a, c, Norm::L1), DomainError);
  EXPECT_THROW(compare(a, Trajectory{}, Norm::L1), DomainError);
}

TEST(Compare, BarenblattRefinementRatio) {
  const std::string text = R"([experiment]
name = refine
[model]
n = 1
m = 2
[grid]
dims = 1
lower = -2
upper = 2
cells = 256
[initial]
kind = barenblatt
time = 0.05
mass = 1
[solver]
t_end = 0.2
snapshot_interval = 0.05
)";
  const ExperimentConfig c = checked(text);
  std::vector<double> err;
  for (int n : {256, 512}) {
    const GridSpec gs = c.grid.with_cells(n);
    const Trajectory tr = harness::detail::simulate_config(c, gs, c.solver);
    ASSERT_FALSE(tr.aborted);
    const Trajectory ex = barenblatt_trajectory(tr.front().grid_ptr(), c.barenblatt(), tr.times());
    err.push_back(compare(tr, ex, Norm::L1).errors[0].back());
  }
  EXPECT_GE(err[0] / err[1], 1.7) << err[0] << " " << err[1];
}

TEST(LocatePoint, NamedPoints) {
  const auto g = std::make_shared<const Grid>(Grid::line(-1, 1, 20));
  StateVector s(g, 1);
  for (std::size_t c = 0; c < g->size(); ++c) {
    const double x = g->center(c)[0];
    s[0][c] = std::max(0.0, 0.5 - std::abs(x - 0.1));
  }
  Trajectory tr;
  tr.snapshots.push_back(s);
  const Vec2 mx = locate_point(tr, 0, "max");
  const Vec2 fr = locate_point(tr, 0, "front");
  const Vec2 in = locate_point(tr, 0, "interior");
  EXPECT_NEAR(mx[0], 0.05, 1e-12);
  EXPECT_NEAR(fr[0], 0.55, 1e-12);
  EXPECT_NEAR(in[0], 0.3, 1e-12);
  EXPECT_DOUBLE_EQ(locate_point(tr, 0, "0.25")[0], 0.25);
  EXPECT_THROW(locate_point(tr, 0, "edge"), ConfigError);
}

TEST(ArtifactRoot, FollowsEnvironment) {
  ::setenv("DEGENFLOW_OUT", "/tmp/df_elsewhere", 1);
  EXPECT_EQ(artifact_root(), fs::path("/tmp/df_elsewhere"));
  ::unsetenv("DEGENFLOW_OUT");
  EXPECT_EQ(artifact_root(), fs::path("degenflow_out"));
}
