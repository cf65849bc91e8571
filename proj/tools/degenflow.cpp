#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "degenflow/degenflow.hpp"

namespace fs = std::filesystem;
using namespace degenflow;
using namespace degenflow::harness;

namespace {

int execute(const ExperimentConfig& cfg, const std::string& text) {
  const fs::path dir = artifact_root() / cfg.name;
  const RunResult r = run_experiment(cfg, dir, {true, text});
  std::cout << report(dir);
  std::cout << "artifacts: " << dir.string() << "\n";
  if (!r.error.empty()) std::cerr << "degenflow: " << r.error << "\n";
  return r.exit_code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path trajectory_dir(const fs::path& d) {
  return fs::exists(d / "trajectory" / "meta.json") ? d / "trajectory" : d;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"degenflow: coupled degenerate parabolic systems"};
  app.require_subcommand(1);

  std::string config_path, preset_name, dir_a, dir_b, norm = "l1", report_dir;
  bool emit = false;

  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("config", config_path)->required();
  auto* pre = app.add_subcommand("preset", "run a built-in preset or print its config");
  pre->add_option("name", preset_name)->required();
  pre->add_flag("--emit-config", emit, "print the preset config and exit");
  auto* val = app.add_subcommand("validate", "check config and structure conditions");
  val->add_option("config", config_path)->required();
  auto* cmp = app.add_subcommand("compare", "distance between two trajectory directories");
  cmp->add_option("dirA", dir_a)->required();
  cmp->add_option("dirB", dir_b)->required();
  cmp->add_option("--norm", norm)->check(CLI::IsMember({"l1", "linf"}));
  auto* rep = app.add_subcommand("report", "print the summary of a run directory");
  rep->add_option("dir", report_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ConfigFailure);
  }

  try {
    if (*run) {
      const std::string text = slurp(config_path);
      return execute(load_config(config_path), text);
    }
    if (*pre) {
      const std::string& text = preset_text(preset_name);
      if (emit) {
        std::cout << text;
        return 0;
      }
      return execute(preset(preset_name), text);
    }
    if (*val) {
      const ExperimentConfig cfg = load_config(config_path);
      const ValidationOutcome v = run_validation(cfg);
      json out = v.report;
      out["regime"] = to_string(classify_regime(cfg.model_exponents()).derived.regime);
      std::cout << dump_json(out) << "\n";
      if (!v.ok) {
        std::cerr << "degenflow: " << v.message << "\n";
        return StructureFailure;
      }
      return 0;
    }
    if (*cmp) {
      const CompareResult r = compare(read_trajectory(trajectory_dir(dir_a)), read_trajectory(trajectory_dir(dir_b)), norm_from_string(norm));
      std::cout << dump_json(to_json(r)) << "\n";
      return 0;
    }
    if (*rep) {
      std::cout << report(report_dir);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "degenflow: " << e.what() << "\n";
    return ConfigFailure;
  } catch (const StructureError& e) {
    std::cerr << "degenflow: " << e.what() << "\n";
    return StructureFailure;
  } catch (const NumericalBlowup& e) {
    std::cerr << "degenflow: " << e.what() << "\n";
    return BlowupFailure;
  } catch (const std::exception& e) {
    std::cerr << "degenflow: " << e.what() << "\n";
    return ConfigFailure;
  }
  return 0;
}
