#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "degenflow/errors.hpp"
#include "degenflow/grid.hpp"
#include "degenflow/trajectory.hpp"

namespace degenflow {

namespace fs = std::filesystem;

/// 17 significant digits: enough to round-trip every double.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt(std::size_t v) { return std::to_string(v); }

namespace detail {

inline void dump_to(std::string& out, const nlohmann::json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  switch (j.type()) {
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? fmt(v) : "null";
      break;
    }
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += pad + nlohmann::json(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump_to(out, it.value(), indent, depth + 1);
      }
      out += close + '}';
      break;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        break;
      }
      // Arrays of plain numbers stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const auto& e) { return e.is_number(); });
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        if (!flat) out += pad;
        dump_to(out, j[i], indent, depth + 1);
      }
      out += (flat ? "" : close) + ']';
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// JSON text with every floating-point number at 17 significant digits.
inline std::string dump_json(const nlohmann::json& j, int indent = 2) {
  std::string out;
  detail::dump_to(out, j, indent, 0);
  return out;
}

inline void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path.string());
  out << dump_json(j) << '\n';
}

namespace detail {

inline std::string grid_header(const Grid& g, int k, double time) {
  std::string extent = "[", cells = "[", h = "[";
  for (int a = 0; a < g.dims(); ++a) {
    const auto s = static_cast<std::size_t>(a);
    if (a) extent += ",", cells += ",", h += ",";
    extent += "[" + fmt(g.lower()[s]) + "," + fmt(g.upper()[s]) + "]";
    cells += std::to_string(g.cells(a));
    h += fmt(g.h(a));
  }
  extent += "]", cells += "]", h += "]";
  return "{\"dims\":" + std::to_string(g.dims()) + ",\"extent\":" + extent + ",\"cells\":" + cells + ",\"h\":" + h +
         ",\"bc\":\"" + to_string(g.bc()) + "\",\"k\":" + std::to_string(k) + ",\"time\":" + fmt(time) + "}";
}

inline Grid grid_from_header(const nlohmann::json& j) {
  const int dims = j.at("dims").get<int>();
  const auto& ext = j.at("extent");
  const auto& cells = j.at("cells");
  const Boundary bc = boundary_from_string(j.at("bc").get<std::string>());
  if (dims == 1) return Grid::line(ext[0][0].get<double>(), ext[0][1].get<double>(), cells[0].get<int>(), bc);
  return Grid::plane({ext[0][0].get<double>(), ext[1][0].get<double>()},
                     {ext[0][1].get<double>(), ext[1][1].get<double>()}, cells[0].get<int>(), cells[1].get<int>(), bc);
}

}  // namespace detail

/// One snapshot: a single-line JSON header, then per component a
/// `# component i` line followed by one CSV row per grid row (x fastest).
inline void write_snapshot(const fs::path& path, const StateVector& s) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path.string());
  const Grid& g = s.grid();
  out << detail::grid_header(g, s.k(), s.time) << '\n';
  const int nx = g.cells(0), ny = g.cells(1);
  std::string line;
  for (int c = 0; c < s.k(); ++c) {
    out << "# component " << c + 1 << '\n';
    const auto& f = s[static_cast<std::size_t>(c)];
    for (int j = 0; j < ny; ++j) {
      line.clear();
      for (int i = 0; i < nx; ++i) {
        if (i) line += ',';
        line += fmt(f[g.index(i, j)]);
      }
      out << line << '\n';
    }
  }
}

/// Reads a snapshot; `grid` is reused when it matches the file header.
inline StateVector read_snapshot(const fs::path& path, std::shared_ptr<const Grid> grid = nullptr) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  nlohmann::json head;
  try {
    head = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(path.string() + ": bad snapshot header: " + e.what());
  }
  Grid g = detail::grid_from_header(head);
  if (!grid || !(*grid == g)) grid = std::make_shared<const Grid>(g);
  const int k = head.at("k").get<int>();
  StateVector s(grid, k, head.at("time").get<double>());
  const int nx = g.cells(0), ny = g.cells(1);
  for (int c = 0; c < k; ++c) {
    if (!std::getline(in, line) || line.rfind("# component", 0) != 0)
      throw DomainError(path.string() + ": missing component block " + std::to_string(c + 1));
    auto& f = s[static_cast<std::size_t>(c)];
    for (int j = 0; j < ny; ++j) {
      if (!std::getline(in, line)) throw DomainError(path.string() + ": truncated component block");
      const char* p = line.c_str();
      for (int i = 0; i < nx; ++i) {
        char* end = nullptr;
        f[g.index(i, j)] = std::strtod(p, &end);
        if (end == p) throw DomainError(path.string() + ": malformed value in row " + std::to_string(j));
        p = *end == ',' ? end + 1 : end;
      }
    }
  }
  return s;
}

inline void write_ledger_csv(const fs::path& path, const std::vector<LedgerRow>& ledger, int k) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path.string());
  out << "step,t,dt";
  for (int i = 1; i <= k; ++i) out << ",mass_" << i;
  out << ",clipped_mass,boundary_flux,sup_U\n";
  for (const auto& r : ledger) {
    out << r.step << ',' << fmt(r.t) << ',' << fmt(r.dt);
    for (double m : r.mass) out << ',' << fmt(m);
    out << ',' << fmt(r.clipped_mass) << ',' << fmt(r.boundary_flux) << ',' << fmt(r.sup_U) << '\n';
  }
}

/// Trajectory directory: snap_<i>.csv, meta.json and (when present)
/// ledger.csv.
inline void write_trajectory(const fs::path& dir, const Trajectory& tr, const nlohmann::json& extra = {}) {
  tr.require_nonempty("write_trajectory");
  fs::create_directories(dir);
  nlohmann::json meta = extra.is_object() ? extra : nlohmann::json::object();
  meta["source"] = tr.source;
  meta["k"] = tr.k();
  meta["count"] = tr.size();
  meta["times"] = tr.times();
  meta["steps"] = tr.steps;
  meta["aborted"] = tr.aborted;
  if (tr.aborted) meta["abort_reason"] = tr.abort_reason;
  for (std::size_t i = 0; i < tr.size(); ++i)
    write_snapshot(dir / ("snap_" + std::to_string(i) + ".csv"), tr.snapshots[i]);
  write_json(dir / "meta.json", meta);
  if (!tr.ledger.empty()) write_ledger_csv(dir / "ledger.csv", tr.ledger, tr.k());
}

inline nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(path.string() + ": " + e.what());
  }
}

/// Snapshots only; the ledger stays on disk.
inline Trajectory read_trajectory(const fs::path& dir) {
  const nlohmann::json meta = read_json(dir / "meta.json");
  Trajectory tr;
  tr.source = meta.value("source", "solver");
  tr.steps = meta.value("steps", std::size_t{0});
  tr.aborted = meta.value("aborted", false);
  tr.abort_reason = meta.value("abort_reason", "");
  const std::size_t count = meta.contains("count") ? meta["count"].get<std::size_t>() : meta.at("times").size();
  std::shared_ptr<const Grid> grid;
  for (std::size_t i = 0; i < count; ++i) {
    tr.snapshots.push_back(read_snapshot(dir / ("snap_" + std::to_string(i) + ".csv"), grid));
    grid = tr.snapshots.back().grid_ptr();
  }
  return tr;
}

}  // namespace degenflow
