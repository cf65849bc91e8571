#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "degenflow/errors.hpp"
#include "degenflow/grid.hpp"

namespace degenflow {

/// One row of the conservation ledger. `clipped_mass` and `boundary_flux`
/// are cumulative since the start of the run, summed over components.
struct LedgerRow {
  std::size_t step = 0;
  double t = 0.0;
  double dt = 0.0;
  std::vector<double> mass;
  double clipped_mass = 0.0;
  double boundary_flux = 0.0;
  double sup_U = 0.0;
};

/// Time-ordered snapshots plus the run ledger.
struct Trajectory {
  std::vector<StateVector> snapshots;
  std::vector<LedgerRow> ledger;
  std::string source = "solver";
  std::size_t steps = 0;
  bool aborted = false;
  std::string abort_reason;

  bool empty() const { return snapshots.empty(); }
  std::size_t size() const { return snapshots.size(); }
  const StateVector& front() const { return snapshots.front(); }
  const StateVector& back() const { return snapshots.back(); }
  const Grid& grid() const { return snapshots.front().grid(); }
  int k() const { return snapshots.front().k(); }

  std::vector<double> times() const {
    std::vector<double> t;
    t.reserve(snapshots.size());
    for (const auto& s : snapshots) t.push_back(s.time);
    return t;
  }

  void require_nonempty(const char* what) const {
    if (snapshots.empty()) throw DomainError(std::string(what) + ": empty trajectory");
  }
};

}  // namespace degenflow
