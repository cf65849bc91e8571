#pragma once

#include "degenflow/errors.hpp"
#include "degenflow/vec.hpp"
#include "degenflow/model/exponents.hpp"
#include "degenflow/model/coupler.hpp"
#include "degenflow/model/laws.hpp"
#include "degenflow/model/validation.hpp"
#include "degenflow/grid.hpp"
#include "degenflow/trajectory.hpp"
#include "degenflow/solver.hpp"
#include "degenflow/io.hpp"
#include "degenflow/oracles.hpp"
#include "degenflow/diagnostics.hpp"
#include "degenflow/harness/thresholds.hpp"
#include "degenflow/harness/config.hpp"
#include "degenflow/harness/presets.hpp"
#include "degenflow/harness/run.hpp"
