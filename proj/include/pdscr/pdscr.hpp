#pragma once

// Umbrella header for the demand-supply cooperative responding toolkit.

#include "pdscr/case_io.hpp"
#include "pdscr/complementarity.hpp"
#include "pdscr/dayahead.hpp"
#include "pdscr/exports.hpp"
#include "pdscr/grid.hpp"
#include "pdscr/intraday.hpp"
#include "pdscr/metrics.hpp"
#include "pdscr/milp.hpp"
#include "pdscr/milp_solver.hpp"
#include "pdscr/piecewise.hpp"
#include "pdscr/pipeline.hpp"
#include "pdscr/pmp.hpp"
#include "pdscr/replay.hpp"
#include "pdscr/scenarios.hpp"
#include "pdscr/simplex.hpp"
#include "pdscr/uc.hpp"
