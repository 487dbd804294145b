#pragma once

// Umbrella header: the full library including the JSON-config and report
// layers.  Include individual headers instead when json.hpp is unwanted.

#include "wvx/config.hpp"
#include "wvx/energy.hpp"
#include "wvx/expr.hpp"
#include "wvx/fields.hpp"
#include "wvx/mesh.hpp"
#include "wvx/problem.hpp"
#include "wvx/report_io.hpp"
#include "wvx/sampling.hpp"
#include "wvx/solvers.hpp"
#include "wvx/spaces.hpp"
#include "wvx/verify.hpp"
