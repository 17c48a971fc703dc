#pragma once

#include "gsp/bench.hpp"
#include "gsp/error.hpp"
#include "gsp/graph.hpp"
#include "gsp/io.hpp"
#include "gsp/pcst.hpp"
#include "gsp/projections.hpp"
#include "gsp/scan_statistics.hpp"
#include "gsp/solvers.hpp"
#include "gsp/synth.hpp"
