#pragma once

// Umbrella header for the dcool library: distributed range-based network
// localization via successive convex surrogates minimized by synchronous
// consensus rounds, plus the Monte Carlo experiment harness around it.

#include "dcool/csv.hpp"
#include "dcool/errors.hpp"
#include "dcool/majorizer.hpp"
#include "dcool/metrics.hpp"
#include "dcool/nesterov.hpp"
#include "dcool/node.hpp"
#include "dcool/parallel.hpp"
#include "dcool/problem.hpp"
#include "dcool/problem_json.hpp"
#include "dcool/prox.hpp"
#include "dcool/rng.hpp"
#include "dcool/scenario.hpp"
#include "dcool/simulator.hpp"
#include "dcool/vec.hpp"
