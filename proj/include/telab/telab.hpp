#pragma once

// Umbrella header for the traffic-engineering laboratory.

#include "telab/error.hpp"
#include "telab/harness.hpp"
#include "telab/lp.hpp"
#include "telab/maxflow.hpp"
#include "telab/paths.hpp"
#include "telab/select.hpp"
#include "telab/teopt.hpp"
#include "telab/topology.hpp"
#include "telab/workload.hpp"
