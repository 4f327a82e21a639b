#pragma once

// Umbrella header for the steering-certified key distribution toolkit.

#include "steerkd/quantum.hpp"
#include "steerkd/steering.hpp"
#include "steerkd/keyrates.hpp"
#include "steerkd/noise.hpp"
#include "steerkd/thresholds.hpp"
#include "steerkd/simulator.hpp"
#include "steerkd/oracle.hpp"
#include "steerkd/csv.hpp"
