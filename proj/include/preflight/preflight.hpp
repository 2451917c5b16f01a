#pragma once

// Everything except the CLI layer.

#include "preflight/attitude.hpp"
#include "preflight/calibration.hpp"
#include "preflight/config.hpp"
#include "preflight/errors.hpp"
#include "preflight/model.hpp"
#include "preflight/orbit.hpp"
#include "preflight/power.hpp"
#include "preflight/structural.hpp"
#include "preflight/thermal.hpp"
#include "preflight/units.hpp"
#include "preflight/version.hpp"
#include "preflight/vibration.hpp"
