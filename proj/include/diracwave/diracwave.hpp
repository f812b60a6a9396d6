#pragma once

// Umbrella header.

#include "diracwave/cli.hpp"
#include "diracwave/core.hpp"
#include "diracwave/frames.hpp"
#include "diracwave/observables.hpp"
#include "diracwave/spectrum.hpp"
#include "diracwave/states.hpp"
