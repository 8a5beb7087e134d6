#pragma once

// Umbrella header for the sequential-decomposition library.

#include "applications.hpp"
#include "counterexamples.hpp"
#include "decomposition.hpp"
#include "grid_decomp.hpp"
#include "limit_decomp.hpp"
#include "manifest.hpp"
#include "normal.hpp"
#include "path.hpp"
#include "payoff.hpp"
#include "rng.hpp"
#include "schedule.hpp"
#include "simulate.hpp"
