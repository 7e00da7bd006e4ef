#pragma once

// Umbrella header.

#include "errors.hpp"
#include "rng_haar.hpp"
#include "gaussian_state.hpp"
#include "symplectic.hpp"
#include "entropy.hpp"
#include "specfun.hpp"
#include "pagecurve.hpp"
#include "montecarlo.hpp"
