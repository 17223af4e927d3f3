#pragma once

// Umbrella header: quadratic-response photon production in space-time
// varying dielectrics (squeezing spectrum, exact energy-series matrix,
// velocity diagnostics, radial constraint solver, sonoluminescence bounds).

#include "qrad/errors.hpp"
#include "qrad/estimator.hpp"
#include "qrad/gnm.hpp"
#include "qrad/output.hpp"
#include "qrad/parallel.hpp"
#include "qrad/potential.hpp"
#include "qrad/quadrature.hpp"
#include "qrad/response.hpp"
#include "qrad/scenario.hpp"
#include "qrad/transforms.hpp"
#include "qrad/velocity.hpp"
