// SPDX-License-Identifier: Apache-2.0
// Umbrella header.
#pragma once

#include "cpspace/calculus.hpp"
#include "cpspace/configuration.hpp"
#include "cpspace/dual.hpp"
#include "cpspace/dynamics.hpp"
#include "cpspace/expression.hpp"
#include "cpspace/format.hpp"
#include "cpspace/quadrature.hpp"
#include "cpspace/random.hpp"
#include "cpspace/run_config.hpp"
#include "cpspace/sampler.hpp"
#include "cpspace/smooth.hpp"
#include "cpspace/space.hpp"
#include "cpspace/stats.hpp"
#include "cpspace/suite.hpp"
#include "cpspace/verify.hpp"
#include "cpspace/window.hpp"
