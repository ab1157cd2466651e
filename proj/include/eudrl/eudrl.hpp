#pragma once

// Umbrella header.

#include "eudrl/command_extension.hpp"
#include "eudrl/demo.hpp"
#include "eudrl/dp.hpp"
#include "eudrl/env_spec.hpp"
#include "eudrl/io.hpp"
#include "eudrl/iteration.hpp"
#include "eudrl/mdp.hpp"
#include "eudrl/metrics.hpp"
#include "eudrl/policy.hpp"
#include "eudrl/random.hpp"
#include "eudrl/segment.hpp"
