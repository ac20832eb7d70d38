#pragma once

// Behavior arbitration over a significance-weighted scene network, with a 2D
// single-track micro-simulator and scenario tooling. Umbrella header.

#include "arbsim/arbiter.hpp"
#include "arbsim/behavior.hpp"
#include "arbsim/episode.hpp"
#include "arbsim/errors.hpp"
#include "arbsim/geometry.hpp"
#include "arbsim/grid.hpp"
#include "arbsim/kinematics.hpp"
#include "arbsim/links.hpp"
#include "arbsim/outputs.hpp"
#include "arbsim/random.hpp"
#include "arbsim/scenario.hpp"
#include "arbsim/scene.hpp"
#include "arbsim/threat.hpp"
#include "arbsim/world.hpp"
