#pragma once

#include <string>

#include "tofsim/config.hpp"
#include "tofsim/state.hpp"
#include "tofsim/world.hpp"

namespace tofsim {

/// A fully resolved run: geometry, start pose and the configuration stack.
struct ScenarioConfig {
  std::string kind = "custom";
  World world;
  DroneState start;
  RunConfig config;
};

}  // namespace tofsim
