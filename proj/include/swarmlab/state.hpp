#pragma once

#include "swarmlab/potentials.hpp"

#include <vector>

namespace swarmlab {

struct SwarmState {
  double t = 0.0;
  std::vector<Vec2> positions;
  std::vector<Vec2> velocities;

  int size() const { return static_cast<int>(positions.size()); }
};

}  // namespace swarmlab
