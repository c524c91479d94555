#include "swarmlab/workers.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>

namespace swarmlab {

int default_workers() {
  if (const char* env = std::getenv("SWARMLAB_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1, omp_get_max_threads());
}

int resolve_workers(int workers) { return workers > 0 ? workers : default_workers(); }

}  // namespace swarmlab
