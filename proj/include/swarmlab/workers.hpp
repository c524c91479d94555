#pragma once

namespace swarmlab {

/// SWARMLAB_WORKERS when set to a positive integer, otherwise the OpenMP default.
int default_workers();

/// workers > 0 is returned as is; anything else falls back to default_workers().
int resolve_workers(int workers);

}  // namespace swarmlab
