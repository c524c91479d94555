#pragma once

// Stability maps over two potential/speed parameters. Cells are independent and
// evaluated in parallel; results are gathered in cell order so the map does not
// depend on the worker count.

#include "swarmlab/spectra.hpp"
#include "swarmlab/workers.hpp"

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace swarmlab {

/// Parameter axis: count points evenly spaced over [min, max] inclusive.
struct Axis {
  std::string name;  ///< a, b, speed, gamma or alpha
  double min = 0.0;
  double max = 0.0;
  int count = 2;

  std::vector<double> values() const;
};

/// "name:min:max:count".
Axis parse_axis(const std::string& text);

struct GridSpec {
  ModelKind model = ModelKind::Flock;
  Axis x;
  Axis y;
  /// n, alpha, speed, gamma, m_max and any parameter not on an axis.
  std::map<std::string, double> fixed;
};

struct RegionCell {
  double x = 0.0;
  double y = 0.0;
  Classification classification = Classification::Invalid;
  double max_real = 0.0;  ///< NaN for invalid cells
  int critical_mode = 0;
  std::string error;  ///< reason for Invalid
};

struct RegionMap {
  GridSpec spec;
  std::vector<RegionCell> cells;  ///< row-major: x varies fastest
  std::string timestamp;
  int m_max = 0;  ///< resolved mode cutoff
};

RegionMap scan(const GridSpec& spec, int workers = 0);
RegionMap scan_flock(GridSpec spec, int workers = 0);
RegionMap scan_cs_flock(GridSpec spec, double gamma, int workers = 0);
RegionMap scan_mill(GridSpec spec, double speed, int workers = 0);
/// Mill map over (speed, b) at fixed a.
RegionMap scan_speed_b(double a, GridSpec spec, int workers = 0);

/// Classification of one parameter point with the protocol used by scan.
RegionCell evaluate_cell(ModelKind model, const std::map<std::string, double>& params);

void write_region_csv(const RegionMap& map, std::ostream& out);
/// JSON sidecar: grid spec, resolved m_max, version, timestamp.
std::string region_sidecar_json(const RegionMap& map);

struct SeparatrixRow {
  double a = 0.0;
  double b_boundary = 0.0;  ///< NaN when no stable b was found
  double separatrix = 0.0;  ///< a/(a-1)
  double gap = 0.0;         ///< b_boundary - a/(a-1)
};

/// Lower edge in b of the region where no flock mode is unstable, by a 64-point scan of
/// (0.5, a) followed by 40 bisection steps.
std::vector<SeparatrixRow> separatrix_check(const std::vector<double>& a_values, int n, int m_max,
                                            int workers = 0);

struct GammaRow {
  double gamma = 0.0;
  double max_real = 0.0;
};

/// CS mode matrix max real part per gamma; m <= 0 takes the envelope over 2..N/2.
std::vector<GammaRow> gamma_sweep(double a, double b, int n, int m,
                                  const std::vector<double>& gamma_values);

}  // namespace swarmlab
