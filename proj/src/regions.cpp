#include "swarmlab/regions.hpp"

#include "swarmlab/csv.hpp"
#include "swarmlab/errors.hpp"
#include "swarmlab/rings.hpp"
#include "swarmlab/version.hpp"
#include "swarmlab/workers.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <sstream>

namespace swarmlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

double required(const std::map<std::string, double>& p, const std::string& key) {
  const auto it = p.find(key);
  if (it == p.end()) throw DomainError("missing parameter '" + key + "'");
  return it->second;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool known_param(const std::string& name) {
  static const char* names[] = {"a", "b", "n", "alpha", "speed", "gamma", "m_max"};
  for (const char* k : names)
    if (name == k) return true;
  return false;
}

}  // namespace

std::vector<double> Axis::values() const {
  if (count < 2) throw DomainError("axis '" + name + "' needs at least 2 points");
  if (!(max > min)) throw DomainError("axis '" + name + "' needs max > min");
  std::vector<double> v(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    v[static_cast<size_t>(i)] = i == count - 1 ? max : min + (max - min) * i / (count - 1);
  }
  return v;
}

Axis parse_axis(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 4) throw DomainError("axis must look like name:min:max:count (got '" + text + "')");
  Axis ax;
  ax.name = parts[0];
  if (!known_param(ax.name)) throw DomainError("unknown axis parameter '" + ax.name + "'");
  try {
    size_t pos = 0;
    ax.min = std::stod(parts[1], &pos);
    if (pos != parts[1].size()) throw std::invalid_argument(parts[1]);
    ax.max = std::stod(parts[2], &pos);
    if (pos != parts[2].size()) throw std::invalid_argument(parts[2]);
    ax.count = std::stoi(parts[3], &pos);
    if (pos != parts[3].size()) throw std::invalid_argument(parts[3]);
  } catch (const std::logic_error&) {
    throw DomainError("malformed axis '" + text + "'");
  }
  ax.values();
  return ax;
}

RegionCell evaluate_cell(ModelKind model, const std::map<std::string, double>& params) {
  RegionCell cell;
  try {
    ModelSpec spec;
    spec.kind = model;
    spec.a = required(params, "a");
    spec.b = required(params, "b");
    const double n = required(params, "n");
    if (!(n >= 3) || n != std::floor(n) || n > 1e8) throw DomainError("n must be an integer >= 3");
    spec.n = static_cast<int>(n);
    spec.alpha = param(params, "alpha", 1.0);
    spec.speed = param(params, "speed", model == ModelKind::Mill ? 0.0 : 1.0);
    spec.gamma = param(params, "gamma", 1.0);
    const int m_max = static_cast<int>(param(params, "m_max", 0.0));
    if (!(spec.b > 0.0) || !(spec.a > spec.b)) {
      throw DomainError("requires a > b > 0");
    }
    const Envelope env = mode_envelope(spec, m_max, false);
    cell.classification = env.classification;
    cell.max_real = env.worst.max_real;
    cell.critical_mode = env.critical_mode;
  } catch (const std::exception& e) {
    cell.classification = Classification::Invalid;
    cell.max_real = kNaN;
    cell.critical_mode = 0;
    cell.error = e.what();
  }
  return cell;
}

RegionMap scan(const GridSpec& spec, int workers) {
  const std::vector<double> xs = spec.x.values();
  const std::vector<double> ys = spec.y.values();
  if (!known_param(spec.x.name) || !known_param(spec.y.name)) {
    throw DomainError("unknown axis parameter");
  }
  if (spec.x.name == spec.y.name) throw DomainError("axes must name different parameters");
  if (!spec.fixed.count("n")) throw DomainError("grid needs a fixed n");
  for (const auto& [k, v] : spec.fixed) {
    if (!known_param(k)) throw DomainError("unknown fixed parameter '" + k + "'");
  }

  RegionMap map;
  map.spec = spec;
  map.timestamp = utc_timestamp();
  const int n = static_cast<int>(spec.fixed.at("n"));
  const int m_max = static_cast<int>(param(spec.fixed, "m_max", 0.0));
  map.m_max = m_max > 0 ? m_max : n / 2;

  const long long total = static_cast<long long>(xs.size()) * static_cast<long long>(ys.size());
  map.cells.resize(static_cast<size_t>(total));
  const int threads = resolve_workers(workers);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long idx = 0; idx < total; ++idx) {
    const size_t ix = static_cast<size_t>(idx) % xs.size();
    const size_t iy = static_cast<size_t>(idx) / xs.size();
    std::map<std::string, double> p = spec.fixed;
    p[spec.x.name] = xs[ix];
    p[spec.y.name] = ys[iy];
    RegionCell cell = evaluate_cell(spec.model, p);
    cell.x = xs[ix];
    cell.y = ys[iy];
    map.cells[static_cast<size_t>(idx)] = std::move(cell);
  }
  return map;
}

RegionMap scan_flock(GridSpec spec, int workers) {
  spec.model = ModelKind::Flock;
  return scan(spec, workers);
}

RegionMap scan_cs_flock(GridSpec spec, double gamma, int workers) {
  spec.model = ModelKind::FlockCS;
  spec.fixed["gamma"] = gamma;
  return scan(spec, workers);
}

RegionMap scan_mill(GridSpec spec, double speed, int workers) {
  spec.model = ModelKind::Mill;
  spec.fixed["speed"] = speed;
  return scan(spec, workers);
}

RegionMap scan_speed_b(double a, GridSpec spec, int workers) {
  spec.model = ModelKind::Mill;
  spec.fixed["a"] = a;
  return scan(spec, workers);
}

void write_region_csv(const RegionMap& map, std::ostream& out) {
  CsvWriter csv(out, {"x", "y", "classification", "max_real", "critical_mode"});
  for (const auto& c : map.cells) {
    csv.field(c.x).field(c.y).field(to_string(c.classification)).field(c.max_real).field(c.critical_mode);
    csv.end_row();
  }
}

std::string region_sidecar_json(const RegionMap& map) {
  using nlohmann::json;
  auto axis = [](const Axis& a) {
    return json{{"name", a.name}, {"min", a.min}, {"max", a.max}, {"count", a.count}};
  };
  json fixed = json::object();
  for (const auto& [k, v] : map.spec.fixed) fixed[k] = v;
  json errors = json::array();
  size_t invalid = 0;
  for (const auto& c : map.cells) {
    if (c.classification != Classification::Invalid) continue;
    ++invalid;
    if (errors.size() < 100) errors.push_back(json{{"x", c.x}, {"y", c.y}, {"error", c.error}});
  }
  json j{{"model", to_string(map.spec.model)},
         {"x_axis", axis(map.spec.x)},
         {"y_axis", axis(map.spec.y)},
         {"fixed", fixed},
         {"m_max", map.m_max},
         {"cells", map.cells.size()},
         {"invalid_cells", invalid},
         {"invalid_examples", errors},
         {"timestamp", map.timestamp},
         {"version", kVersion}};
  return j.dump(2) + "\n";
}

std::vector<SeparatrixRow> separatrix_check(const std::vector<double>& a_values, int n, int m_max,
                                            int workers) {
  if (n < 3) throw DomainError("separatrix_check: n must be >= 3");
  const int threads = resolve_workers(workers);
  std::vector<SeparatrixRow> rows;
  for (double a : a_values) {
    if (!(a > 1.0)) throw DomainError("separatrix_check: a must exceed 1");
    const double lo_b = 0.5;
    const double hi_b = a - 1e-6 * a;
    if (!(hi_b > lo_b)) throw DomainError("separatrix_check: a too small for the b window");
    auto not_unstable = [&](double b) {
      ModelSpec spec;
      spec.kind = ModelKind::Flock;
      spec.a = a;
      spec.b = b;
      spec.n = n;
      return mode_envelope(spec, m_max, false).classification != Classification::Unstable;
    };
    constexpr int kCoarse = 64;
    std::vector<double> bs(kCoarse);
    std::vector<char> st(kCoarse);
    for (int k = 0; k < kCoarse; ++k) bs[k] = lo_b + (hi_b - lo_b) * k / (kCoarse - 1);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (int k = 0; k < kCoarse; ++k) st[k] = not_unstable(bs[k]) ? 1 : 0;

    SeparatrixRow row;
    row.a = a;
    row.separatrix = a / (a - 1.0);
    int first = -1;
    for (int k = 0; k < kCoarse; ++k) {
      if (st[k]) {
        first = k;
        break;
      }
    }
    if (first < 0) {
      row.b_boundary = kNaN;
    } else if (first == 0) {
      row.b_boundary = lo_b;
    } else {
      double lo = bs[first - 1];
      double hi = bs[first];
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (not_unstable(mid)) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      row.b_boundary = 0.5 * (lo + hi);
    }
    row.gap = row.b_boundary - row.separatrix;
    rows.push_back(row);
  }
  return rows;
}

std::vector<GammaRow> gamma_sweep(double a, double b, int n, int m,
                                  const std::vector<double>& gamma_values) {
  std::vector<GammaRow> rows;
  for (double g : gamma_values) {
    GammaRow row;
    row.gamma = g;
    if (m > 0) {
      row.max_real = analyze(cs_flock_mode_matrix(a, b, n, m, g)).max_real;
    } else {
      ModelSpec spec;
      spec.kind = ModelKind::FlockCS;
      spec.a = a;
      spec.b = b;
      spec.n = n;
      spec.gamma = g;
      row.max_real = mode_envelope(spec, 0, false).worst.max_real;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace swarmlab
