#include "swarmlab/cli.hpp"

#include "swarmlab/csv.hpp"
#include "swarmlab/errors.hpp"
#include "swarmlab/full_system.hpp"
#include "swarmlab/integrator.hpp"
#include "swarmlab/linalg.hpp"
#include "swarmlab/regions.hpp"
#include "swarmlab/rings.hpp"
#include "swarmlab/sim.hpp"
#include "swarmlab/spectra.hpp"
#include "swarmlab/version.hpp"
#include "swarmlab/workers.hpp"

#include <CLI11.hpp>
#include <Eigen/LU>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace swarmlab {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

bool is_set(double x) { return !std::isnan(x); }

std::string config_scalar(const std::string& key, const json& v) {
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  throw CLI::ConversionError("config key '" + key + "' has an unsupported value");
}

/// Flag values from a JSON object; a run manifest is read through its "resolved" member.
std::vector<std::pair<std::string, std::vector<std::string>>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw CLI::ConversionError(path + " is not valid JSON: " + e.what());
  }
  if (j.is_object() && j.contains("resolved")) j = j["resolved"];
  if (!j.is_object()) throw CLI::ConversionError(path + " must hold a JSON object");
  std::vector<std::pair<std::string, std::vector<std::string>>> items;
  for (const auto& [key, value] : j.items()) {
    std::vector<std::string> inputs;
    if (value.is_array()) {
      for (const auto& v : value) inputs.push_back(config_scalar(key, v));
    } else {
      inputs.push_back(config_scalar(key, value));
    }
    items.emplace_back(key, std::move(inputs));
  }
  return items;
}

/// Fills options not given on the command line from the config file, then
/// enforces required options.
void apply_config(CLI::App* sub, const std::string& path, const std::vector<CLI::Option*>& required) {
  if (!path.empty()) {
    for (auto& [key, inputs] : read_config(path)) {
      CLI::Option* opt = sub->get_option_no_throw("--" + key);
      if (opt == nullptr || key == "config") {
        throw CLI::ExtrasError("config key '" + key + "' is not a flag of " + sub->get_name(),
                               CLI::ExitCodes::ExtrasError);
      }
      if (opt->count() > 0) continue;
      opt->add_result(inputs);
      opt->run_callback();
    }
  }
  for (CLI::Option* opt : required) {
    if (opt->count() == 0) throw CLI::RequiredError(opt->get_name());
  }
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Manifest {
  std::string command;
  json resolved = json::object();
  json results = json::object();
  json outputs = json::array();
  std::string started = utc_now();
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
};

struct Common {
  std::string out = ".";
  std::string manifest;
  std::string config;
  std::vector<CLI::Option*> required;
};

fs::path ensure_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw DomainError("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot write '" + path.string() + "'");
  f << text;
}

void finish_manifest(Manifest& m, const Common& c, int workers) {
  const fs::path path = c.manifest.empty() ? ensure_dir(c.out) / (m.command + ".manifest.json")
                                           : fs::path(c.manifest);
  if (path.has_parent_path()) ensure_dir(path.parent_path().string());
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - m.t0).count();
  json j{{"command", m.command},
         {"version", kVersion},
         {"resolved", m.resolved},
         {"workers", workers},
         {"started", m.started},
         {"finished", utc_now()},
         {"wall_seconds", wall},
         {"outputs", m.outputs},
         {"results", m.results}};
  if (m.resolved.contains("seed")) j["seed"] = m.resolved["seed"];
  write_text(path, j.dump(2) + "\n");
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "JSON file of flag values (a run manifest also works)");
  sub->add_option("--out", c.out, "Output directory")->capture_default_str();
  sub->add_option("--manifest", c.manifest, "Manifest path (default <out>/<command>.manifest.json)");
}

struct PotentialArgs {
  double a = kUnset;
  double b = kUnset;
  std::vector<double> morse;
};

void add_potential(CLI::App* sub, PotentialArgs& p) {
  auto* oa = sub->add_option("--a", p.a, "Power-law attraction exponent");
  auto* ob = sub->add_option("--b", p.b, "Power-law repulsion exponent");
  auto* om = sub->add_option("--morse", p.morse, "Morse parameters C_A,C_R,l_A,l_R")
                 ->expected(4)
                 ->delimiter(',');
  om->excludes(oa)->excludes(ob);
}

InteractionPotential make_potential(const PotentialArgs& p) {
  if (!p.morse.empty()) {
    if (p.morse.size() != 4) throw DomainError("--morse needs four values");
    return InteractionPotential::morse(p.morse[0], p.morse[1], p.morse[2], p.morse[3]);
  }
  if (!is_set(p.a) || !is_set(p.b)) throw DomainError("potential needs --a and --b (or --morse)");
  return InteractionPotential::power_law(p.a, p.b);
}

void put_potential(json& j, const PotentialArgs& p) {
  if (!p.morse.empty()) {
    j["morse"] = p.morse;
  } else {
    j["a"] = p.a;
    j["b"] = p.b;
  }
}

std::optional<std::pair<double, double>> bracket_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  if (v.size() != 2) throw DomainError("--bracket needs two values lo,hi");
  return std::make_pair(v[0], v[1]);
}

RingSolution solve_ring(const InteractionPotential& pot, int n, double speed, bool mill,
                        const std::optional<std::pair<double, double>>& bracket) {
  RadiusProblem pr{pot, n, mill ? speed : 0.0, bracket, 1e-12};
  RingSolution ring = solve_radius(pr);
  ring.speed = speed;
  ring.kind = mill ? RingKind::Mill : RingKind::Flock;
  ring.omega = mill ? speed / ring.radius : 0.0;
  return ring;
}

// ---------------------------------------------------------------- radius

struct RadiusArgs {
  Common common;
  PotentialArgs pot;
  int n = 0;
  double speed = 0.0;
  std::vector<double> bracket;
  bool all = false;
};

int cmd_radius(const RadiusArgs& a, int workers, std::ostream& out) {
  Manifest m;
  m.command = "radius";
  put_potential(m.resolved, a.pot);
  m.resolved["n"] = a.n;
  m.resolved["speed"] = a.speed;
  if (!a.bracket.empty()) m.resolved["bracket"] = a.bracket;
  m.resolved["all"] = a.all;

  const auto pot = make_potential(a.pot);
  RadiusProblem pr{pot, a.n, a.speed, bracket_of(a.bracket), 1e-12};
  std::vector<RingSolution> rings;
  if (a.all) {
    rings = solve_radius_all(pr);
  } else {
    rings.push_back(solve_radius(pr));
  }
  json res = json::array();
  if (a.all) {
    CsvWriter csv(out, {"R", "omega", "residual"});
    for (const auto& r : rings) {
      const double resid = radius_residual(pr, r.radius);
      csv.field(r.radius).field(r.omega).field(resid);
      csv.end_row();
      res.push_back(json{{"R", r.radius}, {"omega", r.omega}, {"residual", resid}});
    }
  } else {
    const auto& r = rings.front();
    const double resid = radius_residual(pr, r.radius);
    out << "R=" << format_double(r.radius) << "\n"
        << "omega=" << format_double(r.omega) << "\n"
        << "residual=" << format_double(resid) << "\n"
        << "kind=" << (r.kind == RingKind::Mill ? "mill" : "flock") << "\n";
    res.push_back(json{{"R", r.radius}, {"omega", r.omega}, {"residual", resid}});
  }
  m.results["rings"] = res;
  m.outputs.push_back("stdout");
  finish_manifest(m, a.common, workers);
  return kExitOk;
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
  Common common;
  std::string model = "flock";
  double a = kUnset;
  double b = kUnset;
  int n = 0;
  int m = 0;
  int m_max = 0;
  double alpha = 1.0;
  double beta = kUnset;
  double gamma = 1.0;
  double speed = kUnset;
};

void spectrum_row(CsvWriter& csv, const SpectralReport& r) {
  csv.field(r.m);
  for (const auto& z : r.eigenvalues) csv.field(z.real());
  for (const auto& z : r.eigenvalues) csv.field(z.imag());
  csv.field(to_string(r.classification));
  csv.end_row();
}

int cmd_spectrum(const SpectrumArgs& a, int workers, std::ostream& out) {
  Manifest man;
  man.command = "spectrum";
  const ModelKind kind = parse_model(a.model);
  if (!is_set(a.a) || !is_set(a.b)) throw DomainError("spectrum needs --a and --b");
  if ((a.m > 0) == (a.m_max > 0)) throw DomainError("spectrum needs exactly one of --m and --m-max");
  if (is_set(a.beta) && is_set(a.speed)) throw DomainError("give --beta or --speed, not both");
  double speed = a.speed;
  if (!is_set(speed)) speed = is_set(a.beta) ? std::sqrt(a.alpha / a.beta) : 1.0;
  if (kind == ModelKind::Mill && !is_set(a.speed) && !is_set(a.beta)) {
    throw DomainError("mill spectrum needs --speed or --beta");
  }
  man.resolved = json{{"model", to_string(kind)}, {"a", a.a}, {"b", a.b}, {"n", a.n},
                      {"alpha", a.alpha}, {"gamma", a.gamma}, {"speed", speed}};
  if (a.m > 0) man.resolved["m"] = a.m;
  if (a.m_max > 0) man.resolved["m-max"] = a.m_max;

  CsvWriter csv(out, {"m", "re1", "re2", "re3", "re4", "im1", "im2", "im3", "im4", "classification"});
  if (a.m > 0) {
    ModeMatrix mat;
    switch (kind) {
      case ModelKind::Flock:
        mat = flock_mode_matrix(a.a, a.b, a.n, a.m, Propulsion{a.alpha, a.alpha / (speed * speed)});
        break;
      case ModelKind::FlockCS: mat = cs_flock_mode_matrix(a.a, a.b, a.n, a.m, a.gamma); break;
      case ModelKind::Mill: mat = mill_mode_matrix(a.a, a.b, a.n, a.m, a.alpha, speed); break;
    }
    const SpectralReport r = analyze(mat);
    spectrum_row(csv, r);
    man.results = json{{"classification", to_string(r.classification)}, {"max_real", r.max_real},
                       {"radius", mat.params.radius}};
  } else {
    ModelSpec spec{kind, a.a, a.b, a.n, a.alpha, speed, a.gamma};
    const Envelope env = mode_envelope(spec, a.m_max, true);
    for (const auto& r : env.modes) spectrum_row(csv, r);
    man.results = json{{"classification", to_string(env.classification)},
                       {"max_real", env.worst.max_real},
                       {"critical_mode", env.critical_mode},
                       {"radius", env.radius}};
  }
  man.outputs.push_back("stdout");
  finish_manifest(man, a.common, workers);
  return kExitOk;
}

// ---------------------------------------------------------------- region

struct RegionArgs {
  Common common;
  std::string model = "flock";
  std::vector<std::string> grid;
  std::vector<std::string> fixed;
  std::string name = "region";
};

int cmd_region(const RegionArgs& a, int workers, std::ostream& out) {
  Manifest man;
  man.command = "region";
  if (a.grid.size() != 2) throw DomainError("region needs exactly two --grid axes");
  GridSpec spec;
  spec.model = parse_model(a.model);
  spec.x = parse_axis(a.grid[0]);
  spec.y = parse_axis(a.grid[1]);
  for (const auto& kv : a.fixed) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw DomainError("--fixed expects key=value (got '" + kv + "')");
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    size_t pos = 0;
    double v;
    try {
      v = std::stod(val, &pos);
    } catch (const std::logic_error&) {
      throw DomainError("--fixed value for '" + key + "' is not a number");
    }
    if (pos != val.size()) throw DomainError("--fixed value for '" + key + "' is not a number");
    spec.fixed[key] = v;
  }
  man.resolved = json{{"model", a.model}, {"grid", a.grid}, {"fixed", a.fixed}, {"name", a.name}};

  const RegionMap map = scan(spec, workers);
  const fs::path dir = ensure_dir(a.common.out);
  std::ostringstream csv;
  write_region_csv(map, csv);
  write_text(dir / (a.name + ".csv"), csv.str());
  write_text(dir / (a.name + ".json"), region_sidecar_json(map));
  man.outputs.push_back((dir / (a.name + ".csv")).string());
  man.outputs.push_back((dir / (a.name + ".json")).string());
  std::map<std::string, int> counts;
  for (const auto& c : map.cells) ++counts[to_string(c.classification)];
  man.results["counts"] = counts;
  man.results["m_max"] = map.m_max;
  out << "wrote " << (dir / (a.name + ".csv")).string() << " (" << map.cells.size() << " cells)\n";
  finish_manifest(man, a.common, workers);
  return kExitOk;
}

// ---------------------------------------------------------------- separatrix

struct SeparatrixArgs {
  Common common;
  std::vector<double> a_list;
  int n = 1000;
  int m_max = 0;
};

int cmd_separatrix(const SeparatrixArgs& a, int workers, std::ostream& out) {
  Manifest man;
  man.command = "separatrix";
  man.resolved = json{{"a-list", a.a_list}, {"n", a.n}, {"m-max", a.m_max}};
  const auto rows = separatrix_check(a.a_list, a.n, a.m_max, workers);
  CsvWriter csv(out, {"a", "b_boundary", "a_over_a_minus_1", "gap"});
  json res = json::array();
  for (const auto& r : rows) {
    csv.field(r.a).field(r.b_boundary).field(r.separatrix).field(r.gap);
    csv.end_row();
    res.push_back(json{{"a", r.a}, {"b_boundary", r.b_boundary}, {"gap", r.gap}});
  }
  man.results["rows"] = res;
  man.outputs.push_back("stdout");
  finish_manifest(man, a.common, workers);
  return kExitOk;
}

// ---------------------------------------------------------------- gamma-sweep

struct GammaArgs {
  Common common;
  double a = kUnset;
  double b = kUnset;
  int n = 1000;
  int m = 0;
  std::vector<double> gammas{0.5, 1.0, 2.0};
};

int cmd_gamma_sweep(const GammaArgs& a, int workers, std::ostream& out) {
  Manifest man;
  man.command = "gamma-sweep";
  if (!is_set(a.a) || !is_set(a.b)) throw DomainError("gamma-sweep needs --a and --b");
  man.resolved = json{{"a", a.a}, {"b", a.b}, {"n", a.n}, {"m", a.m}, {"gammas", a.gammas}};
  const auto rows = gamma_sweep(a.a, a.b, a.n, a.m, a.gammas);
  CsvWriter csv(out, {"gamma", "max_re"});
  for (const auto& r : rows) {
    csv.field(r.gamma).field(r.max_real);
    csv.end_row();
  }
  man.outputs.push_back("stdout");
  finish_manifest(man, a.common, workers);
  return kExitOk;
}

// ---------------------------------------------------------------- simulate / bifurcate

struct SimArgs {
  Common common;
  std::string model = "propulsion";
  PotentialArgs pot;
  double alpha = 1.0;
  double beta = kUnset;
  double speed = kUnset;
  double gamma = 1.0;
  int n = 0;
  double t_final = 100.0;
  double rtol = 1e-6;
  double atol = 1e-9;
  std::uint64_t seed = 0;
  double sample_every = 1.0;
  double guard = 0.0;
  std::string ic = "flock";
  int orientation = 1;
  int perturb_m = 0;
  double xi_plus = 0.0;
  double xi_minus = 0.0;
  double sigma_pos = 0.0;
  double sigma_vel = 0.0;
  std::vector<double> bracket;
  bool trajectory = false;
  // bifurcate only
  std::string param = "b";
  std::vector<double> values;
  std::string metric = "cluster";
};

void add_sim_options(CLI::App* sub, SimArgs& s) {
  sub->add_option("--model", s.model, "propulsion or cs")
      ->check(CLI::IsMember({"propulsion", "cs"}))
      ->capture_default_str();
  add_potential(sub, s.pot);
  sub->add_option("--alpha", s.alpha, "Self-propulsion coefficient")->capture_default_str();
  sub->add_option("--beta", s.beta, "Friction coefficient");
  sub->add_option("--speed", s.speed, "Asymptotic speed (sets beta = alpha/speed^2)");
  sub->add_option("--gamma", s.gamma, "Alignment decay exponent (cs model)")->capture_default_str();
  s.common.required.push_back(sub->add_option("--n", s.n, "Particle count"));
  sub->add_option("--t-final", s.t_final, "Final time")->capture_default_str();
  sub->add_option("--rtol", s.rtol, "Relative tolerance")->capture_default_str();
  sub->add_option("--atol", s.atol, "Absolute tolerance")->capture_default_str();
  sub->add_option("--seed", s.seed, "Random seed")->capture_default_str();
  sub->add_option("--sample-every", s.sample_every, "Metric sampling interval (0: endpoints)")
      ->capture_default_str();
  sub->add_option("--guard", s.guard, "Minimum pair distance (0: 1e-9 R)")->capture_default_str();
  sub->add_option("--ic", s.ic, "Initial ring: flock or mill")
      ->check(CLI::IsMember({"flock", "mill"}))
      ->capture_default_str();
  sub->add_option("--orientation", s.orientation, "Mill rotation sense (+1/-1)")->capture_default_str();
  sub->add_option("--perturb-m", s.perturb_m, "Mode of the ring perturbation (0: none)");
  sub->add_option("--xi-plus", s.xi_plus, "Mode amplitude xi+");
  sub->add_option("--xi-minus", s.xi_minus, "Mode amplitude xi-");
  sub->add_option("--sigma-pos", s.sigma_pos, "Position noise");
  sub->add_option("--sigma-vel", s.sigma_vel, "Velocity noise");
  sub->add_option("--bracket", s.bracket, "Radius bracket lo,hi (Morse)")->expected(2)->delimiter(',');
}

struct ResolvedSim {
  SimConfig config;
  double ring_speed = 1.0;
  PerturbationSpec perturbation;
  json resolved;
};

ResolvedSim resolve_sim(const SimArgs& s) {
  ResolvedSim r;
  SimConfig& c = r.config;
  c.model = s.model == "cs" ? SimModel::CuckerSmale : SimModel::Propulsion;
  c.potential = make_potential(s.pot);
  c.n = s.n;
  c.t_final = s.t_final;
  c.rtol = s.rtol;
  c.atol = s.atol;
  c.seed = s.seed;
  c.sample_every = s.sample_every;
  c.min_distance_guard = s.guard;
  c.keep_trajectory = s.trajectory;
  r.resolved = json::object();
  r.resolved["model"] = s.model;
  put_potential(r.resolved, s.pot);
  if (c.model == SimModel::Propulsion) {
    if (is_set(s.beta) && is_set(s.speed)) throw DomainError("give --beta or --speed, not both");
    const double beta = is_set(s.speed) ? s.alpha / (s.speed * s.speed) : (is_set(s.beta) ? s.beta : s.alpha);
    if (is_set(s.speed) && !(s.speed > 0.0)) throw DomainError("--speed must be positive");
    c.propulsion = Propulsion::make(s.alpha, beta);
    r.ring_speed = c.propulsion.asymptotic_speed();
    r.resolved["alpha"] = s.alpha;
    r.resolved["beta"] = beta;
  } else {
    c.alignment = AlignmentKernel::make(s.gamma);
    r.ring_speed = is_set(s.speed) ? s.speed : 1.0;
    if (!(r.ring_speed >= 0.0)) throw DomainError("--speed must be non-negative");
    r.resolved["gamma"] = s.gamma;
    r.resolved["speed"] = r.ring_speed;
  }
  validate(c);
  const bool mode = s.perturb_m != 0;
  const bool noise = s.sigma_pos != 0.0 || s.sigma_vel != 0.0;
  if (mode && noise) throw DomainError("choose a mode perturbation or noise, not both");
  if (mode) {
    r.perturbation = ModePerturbation{s.perturb_m, s.xi_plus, s.xi_minus};
  } else if (noise) {
    r.perturbation = RandomNoise{s.sigma_pos, s.sigma_vel};
  }
  if (s.ic == "mill" && s.orientation != 1 && s.orientation != -1) {
    throw DomainError("--orientation must be +1 or -1");
  }
  r.resolved.update(json{{"n", s.n},
                         {"t-final", s.t_final},
                         {"rtol", s.rtol},
                         {"atol", s.atol},
                         {"seed", s.seed},
                         {"sample-every", s.sample_every},
                         {"guard", s.guard},
                         {"ic", s.ic},
                         {"orientation", s.orientation},
                         {"perturb-m", s.perturb_m},
                         {"xi-plus", s.xi_plus},
                         {"xi-minus", s.xi_minus},
                         {"sigma-pos", s.sigma_pos},
                         {"sigma-vel", s.sigma_vel}});
  if (!s.bracket.empty()) r.resolved["bracket"] = s.bracket;
  return r;
}

void write_metrics(std::ostream& o, const std::vector<MetricRecord>& ms) {
  CsvWriter csv(o, {"t", "mu_rel", "eta_rel", "speed_dev", "polarization", "angular_momentum"});
  for (const auto& m : ms) {
    csv.field(m.t).field(m.mu_rel).field(m.eta_rel).field(m.speed_dev).field(m.polarization).field(
        m.angular_momentum);
    csv.end_row();
  }
}

json metrics_json(const MetricRecord& m) {
  return json{{"t", m.t},
              {"mu_rel", m.mu_rel},
              {"eta_rel", m.eta_rel},
              {"speed_dev", m.speed_dev},
              {"polarization", m.polarization},
              {"angular_momentum", m.angular_momentum}};
}

int cmd_simulate(const SimArgs& s, int workers, std::ostream& out) {
  Manifest man;
  man.command = "simulate";
  ResolvedSim r = resolve_sim(s);
  r.config.workers = workers;
  man.resolved = r.resolved;
  man.resolved["trajectory"] = s.trajectory;

  const bool mill = s.ic == "mill";
  const RingSolution ring = solve_ring(r.config.potential, s.n, r.ring_speed, mill, bracket_of(s.bracket));
  const SwarmState ic = mill ? ic_mill_ring(ring, s.orientation, r.perturbation, s.seed)
                             : ic_flock_ring(ring, Vec2(1.0, 0.0), r.perturbation, s.seed);
  const SimResult res = integrate(r.config, ic, MetricReference{ring.radius, r.ring_speed});

  const fs::path dir = ensure_dir(s.common.out);
  {
    std::ostringstream o;
    write_metrics(o, res.metrics);
    write_text(dir / "metrics.csv", o.str());
    man.outputs.push_back((dir / "metrics.csv").string());
  }
  if (s.trajectory) {
    std::ostringstream o;
    CsvWriter csv(o, {"t", "j", "x", "y", "vx", "vy"});
    for (const auto& st : res.trajectory) {
      for (int j = 0; j < st.size(); ++j) {
        csv.field(st.t).field(j).field(st.positions[j].x()).field(st.positions[j].y());
        csv.field(st.velocities[j].x()).field(st.velocities[j].y());
        csv.end_row();
      }
    }
    write_text(dir / "trajectory.csv", o.str());
    man.outputs.push_back((dir / "trajectory.csv").string());
  }
  man.results = json{{"radius", ring.radius},
                     {"final", metrics_json(res.metrics.back())},
                     {"accepted_steps", res.stats.accepted},
                     {"rejected_steps", res.stats.rejected},
                     {"rhs_evaluations", res.stats.evaluations},
                     {"guard", res.guard}};
  const auto& f = res.metrics.back();
  out << "t=" << format_double(f.t) << " mu_rel=" << format_double(f.mu_rel)
      << " eta_rel=" << format_double(f.eta_rel) << " polarization=" << format_double(f.polarization)
      << " angular_momentum=" << format_double(f.angular_momentum) << "\n";
  finish_manifest(man, s.common, workers);
  return kExitOk;
}

int cmd_bifurcate(const SimArgs& args, int workers, std::ostream& out) {
  Manifest man;
  man.command = "bifurcate";
  if (args.values.empty()) throw DomainError("bifurcate needs --values");
  SimArgs s = args;
  if (s.param == "b" && s.pot.morse.empty() && !is_set(s.pot.b)) s.pot.b = s.values.front();
  ResolvedSim r = resolve_sim(s);
  if (s.param == "b") r.resolved.erase("b");
  if (!s.bracket.empty()) throw DomainError("bifurcate supports power-law potentials only");
  man.resolved = r.resolved;
  man.resolved["param"] = s.param;
  man.resolved["values"] = s.values;
  man.resolved["metric"] = s.metric;

  SweepSpec spec;
  spec.base = r.config;
  spec.parameter = s.param == "speed" ? SweepParameter::Speed : SweepParameter::B;
  spec.values = s.values;
  spec.ic = s.ic == "mill" ? IcKind::Mill : IcKind::Flock;
  spec.perturbation = r.perturbation;
  spec.metric = s.metric == "fatten" ? SweepMetric::Fatten : SweepMetric::Cluster;
  spec.speed = r.ring_speed;
  spec.orientation = s.orientation;
  if (spec.parameter == SweepParameter::B && !r.config.potential.is_power_law()) {
    throw DomainError("sweeping b needs a power-law potential");
  }
  const auto rows = bifurcation_sweep(spec, workers);

  const fs::path dir = ensure_dir(s.common.out);
  std::ostringstream o;
  CsvWriter csv(o, {"value", "seed", "radius", "metric", "mu_rel", "eta_rel", "speed_dev",
                    "polarization", "angular_momentum"});
  for (const auto& row : rows) {
    const auto& m = row.final_metrics;
    csv.field(row.value).field(static_cast<long long>(row.seed)).field(row.radius).field(row.metric);
    csv.field(m.mu_rel).field(m.eta_rel).field(m.speed_dev).field(m.polarization).field(m.angular_momentum);
    csv.end_row();
  }
  write_text(dir / "bifurcation.csv", o.str());
  out << o.str();
  man.outputs.push_back((dir / "bifurcation.csv").string());
  man.results["runs"] = rows.size();
  finish_manifest(man, s.common, workers);
  return kExitOk;
}

// ---------------------------------------------------------------- validate

struct Check {
  std::string name;
  std::function<std::string()> run;  // empty string = pass, otherwise failure detail
};

std::string expect_close(double got, double want, double tol, const std::string& what) {
  if (std::abs(got - want) <= tol) return {};
  std::ostringstream os;
  os << what << ": got " << format_double(got) << ", expected " << format_double(want);
  return os.str();
}

std::vector<Check> validation_checks() {
  std::vector<Check> checks;
  checks.push_back({"trig_moment_sin2", [] {
                      for (int n = 3; n <= 64; ++n) {
                        auto e = expect_close(trig_moment(n, 2.0), 0.5, 1e-15, "n=" + std::to_string(n));
                        if (!e.empty()) return e;
                      }
                      return expect_close(trig_moment(4, 4.0), 0.375, 1e-15, "S_4(4)");
                    }});
  checks.push_back({"radius_4_2", [] {
                      for (int n : {5, 100, 1000}) {
                        auto r = flock_ring(InteractionPotential::power_law(4, 2), n, 0.0).radius;
                        auto e = expect_close(r, 1.0 / std::sqrt(3.0), 1e-10, "n=" + std::to_string(n));
                        if (!e.empty()) return e;
                      }
                      return std::string();
                    }});
  checks.push_back({"m1_zero_modes", [] {
                      for (auto [a, b] : {std::pair{4.0, 2.0}, {3.0, 2.5}, {5.0, 0.5}, {7.0, 1.5}}) {
                        const auto f = analyze(flock_mode_matrix(a, b, 50, 1, Propulsion{1.0, 1.0}));
                        const auto c = analyze(cs_flock_mode_matrix(a, b, 50, 1, 1.0));
                        for (const auto* r : {&f, &c}) {
                          double mn = std::numeric_limits<double>::infinity();
                          for (auto z : r->eigenvalues) mn = std::min(mn, std::abs(z));
                          if (!(mn < 1e-8)) return "no zero eigenvalue at a=" + format_double(a);
                        }
                      }
                      return std::string();
                    }});
  checks.push_back({"shape_matrix_hand_values", [] {
                      const auto sm = shape_matrix(4, 2, 4, 2, 0.0);
                      const auto [d, t] = det_trace(sm);
                      auto e = expect_close(d, 8.0 / 9.0, 1e-12, "det");
                      return e.empty() ? expect_close(t, -2.0, 1e-12, "trace") : e;
                    }});
  checks.push_back({"theorem_witness_n8", [] {
                      for (auto [a, b] : {std::pair{4.0, 2.0}, {3.0, 2.5}, {5.0, 0.5}}) {
                        if (!theorem_witness(a, b, 8, Propulsion{1.0, 1.0}).agree ||
                            !theorem_witness(a, b, 8, AlignmentKernel{1.0}).agree) {
                          return "disagreement at a=" + format_double(a) + " b=" + format_double(b);
                        }
                      }
                      return std::string();
                    }});
  checks.push_back({"eig4_residuals", [] {
                      std::mt19937_64 rng(7);
                      std::normal_distribution<double> nd;
                      for (int k = 0; k < 50; ++k) {
                        Matrix4c m;
                        for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = Complex(nd(rng), nd(rng));
                        const auto ev = eig4(m);
                        const double nrm = max_norm(m);
                        Complex tr = 0.0, det = 1.0;
                        for (auto z : ev) {
                          if (min_singular_value_shifted(m, z) > 1e-9 * nrm) return std::string("residual too large");
                          tr += z;
                          det *= z;
                        }
                        if (std::abs(tr - m.trace()) > 1e-9 * std::max(1.0, std::abs(m.trace()))) return std::string("trace mismatch");
                        const Complex d = m.determinant();
                        if (std::abs(det - d) > 1e-9 * std::max(1.0, std::abs(d))) return std::string("determinant mismatch");
                      }
                      return std::string();
                    }});
  checks.push_back({"integrator_logistic", [] {
                      Eigen::VectorXd y(1);
                      y[0] = 0.25;
                      OdeRhs f = [](double, const Eigen::VectorXd& s, Eigen::VectorXd& ds) {
                        ds.resize(1);
                        ds[0] = 2.0 * s[0] * (1.0 - s[0]);
                      };
                      integrate_dp5(f, 0.0, y, 2.0, {}, [](double, const Eigen::VectorXd&) {});
                      const double e2 = std::exp(4.0);
                      const double exact = 0.25 * e2 / (1.0 - 0.25 + 0.25 * e2);
                      return expect_close(y[0], exact, 1e-6, "s(2)");
                    }});
  return checks;
}

int cmd_validate(const Common& common, int workers, std::ostream& out) {
  Manifest man;
  man.command = "validate";
  CsvWriter csv(out, {"check", "status", "detail"});
  bool ok = true;
  json res = json::object();
  for (const auto& c : validation_checks()) {
    std::string detail;
    try {
      detail = c.run();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    for (auto& ch : detail)
      if (ch == ',' || ch == '\n') ch = ';';
    const bool pass = detail.empty();
    ok = ok && pass;
    csv.field(c.name).field(pass ? "pass" : "fail").field(detail);
    csv.end_row();
    res[c.name] = pass ? "pass" : "fail";
  }
  man.results = res;
  man.outputs.push_back("stdout");
  finish_manifest(man, common, workers);
  return ok ? kExitOk : kExitValidation;
}

void report(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Flock and mill ring laboratory for second-order swarming models", "swarmlab"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  int workers = 0;
  app.add_option("--workers", workers, "Worker threads (default: SWARMLAB_WORKERS or all cores)");

  RadiusArgs radius;
  auto* s_radius = app.add_subcommand("radius", "Ring radius for a potential");
  add_common(s_radius, radius.common);
  add_potential(s_radius, radius.pot);
  radius.common.required.push_back(s_radius->add_option("--n", radius.n, "Particle count"));
  s_radius->add_option("--speed", radius.speed, "Mill speed (0 for a flock)")->capture_default_str();
  s_radius->add_option("--bracket", radius.bracket, "Search interval lo,hi")->expected(2)->delimiter(',');
  s_radius->add_flag("--all", radius.all, "List every root in the bracket");

  SpectrumArgs spectrum;
  auto* s_spec = app.add_subcommand("spectrum", "Eigenvalues of the reduced mode matrices");
  add_common(s_spec, spectrum.common);
  s_spec->add_option("--model", spectrum.model, "flock, flock-cs or mill")->capture_default_str();
  spectrum.common.required.push_back(s_spec->add_option("--a", spectrum.a, "Attraction exponent"));
  spectrum.common.required.push_back(s_spec->add_option("--b", spectrum.b, "Repulsion exponent"));
  spectrum.common.required.push_back(s_spec->add_option("--n", spectrum.n, "Particle count"));
  s_spec->add_option("--m", spectrum.m, "Single mode");
  s_spec->add_option("--m-max", spectrum.m_max, "Modes 2..m-max");
  s_spec->add_option("--alpha", spectrum.alpha, "Self-propulsion coefficient")->capture_default_str();
  s_spec->add_option("--beta", spectrum.beta, "Friction coefficient");
  s_spec->add_option("--gamma", spectrum.gamma, "Alignment exponent")->capture_default_str();
  s_spec->add_option("--speed", spectrum.speed, "Asymptotic speed");

  RegionArgs region;
  auto* s_region = app.add_subcommand("region", "Stability map over two parameters");
  add_common(s_region, region.common);
  s_region->add_option("--model", region.model, "flock, flock-cs or mill")->capture_default_str();
  region.common.required.push_back(s_region->add_option("--grid", region.grid, "Axis name:min:max:count (twice)"));
  s_region->add_option("--fixed", region.fixed, "Fixed parameter key=value");
  s_region->add_option("--name", region.name, "Output file stem")->capture_default_str();

  SeparatrixArgs sep;
  auto* s_sep = app.add_subcommand("separatrix", "Lower stability boundary in b versus a/(a-1)");
  add_common(s_sep, sep.common);
  sep.common.required.push_back(s_sep->add_option("--a-list", sep.a_list, "Values of a")->delimiter(','));
  s_sep->add_option("--n", sep.n, "Particle count")->capture_default_str();
  s_sep->add_option("--m-max", sep.m_max, "Largest mode (default N/2)");

  GammaArgs gam;
  auto* s_gam = app.add_subcommand("gamma-sweep", "Cucker-Smale growth rate versus gamma");
  add_common(s_gam, gam.common);
  gam.common.required.push_back(s_gam->add_option("--a", gam.a, "Attraction exponent"));
  gam.common.required.push_back(s_gam->add_option("--b", gam.b, "Repulsion exponent"));
  s_gam->add_option("--n", gam.n, "Particle count")->capture_default_str();
  s_gam->add_option("--m", gam.m, "Mode (0: envelope over 2..N/2)")->capture_default_str();
  s_gam->add_option("--gammas", gam.gammas, "Values of gamma")->delimiter(',');

  SimArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "Particle simulation from a ring initial condition");
  add_common(s_sim, sim.common);
  add_sim_options(s_sim, sim);
  s_sim->add_flag("--trajectory", sim.trajectory, "Also write trajectory.csv");

  SimArgs bif;
  auto* s_bif = app.add_subcommand("bifurcate", "Independent runs over a swept parameter");
  add_common(s_bif, bif.common);
  add_sim_options(s_bif, bif);
  s_bif->add_option("--param", bif.param, "b or speed")
      ->check(CLI::IsMember({"b", "speed"}))
      ->capture_default_str();
  bif.common.required.push_back(s_bif->add_option("--values", bif.values, "Parameter values")->delimiter(','));
  s_bif->add_option("--metric", bif.metric, "cluster or fatten")
      ->check(CLI::IsMember({"cluster", "fatten"}))
      ->capture_default_str();

  Common val;
  auto* s_val = app.add_subcommand("validate", "Fast invariant checks");
  add_common(s_val, val);

  try {
    app.parse(argc, argv);
    const std::pair<CLI::App*, Common*> subs[] = {
        {s_radius, &radius.common}, {s_spec, &spectrum.common}, {s_region, &region.common},
        {s_sep, &sep.common},       {s_gam, &gam.common},       {s_sim, &sim.common},
        {s_bif, &bif.common},       {s_val, &val}};
    for (auto [sub, common] : subs) {
      if (sub->parsed()) apply_config(sub, common->config, common->required);
    }
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report(err, "usage", e.what());
    return kExitUsage;
  }
  if (workers < 0) {
    report(err, "usage", "--workers must be non-negative");
    return kExitUsage;
  }
  const int w = resolve_workers(workers);

  try {
    if (s_radius->parsed()) return cmd_radius(radius, w, out);
    if (s_spec->parsed()) return cmd_spectrum(spectrum, w, out);
    if (s_region->parsed()) return cmd_region(region, w, out);
    if (s_sep->parsed()) return cmd_separatrix(sep, w, out);
    if (s_gam->parsed()) return cmd_gamma_sweep(gam, w, out);
    if (s_sim->parsed()) return cmd_simulate(sim, w, out);
    if (s_bif->parsed()) return cmd_bifurcate(bif, w, out);
    if (s_val->parsed()) return cmd_validate(val, w, out);
  } catch (const DomainError& e) {
    report(err, "domain", e.what());
    return kExitUsage;
  } catch (const NumericalError& e) {
    report(err, "numerical", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    report(err, "numerical", e.what());
    return kExitNumerical;
  }
  report(err, "usage", "no subcommand given");
  return kExitUsage;
}

}  // namespace swarmlab
