// dimred_nls: command-line front end.
//
//   dimred_nls <command> [--config FILE] [--potential FILE] [--seed N] [--out DIR]
//              [--threads N] [--dry-run] [--set key=value ...] [command flags]
//
// Every command starts from a table of defaults, merges the JSON config file
// (unknown keys are rejected), then applies flags. Outputs go to --out:
// report.json, series.csv and fields/*.bin with JSON sidecars.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dimred/dynamics.hpp"
#include "dimred/errors.hpp"
#include "dimred/gn_constant.hpp"
#include "dimred/inequality_lab.hpp"
#include "dimred/io.hpp"
#include "dimred/parallel.hpp"
#include "dimred/potentials.hpp"
#include "dimred/reduction.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace dimred;

namespace {

constexpr const char* kVersion = "1.0.0";

json reference_potential() { return to_json(PotentialSpec::separable(-1.0, kPi / 2, kPi / 4)); }

json defaults_for(const std::string& command) {
  json d = {{"seed", 0}, {"out", "dimred_out"}};
  if (command == "g0") {
    d["potential"] = reference_potential();
    d["quad_level"] = 6;
  } else if (command == "cgn") {
    d.update({{"modes", 16}, {"restarts", 4}, {"tol", 1e-8}, {"max_iterations", 4000}});
  } else if (command == "evolve2d") {
    d.update({{"g0", nullptr},
              {"potential", reference_potential()},
              {"dt", 1e-3},
              {"t_final", 1.0},
              {"grid", {32, 32}},
              {"record_every", 50},
              {"dealias", true},
              {"blowup_factor", 1e6},
              {"snapshots", false}});
  } else if (command == "evolve3d" || command == "minimize") {
    d.update({{"potential", reference_potential()},
              {"beta", 0.25},
              {"c", 0.9},
              {"L", 0.5},
              {"N", nullptr},
              {"dt", 1e-3},
              {"grid", {32, 32, 8}},
              {"dealias", true}});
    if (command == "evolve3d") {
      d.update({{"t_final", 1.0},
                {"gauge", "renormalized"},
                {"record_every", 50},
                {"blowup_factor", 1e6},
                {"snapshots", false}});
    } else {
      d.update({{"iterations", 500}, {"cgn", nullptr}});
      d["grid"] = {16, 16, 8};
    }
  } else if (command == "reduce") {
    const StudyConfig s;
    d.update({{"potential", nullptr},
              {"threshold_fraction", 0.5},
              {"beta", s.beta},
              {"c", s.c},
              {"L_values", s.L_values},
              {"t_final", s.t_final},
              {"dt", s.dt},
              {"n", s.n},
              {"nz", s.nz},
              {"retained", s.retained},
              {"checkpoints", s.checkpoints},
              {"quad_level", s.quad_level},
              {"cgn", nullptr},
              {"alpha", s.alpha},
              {"comparison_factor", nullptr},
              {"mass_tolerance", s.mass_tolerance},
              {"initial", nullptr}});
  } else if (command == "check") {
    d.update({{"suite", "all"}, {"samples", 0}, {"cgn", nullptr}, {"potential", nullptr}});
  }
  return d;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void set_key(json& cfg, const std::string& key, const json& value) {
  if (!cfg.contains(key)) throw ValidationError("unknown configuration key '" + key + "'");
  cfg[key] = value;
}

json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return text;
  }
}

// Typed accessors that turn JSON type errors into validation errors.
template <class T>
T get(const json& cfg, const std::string& key) {
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("configuration key '" + key + "' has the wrong type");
  }
}

template <class T>
std::optional<T> get_optional(const json& cfg, const std::string& key) {
  if (cfg.at(key).is_null()) return std::nullopt;
  return get<T>(cfg, key);
}

std::uint64_t get_seed(const json& cfg) {
  const json& s = cfg.at("seed");
  if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
    throw ValidationError("seed must be a non-negative integer");
  }
  return s.get<std::uint64_t>();
}

PotentialSpec get_potential(const json& cfg) {
  const PotentialSpec spec = potential_from_json(cfg.at("potential"));
  require_admissible_shape(spec);
  return spec;
}

TorusGrid get_torus(const json& cfg) {
  const auto g = get<std::vector<int>>(cfg, "grid");
  require(g.size() == 2, "grid must have two entries [n1, n2]");
  return TorusGrid(g[0], g[1]);
}

SlabGrid get_slab(const json& cfg) {
  const auto g = get<std::vector<int>>(cfg, "grid");
  require(g.size() == 3, "grid must have three entries [n1, n2, nz]");
  return SlabGrid(TorusGrid(g[0], g[1]), g[2]);
}

// Fills N from c or c from N so the resolved config carries both.
ScaledPotentialParams resolve_params(json& cfg) {
  const double beta = get<double>(cfg, "beta");
  const double L = get<double>(cfg, "L");
  require(beta > 0 && L > 0, "beta and L must be positive");
  ScaledPotentialParams p;
  p.beta = beta;
  p.L = L;
  if (const auto N = get_optional<double>(cfg, "N")) {
    p.N = *N;
  } else {
    const double c = get<double>(cfg, "c");
    require(c > 0, "c must be positive");
    p.N = L * std::pow(c / L, 1.0 / beta);
  }
  p.validate();
  cfg["N"] = p.N;
  cfg["c"] = p.c();
  return p;
}

Evolution3DConfig evolution3d(json& cfg, bool with_time) {
  Evolution3DConfig c;
  c.params = resolve_params(cfg);
  c.spec = get_potential(cfg);
  c.grid = get_slab(cfg);
  c.dt = get<double>(cfg, "dt");
  c.dealias = get<bool>(cfg, "dealias");
  if (with_time) {
    c.t_final = get<double>(cfg, "t_final");
    c.record_every = get<int>(cfg, "record_every");
    c.blowup_factor = get<double>(cfg, "blowup_factor");
    const auto gauge = get<std::string>(cfg, "gauge");
    require(gauge == "renormalized" || gauge == "lab", "gauge must be 'renormalized' or 'lab'");
    c.gauge = gauge == "lab" ? Gauge::Lab : Gauge::Renormalized;
  } else {
    c.t_final = c.dt;
  }
  c.validate();
  return c;
}

double estimate_default_cgn(std::uint64_t seed) {
  GnOptions o;
  o.seed = seed;
  const GnEstimate e = estimate_cgn(o);
  if (!e.converged) throw NumericalError("GN constant estimate did not converge");
  return e.cgn;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Run {
  std::string command;
  json config;
  fs::path out;
  bool dry_run = false;
  int exit_code = 0;
  std::string failure;

  void report(const json& result) const {
    // The output location and thread bound do not affect results, so they
    // live in metadata with the timestamp.
    json cfg = config;
    cfg.erase("out");
    json r = {{"command", command}, {"config", cfg}, {"result", result}};
    r["metadata"] = {{"timestamp", timestamp()},
                     {"threads", thread_count()},
                     {"out", out.string()},
                     {"version", kVersion}};
    write_text(out / "report.json", r.dump(2) + "\n");
  }

  void fail(const std::string& message) {
    exit_code = 2;
    failure = message;
  }
};

std::string print_number(double x) {
  std::string s = format_double(x);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void run_g0(Run& run) {
  const PotentialSpec spec = get_potential(run.config);
  const int level = get<int>(run.config, "quad_level");
  require(level >= 1 && level <= 12, "quad_level must lie in [1, 12]");
  if (run.dry_run) return;
  const CouplingEstimate g = coupling_constant_g0(spec, level);
  if (!std::isfinite(g.value)) throw NumericalError("g0: non-finite result");
  std::cout << print_number(g.value) << "\n";
  run.report({{"g0", g.value}, {"error", g.error}, {"level", g.level}, {"potential", to_json(spec)}});
}

void run_cgn(Run& run) {
  GnOptions o;
  o.modes = get<int>(run.config, "modes");
  o.restarts = get<int>(run.config, "restarts");
  o.tol = get<double>(run.config, "tol");
  o.max_iterations = get<int>(run.config, "max_iterations");
  o.seed = get_seed(run.config);
  require(o.modes >= 4 && o.modes % 2 == 0, "modes must be even and at least 4");
  require(o.restarts >= 1 && o.max_iterations >= 1 && o.tol > 0, "bad ascent options");
  if (run.dry_run) return;
  const GnEstimate e = estimate_cgn(o);
  std::cout << print_number(e.cgn) << "\n";
  run.report(to_json(e, o));
  CsvWriter csv({"restart", "running_max"});
  csv.row({double(e.best_restart), e.running_max});
  write_text(run.out / "series.csv", csv.str());
  if (!e.converged) run.fail("cgn: ascent did not reach the residual tolerance");
}

template <class Trajectory>
void write_series(const Run& run, const Trajectory& traj) {
  CsvWriter csv({"t", "mass", "energy"});
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    csv.row({traj.times[i], traj.quantities[i].mass, traj.quantities[i].energy});
  }
  write_text(run.out / "series.csv", csv.str());
}

template <class Trajectory>
void write_fields(const Run& run, const Trajectory& traj) {
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "phi_%04zu.bin", i);
    write_snapshot(run.out / "fields" / name, traj.snapshots[i], traj.times[i]);
  }
}

template <class Trajectory>
json trajectory_summary(const Trajectory& traj) {
  const auto& q0 = traj.quantities.front();
  const auto& q1 = traj.quantities.back();
  return {{"steps", traj.steps},
          {"dt_effective", traj.dt_effective},
          {"records", traj.times.size()},
          {"mass_initial", q0.mass},
          {"mass_final", q1.mass},
          {"energy_initial", q0.energy},
          {"energy_final", q1.energy},
          {"blown_up", traj.blown_up},
          {"blowup_time", traj.blowup_time}};
}

void run_evolve2d(Run& run) {
  Evolution2DConfig c;
  c.grid = get_torus(run.config);
  c.dt = get<double>(run.config, "dt");
  c.t_final = get<double>(run.config, "t_final");
  c.record_every = get<int>(run.config, "record_every");
  c.dealias = get<bool>(run.config, "dealias");
  c.blowup_factor = get<double>(run.config, "blowup_factor");
  const bool snapshots = get<bool>(run.config, "snapshots");
  if (const auto g0 = get_optional<double>(run.config, "g0")) {
    c.g0 = *g0;
  } else {
    const PotentialSpec spec = get_potential(run.config);
    if (run.dry_run) {
      c.g0 = 0.0;
    } else {
      c.g0 = coupling_constant_g0(spec).value;
      run.config["g0"] = c.g0;
    }
  }
  c.validate();
  if (run.dry_run) return;
  const Trajectory2D traj = evolve_2d(default_initial_profile(c.grid), c);
  write_series(run, traj);
  if (snapshots) write_fields(run, traj);
  run.report(trajectory_summary(traj));
  if (traj.blown_up) run.fail("evolve2d: blow-up sentinel tripped");
}

void run_evolve3d(Run& run) {
  const Evolution3DConfig c = evolution3d(run.config, true);
  const bool snapshots = get<bool>(run.config, "snapshots");
  if (run.dry_run) return;
  const ComplexField3D phi0 =
      ComplexField3D::transverse_ground(c.grid, default_initial_profile(c.grid.torus()));
  const Trajectory3D traj = evolve_3d(phi0, c);
  write_series(run, traj);
  if (snapshots) write_fields(run, traj);
  run.report(trajectory_summary(traj));
  if (traj.blown_up) run.fail("evolve3d: blow-up sentinel tripped");
}

void run_minimize(Run& run) {
  const Evolution3DConfig c = evolution3d(run.config, false);
  const int iterations = get<int>(run.config, "iterations");
  require(iterations >= 1, "iterations must be positive");
  auto cgn = get_optional<double>(run.config, "cgn");
  require(!cgn || *cgn > 0, "cgn must be positive");
  if (run.dry_run) return;
  if (!cgn) {
    cgn = estimate_default_cgn(get_seed(run.config));
    run.config["cgn"] = *cgn;
  }
  const MinimizeResult m = minimize_energy(c, iterations, cgn);
  json result = {{"e_min", m.e_min}, {"iterations", m.iterations}, {"converged", m.converged}};
  if (m.upper_bound) {
    result["upper_bound"] = *m.upper_bound;
    result["in_window"] = m.e_min >= -1e-6 && m.e_min <= *m.upper_bound + 1e-6;
  }
  std::cout << print_number(m.e_min) << "\n";
  write_snapshot(run.out / "fields" / "minimizer.bin", m.minimizer, 0.0);
  run.report(result);
  if (!m.converged) run.fail("minimize: energy descent did not converge");
}

void run_reduce(Run& run) {
  json& j = run.config;
  StudyConfig s;
  s.beta = get<double>(j, "beta");
  s.c = get<double>(j, "c");
  s.L_values = get<std::vector<double>>(j, "L_values");
  s.t_final = get<double>(j, "t_final");
  s.dt = get<double>(j, "dt");
  s.n = get<int>(j, "n");
  s.nz = get<int>(j, "nz");
  s.retained = get<int>(j, "retained");
  s.checkpoints = get<int>(j, "checkpoints");
  s.quad_level = get<int>(j, "quad_level");
  s.alpha = get<double>(j, "alpha");
  s.comparison_factor = get_optional<double>(j, "comparison_factor");
  s.mass_tolerance = get<double>(j, "mass_tolerance");
  require(j.at("initial").is_null(), "reduce: only the default initial profile is supported");
  const double fraction = get<double>(j, "threshold_fraction");
  require(fraction > 0 && fraction < 1, "threshold_fraction must lie in (0, 1)");
  scaling_ladder(s.beta, s.c, s.L_values);

  auto cgn = get_optional<double>(j, "cgn");
  require(!cgn || *cgn > 0, "cgn must be positive");
  if (run.dry_run) {
    s.cgn = cgn.value_or(1.0);
    if (!j.at("potential").is_null()) s.spec = get_potential(j);
    s.validate();
    return;
  }
  if (!cgn) {
    cgn = estimate_default_cgn(get_seed(j));
    j["cgn"] = *cgn;
  }
  s.cgn = *cgn;
  if (j.at("potential").is_null()) {
    // Reference bump scaled to the requested fraction of 2 / cgn^4.
    const PotentialSpec unit = PotentialSpec::separable(-1.0, kPi / 2, kPi / 4);
    const double norm = mixed_norm_inf1(unit).value;
    s.spec = unit.scaled(fraction * 2.0 / std::pow(s.cgn, 4) / norm);
    j["potential"] = to_json(s.spec);
  } else {
    s.spec = get_potential(j);
  }
  s.validate();
  const StudyReport r = run_convergence_study(s, default_initial_profile(TorusGrid(s.n, s.n)));
  const std::string csv = study_csv(r);
  write_text(run.out / "series.csv", csv);
  for (std::size_t i = 0; i < r.rungs.size(); ++i) {
    const RungResult& x = r.rungs[i];
    CsvWriter rung({"t", "distance", "mass3d", "energy3d", "mass2d", "energy2d"});
    for (std::size_t k = 0; k < x.times.size(); ++k) {
      rung.row({x.times[k], x.distance[k], x.mass3d[k], x.energy3d[k], x.mass2d[k], x.energy2d[k]});
    }
    write_text(run.out / ("rung_" + std::to_string(i) + ".csv"), rung.str());
  }
  run.report(to_json(r));
  std::cout << "rung  L           N             max_distance\n";
  for (const RungResult& x : r.rungs) {
    std::cout << "  " << &x - r.rungs.data() << "   " << format_double(x.regime.L) << "  "
              << format_double(x.regime.N) << "  " << format_double(x.max_distance) << "\n";
  }
  if (!r.valid) run.fail("reduce: " + r.invalid_cause);
}

void run_check(Run& run) {
  SuiteOptions o;
  const auto suite = get<std::string>(run.config, "suite");
  const auto names = suite_names();
  require(std::find(names.begin(), names.end(), suite) != names.end(),
          "unknown suite '" + suite + "'");
  const int samples = get<int>(run.config, "samples");
  require(samples >= 0, "samples must be non-negative");
  o.samples = samples;
  o.seed = get_seed(run.config);
  o.cgn = get_optional<double>(run.config, "cgn").value_or(0.0);
  require(o.cgn >= 0, "cgn must be positive");
  if (!run.config.at("potential").is_null()) o.spec = get_potential(run.config);
  if (run.dry_run) return;
  const std::vector<CheckInstance> checks = run_suite(suite, o);
  std::cout << suite_table(checks);
  const SuiteSummary s = summarize(checks);
  json result = {{"total", s.total},
                 {"passed", s.passed},
                 {"rejected", s.rejected},
                 {"min_margin", s.min_margin},
                 {"instances", to_json(checks)}};
  CsvWriter csv({"index", "seed", "margin", "passed", "rejected"});
  for (std::size_t i = 0; i < checks.size(); ++i) {
    csv.row({double(i), double(checks[i].seed), checks[i].margin, double(checks[i].passed),
             double(checks[i].rejected)});
  }
  write_text(run.out / "series.csv", csv.str());
  run.report(result);
  if (!s.all_passed()) {
    run.fail("check: " + std::to_string(s.total - s.passed - s.rejected) + " instance(s) failed");
  }
}

void emit_error(const char* kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimensional reduction of the confined Hartree proxy to 2D cubic NLS"};
  app.require_subcommand(1);

  struct Flags {
    std::optional<std::string> config, potential, out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    bool dry_run = false;
    std::vector<std::string> sets;
    std::optional<std::string> suite, grid, gauge;
    std::optional<int> samples, modes, restarts, iterations;
    std::optional<double> dt, t_final, g0, cgn, L, c, beta;
  } f;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"g0", "Effective 2D coupling constant of a potential"},
      {"cgn", "Gagliardo-Nirenberg constant by constrained ascent"},
      {"evolve2d", "2D cubic NLS evolution"},
      {"evolve3d", "Confined 3D Hartree evolution"},
      {"minimize", "Ground-state energy of the confined Hartree functional"},
      {"reduce", "3D to 2D convergence study along the scaling ladder"},
      {"check", "Randomized inequality checks"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", f.config, "JSON configuration file");
    sub->add_option("--seed", f.seed, "Random seed");
    sub->add_option("--out", f.out, "Output directory");
    sub->add_option("--threads", f.threads, "Worker thread bound")->check(CLI::PositiveNumber);
    sub->add_flag("--dry-run", f.dry_run, "Print the resolved configuration and exit");
    sub->add_option("--set", f.sets, "Override a configuration key (key=value, value as JSON)");
    if (name != "cgn") sub->add_option("--potential", f.potential, "Potential JSON file");
    if (name == "check") {
      sub->add_option("--suite", f.suite, "Suite name");
      sub->add_option("--samples", f.samples, "Sample count (0 = suite default)");
    }
    if (name == "check" || name == "minimize" || name == "reduce") {
      sub->add_option("--cgn", f.cgn, "GN constant (estimated when absent)");
    }
    if (name == "cgn") {
      sub->add_option("--modes", f.modes, "Modes per direction");
      sub->add_option("--restarts", f.restarts, "Random restarts");
    }
    if (name == "evolve2d" || name == "evolve3d" || name == "reduce") {
      sub->add_option("--dt", f.dt, "Time step");
      sub->add_option("--t-final", f.t_final, "Final time");
    }
    if (name == "evolve2d") sub->add_option("--g0", f.g0, "Coupling constant");
    if (name == "evolve2d" || name == "evolve3d" || name == "minimize") {
      sub->add_option("--grid", f.grid, "Grid sizes, comma separated");
    }
    if (name == "evolve3d" || name == "minimize") {
      sub->add_option("--L", f.L, "Confinement width");
      sub->add_option("--gauge", f.gauge, "renormalized or lab")->check(
          CLI::IsMember({"renormalized", "lab"}));
    }
    if (name == "evolve3d" || name == "minimize" || name == "reduce") {
      sub->add_option("--c", f.c, "Scaling constant c = L s");
      sub->add_option("--beta", f.beta, "Scaling exponent");
    }
    if (name == "minimize") sub->add_option("--iterations", f.iterations, "Descent iterations");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("validation", e.what());
    return 1;
  }

  Run run;
  run.command = app.get_subcommands().front()->get_name();
  try {
    json cfg = defaults_for(run.command);
    if (f.config) {
      const json file = read_json_file(*f.config);
      require(file.is_object(), "config file must hold a JSON object");
      for (const auto& [key, value] : file.items()) set_key(cfg, key, value);
    }
    if (f.potential) set_key(cfg, "potential", read_json_file(*f.potential));
    for (const std::string& s : f.sets) {
      const auto eq = s.find('=');
      require(eq != std::string::npos && eq > 0, "--set expects key=value");
      set_key(cfg, s.substr(0, eq), parse_value(s.substr(eq + 1)));
    }
    if (f.seed) cfg["seed"] = *f.seed;
    if (f.out) cfg["out"] = *f.out;
    if (f.suite) set_key(cfg, "suite", *f.suite);
    if (f.samples) set_key(cfg, "samples", *f.samples);
    if (f.modes) set_key(cfg, "modes", *f.modes);
    if (f.restarts) set_key(cfg, "restarts", *f.restarts);
    if (f.iterations) set_key(cfg, "iterations", *f.iterations);
    if (f.dt) set_key(cfg, "dt", *f.dt);
    if (f.t_final) set_key(cfg, "t_final", *f.t_final);
    if (f.g0) set_key(cfg, "g0", *f.g0);
    if (f.cgn) set_key(cfg, "cgn", *f.cgn);
    if (f.L) set_key(cfg, "L", *f.L);
    if (f.c) set_key(cfg, "c", *f.c);
    if (f.beta) set_key(cfg, "beta", *f.beta);
    if (f.gauge) set_key(cfg, "gauge", *f.gauge);
    if (f.grid) {
      json g = json::array();
      std::stringstream ss(*f.grid);
      for (std::string item; std::getline(ss, item, ',');) {
        try {
          g.push_back(std::stoi(item));
        } catch (const std::exception&) {
          throw ValidationError("--grid expects comma separated integers");
        }
      }
      set_key(cfg, "grid", g);
    }
    if (f.threads) set_thread_count(*f.threads);

    get_seed(cfg);
    run.out = get<std::string>(cfg, "out");
    run.dry_run = f.dry_run;
    run.config = std::move(cfg);

    if (run.command == "g0") run_g0(run);
    else if (run.command == "cgn") run_cgn(run);
    else if (run.command == "evolve2d") run_evolve2d(run);
    else if (run.command == "evolve3d") run_evolve3d(run);
    else if (run.command == "minimize") run_minimize(run);
    else if (run.command == "reduce") run_reduce(run);
    else run_check(run);

    if (run.dry_run) {
      std::cout << run.config.dump(2) << "\n";
      return 0;
    }
    if (run.exit_code != 0) emit_error("numerical", run.failure);
    return run.exit_code;
  } catch (const ValidationError& e) {
    emit_error("validation", e.what());
    return 1;
  } catch (const NumericalError& e) {
    emit_error("numerical", e.what());
    return 2;
  } catch (const std::exception& e) {
    emit_error("runtime", e.what());
    return 2;
  }
}
