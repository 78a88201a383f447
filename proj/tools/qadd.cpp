// qadd: quantum annealing of QUBO problems under local-field noise, with
// dynamical-decoupling pulse sequences. Subcommands wire the problem
// builders, noise generators, propagator and analysis into reproducible,
// seeded experiments. Diagnostics go to stderr; data goes to files or stdout.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "qadd/analysis.hpp"
#include "qadd/dynamics.hpp"
#include "qadd/ising.hpp"
#include "qadd/magic.hpp"
#include "qadd/noise.hpp"
#include "qadd/problems.hpp"
#include "qadd/rng.hpp"

namespace {

using nlohmann::json;
using namespace qadd;

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

bool is_preset(const std::string& name) {
  const auto names = fixture_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

IsingModel resolve_problem(const std::string& problem) {
  if (is_preset(problem)) return preset_model(problem);
  if (std::filesystem::exists(problem)) return load_model(problem);
  throw std::runtime_error("unknown problem or missing model file: " + problem);
}

struct AnnealDefaults {
  double hx = 3.0, duration = 2.6, j_hz = 26.0;
};

AnnealDefaults defaults_for(const std::string& problem) {
  if (is_preset(problem)) {
    const FixtureMeta meta = fixture_meta(problem);
    return {meta.driver_strength, meta.duration, meta.j_hz};
  }
  return {};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

NoiseSpectrum spectrum_from_args(const std::string& kind, double gamma,
                                 double center, double amplitude) {
  if (kind == "none") return static_spectrum(0.0);
  if (kind == "static") return static_spectrum(amplitude);
  if (kind == "two-peak") return lorentzian_spectrum(true, gamma, amplitude);
  if (kind == "single") return lorentzian_spectrum(false, gamma, amplitude, center);
  throw std::runtime_error("unknown noise kind: " + kind);
}

// ---- build ---------------------------------------------------------------

int cmd_build(const std::string& target, int frames, double lambda_override,
              int bar_length, const std::vector<int>& pieces,
              const std::vector<int>& demands, int bars, bool no_ancilla,
              const std::string& out_path) {
  const bool ancilla = !no_ancilla;
  json provenance;
  IsingModel model;
  if (target == "mot") {
    MotSpec spec = mot5_spec();
    spec.free_frames = frames;
    if (lambda_override >= 0) spec.penalty = lambda_override;
    model = encode_qubo(build_mot(spec), ancilla);
    provenance["spec"] = json::parse(mot_spec_to_json(spec));
  } else if (target == "cutstock") {
    CutStockSpec spec;
    spec.bar_length = bar_length;
    spec.piece_lengths = pieces;
    spec.demands = demands.empty() ? std::vector<int>(pieces.size(), 1) : demands;
    spec.n_bars = bars;
    if (lambda_override >= 0) spec.penalty = lambda_override;
    model = encode_qubo(build_cutting_stock(spec), ancilla);
    provenance["spec"] = json::parse(cutstock_spec_to_json(spec));
  } else if (target == "mot5" || target == "mot9") {
    const MotSpec spec = target == "mot5" ? mot5_spec() : mot9_spec();
    model = ancilla ? preset_model(target) : encode_qubo(build_mot(spec), false);
    provenance["spec"] = json::parse(mot_spec_to_json(spec));
  } else if (target == "cut5" || target == "cut6") {
    const CutStockSpec spec = target == "cut5" ? cut5_spec() : cut6_spec();
    model = ancilla ? preset_model(target)
                    : encode_qubo(build_cutting_stock(spec), false);
    provenance["spec"] = json::parse(cutstock_spec_to_json(spec));
  } else {
    throw std::runtime_error("unknown build target: " + target);
  }
  provenance["chain"] =
      ancilla ? json::array({"penalty_fold", "qubo_to_ising",
                             "quadratize_with_ancilla", "normalized"})
              : json::array({"penalty_fold", "qubo_to_ising", "normalized"});

  json doc = json::parse(to_json(model));
  doc["provenance"] = provenance;
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_text(out_path, text);
  std::cerr << "built " << target << ": " << model.n_spins()
            << " qubits, scale " << model.scale << "\n";
  return 0;
}

// ---- anneal --------------------------------------------------------------

int cmd_anneal(const std::string& problem, std::optional<double> hx,
               std::optional<double> duration, int steps,
               const std::string& protocol_name, const std::string& noise_kind,
               double amplitude, double gamma, double center,
               std::optional<double> j_hz, int pulses, std::uint64_t seed,
               bool uncorrelated, const std::string& record_path,
               const std::string& trace_csv_path, bool fidelity_trace) {
  const auto t0 = std::chrono::steady_clock::now();
  const AnnealDefaults defs = defaults_for(problem);
  IsingModel model = resolve_problem(problem);

  AnnealConfig config;
  config.driver_strength = hx.value_or(defs.hx);
  config.duration = duration.value_or(defs.duration);
  config.n_steps = steps;
  config.protocol = protocol_from_string(protocol_name);
  const double jhz = j_hz.value_or(defs.j_hz);
  const double duration_s = config.duration / jhz;

  const NoiseSpectrum spectrum = spectrum_from_args(noise_kind, gamma, center, amplitude);
  NoiseTrace trace;
  if (noise_kind != "none" && amplitude > 0.0) {
    trace = sample_trace(spectrum, config.n_steps, duration_s,
                         static_cast<int>(model.n_spins()), !uncorrelated, seed);
    trace = scaled_trace(trace, 1.0 / jhz);
  }
  if (!trace_csv_path.empty() && trace.values.size() > 0) {
    std::ofstream out(trace_csv_path);
    write_trace_csv(scaled_trace(trace, jhz), out);  // exported back in Hz
  }

  const PulseSchedule schedule = pulse_positions(pulses, config.n_steps);
  const GroundStates targets = brute_force_ground_states(model);

  PropagateOptions options;
  options.record_every = fidelity_trace ? 100 : 0;
  options.targets = &targets;
  const PropagationResult run = propagate(model, config, trace, schedule, options);
  const double f = fidelity(run.state, targets);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::cout << "fidelity " << f << "\n";

  if (!record_path.empty()) {
    json rec;
    rec["inputs"] = {{"problem", problem},
                     {"model_hash", fnv1a(to_json(model))},
                     {"hx", config.driver_strength},
                     {"duration", config.duration},
                     {"steps", config.n_steps},
                     {"protocol", to_string(config.protocol)},
                     {"noise", noise_kind},
                     {"amplitude_hz", amplitude},
                     {"spectrum", spectrum.id()},
                     {"j_hz", jhz},
                     {"pulse_count", pulses},
                     {"correlated", !uncorrelated},
                     {"seed", seed}};
    rec["outputs"] = {{"fidelity", f},
                      {"ground_energy", targets.energy},
                      {"ground_states", targets.indices()}};
    if (!run.fidelity_trace.empty())
      rec["outputs"]["fidelity_trace_x100"] = run.fidelity_trace;
    rec["wall_seconds"] = wall;
    write_text(record_path, rec.dump(2) + "\n");
  }
  return 0;
}

// ---- sweep ---------------------------------------------------------------

struct SweepConfigFile {
  std::string problem = "mot5";
  AnnealConfig anneal;
  std::string noise_kind = "two-peak";
  NoiseSpectrum custom_spectrum;
  double gamma_hz = 3.0;
  double center_hz = 50.0;
  std::vector<double> amplitudes_hz = {250, 500, 750, 1000};
  bool correlated = true;
  double j_hz = 26.0;
  std::vector<int> pulse_counts;
  int n_realizations = 25;
  std::uint64_t master_seed = 1;
  std::string out_csv = "sweep.csv";

  json resolved() const {
    json j;
    j["problem"] = problem;
    j["anneal"] = {{"duration", anneal.duration},
                   {"steps", anneal.n_steps},
                   {"hx", anneal.driver_strength},
                   {"protocol", to_string(anneal.protocol)}};
    j["noise"] = {{"kind", noise_kind},
                  {"gamma_hz", gamma_hz},
                  {"center_hz", center_hz},
                  {"amplitudes_hz", amplitudes_hz},
                  {"correlated", correlated},
                  {"j_hz", j_hz}};
    if (noise_kind == "custom")
      j["noise"]["peaks"] = json::parse(spectrum_to_json(custom_spectrum))["peaks"];
    j["dd"] = {{"pulse_counts", pulse_counts}};
    j["ensemble"] = {{"n_realizations", n_realizations}, {"master_seed", master_seed}};
    j["output"] = {{"csv", out_csv}};
    return j;
  }
};

SweepConfigFile parse_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  json j = json::parse(in);
  SweepConfigFile c;
  c.problem = j.value("problem", c.problem);
  if (j.contains("anneal")) {
    const auto& a = j["anneal"];
    c.anneal.duration = a.value("duration", c.anneal.duration);
    c.anneal.n_steps = a.value("steps", c.anneal.n_steps);
    c.anneal.driver_strength = a.value("hx", c.anneal.driver_strength);
    if (a.contains("protocol"))
      c.anneal.protocol = protocol_from_string(a["protocol"].get<std::string>());
  }
  if (j.contains("noise")) {
    const auto& n = j["noise"];
    c.noise_kind = n.value("kind", c.noise_kind);
    c.gamma_hz = n.value("gamma_hz", c.gamma_hz);
    c.center_hz = n.value("center_hz", c.center_hz);
    c.amplitudes_hz = n.value("amplitudes_hz", c.amplitudes_hz);
    c.correlated = n.value("correlated", c.correlated);
    c.j_hz = n.value("j_hz", c.j_hz);
    if (n.contains("peaks")) {  // explicit spectrum block wins over `kind`
      c.noise_kind = "custom";
      c.custom_spectrum = spectrum_from_json(n.dump());
    }
  }
  if (j.contains("dd")) c.pulse_counts = j["dd"].value("pulse_counts", c.pulse_counts);
  if (j.contains("ensemble")) {
    c.n_realizations = j["ensemble"].value("n_realizations", c.n_realizations);
    c.master_seed = j["ensemble"].value("master_seed", c.master_seed);
  }
  if (j.contains("output")) c.out_csv = j["output"].value("csv", c.out_csv);
  return c;
}

int cmd_sweep(const std::string& config_path, const std::string& out_override,
              std::optional<std::uint64_t> seed_override, int workers,
              bool resume) {
  SweepConfigFile cfg = parse_sweep_config(config_path);
  if (!out_override.empty()) cfg.out_csv = out_override;
  if (seed_override) cfg.master_seed = *seed_override;
  if (cfg.pulse_counts.empty())
    cfg.pulse_counts = {0, 50, 100, 150, 200, 250, 300, 350, 400, 450, 500};

  const IsingModel model = resolve_problem(cfg.problem);
  const NoiseSpectrum spectrum =
      cfg.noise_kind == "custom"
          ? cfg.custom_spectrum
          : spectrum_from_args(cfg.noise_kind, cfg.gamma_hz, cfg.center_hz, 0.0);

  SweepSpec spec;
  spec.amplitudes_hz = cfg.amplitudes_hz;
  spec.pulse_counts = cfg.pulse_counts;
  spec.n_realizations = cfg.n_realizations;
  spec.master_seed = cfg.master_seed;
  spec.j_hz = cfg.j_hz;
  spec.correlated = cfg.correlated;
  spec.workers = workers;
  spec.problem_name = cfg.problem;

  // resumability: completed (amplitude, pulses, seed) rows are kept as-is
  std::set<std::tuple<double, int, std::uint64_t>> done;
  SweepResult previous;
  if (std::filesystem::exists(cfg.out_csv)) {
    if (!resume)
      throw std::runtime_error(cfg.out_csv +
                               " exists; pass --resume to fill in missing rows");
    std::ifstream in(cfg.out_csv);
    previous = read_sweep_csv(in);
    for (const auto& r : previous.rows)
      done.insert({r.amplitude_hz, r.pulse_count, r.seed});
  }

  SweepResult result;
  if (done.empty()) {
    result = dd_sweep(model, cfg.anneal, spectrum, spec);
  } else {
    // recompute only the missing cells
    result.rows = previous.rows;
    result.duration_s = cfg.anneal.duration / cfg.j_hz;
    const GroundStates targets = brute_force_ground_states(model);
    result.noiseless_fidelity = fidelity(
        propagate(model, cfg.anneal, NoiseTrace{}, PulseSchedule{}).state, targets);
    for (int a = 0; a < static_cast<int>(spec.amplitudes_hz.size()); ++a)
      for (int p = 0; p < static_cast<int>(spec.pulse_counts.size()); ++p)
        for (int r = 0; r < spec.n_realizations; ++r) {
          const std::uint64_t seed = rng::derive(
              spec.master_seed, {static_cast<std::uint64_t>(a),
                                 static_cast<std::uint64_t>(p),
                                 static_cast<std::uint64_t>(r)});
          if (done.count({spec.amplitudes_hz[a], spec.pulse_counts[p], seed}))
            continue;
          NoiseSpectrum cs = spectrum;
          cs.amplitude_hz = spec.amplitudes_hz[a];
          NoiseTrace trace = sample_trace(
              cs, cfg.anneal.n_steps, result.duration_s,
              static_cast<int>(model.n_spins()), spec.correlated, seed);
          trace = scaled_trace(trace, 1.0 / spec.j_hz);
          SweepRow row;
          row.amplitude_hz = spec.amplitudes_hz[a];
          row.pulse_count = spec.pulse_counts[p];
          row.pulses_per_ms = row.pulse_count / (result.duration_s * 1e3);
          row.seed = seed;
          row.fidelity = fidelity(
              propagate(model, cfg.anneal, trace,
                        pulse_positions(spec.pulse_counts[p], cfg.anneal.n_steps))
                  .state,
              targets);
          row.protocol = to_string(cfg.anneal.protocol);
          row.problem = spec.problem_name;
          row.duration = cfg.anneal.duration;
          row.spectrum = cs.id();
          row.normalized_fidelity = result.noiseless_fidelity > 0
                                        ? row.fidelity / result.noiseless_fidelity
                                        : 0.0;
          result.rows.push_back(row);
        }
  }

  // canonical order: amplitude grid position, pulse grid position, seed
  auto grid_pos = [&](const SweepRow& r) {
    const auto a = std::find(spec.amplitudes_hz.begin(), spec.amplitudes_hz.end(),
                             r.amplitude_hz) -
                   spec.amplitudes_hz.begin();
    const auto p = std::find(spec.pulse_counts.begin(), spec.pulse_counts.end(),
                             r.pulse_count) -
                   spec.pulse_counts.begin();
    return std::tuple<long, long, std::uint64_t>(a, p, r.seed);
  };
  std::sort(result.rows.begin(), result.rows.end(),
            [&](const SweepRow& x, const SweepRow& y) { return grid_pos(x) < grid_pos(y); });

  std::ostringstream buffer;
  write_sweep_csv(result, buffer, cfg.resolved().dump());
  const std::string tmp = cfg.out_csv + ".tmp";
  write_text(tmp, buffer.str());
  std::filesystem::rename(tmp, cfg.out_csv);
  std::cerr << "wrote " << result.rows.size() << " rows to " << cfg.out_csv << "\n";
  return 0;
}

// ---- stability -----------------------------------------------------------

int cmd_stability(const std::string& problem, const std::string& kind_name,
                  double sigma_min, double sigma_max, int sigma_steps,
                  int samples, std::uint64_t seed, const std::string& out_path) {
  const IsingModel model = resolve_problem(problem);
  const DisorderKind kind = disorder_kind_from_string(kind_name);
  std::vector<double> grid;
  for (int i = 0; i < sigma_steps; ++i)
    grid.push_back(sigma_steps == 1
                       ? sigma_min
                       : sigma_min + (sigma_max - sigma_min) * i / (sigma_steps - 1));
  const auto points = gs_change_probability(model, kind, grid, samples, seed);

  std::ostringstream os;
  json cfg = {{"problem", problem}, {"kind", kind_name},   {"samples", samples},
              {"seed", seed},       {"sigma_min", sigma_min}, {"sigma_max", sigma_max}};
  os << "# " << cfg.dump() << "\n";
  os << "sigma,probability,samples\n";
  for (const auto& p : points)
    os << p.sigma << "," << p.probability << "," << p.n_samples << "\n";
  if (out_path.empty())
    std::cout << os.str();
  else
    write_text(out_path, os.str());
  return 0;
}

// ---- collapse ------------------------------------------------------------

int cmd_collapse(const std::string& input, const std::string& c_arg,
                 const std::string& out_path) {
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot open " + input);
  const SweepResult result = read_sweep_csv(in);
  std::optional<double> c;
  if (c_arg != "auto") c = std::stod(c_arg);
  const CollapseFit fit = collapse_fit(result, c);

  json j;
  j["input"] = input;
  j["exponent"] = fit.exponent;
  j["auto_fitted"] = fit.auto_fitted;
  j["residual"] = fit.residual;
  j["unrescaled_residual"] = fit.unrescaled_residual;
  if (fit.exp_fit.params.size() == 3) {
    j["exp_fit"] = {{"f_inf", fit.exp_fit.params[0]},
                    {"a", fit.exp_fit.params[1]},
                    {"k", fit.exp_fit.params[2]},
                    {"rms", fit.exp_fit.rms},
                    {"converged", fit.exp_fit.converged}};
    if (!fit.exp_fit.converged)
      std::cerr << "warning: exponential fit did not converge\n";
  }
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_text(out_path, text);
  std::cerr << "collapse exponent c = " << fit.exponent
            << " (residual " << fit.residual << ")\n";
  return 0;
}

// ---- magic ---------------------------------------------------------------

int cmd_magic(int ions, double trap_freq_hz, double gradient, double sensitivity_hz_t,
              double mass_amu, bool normalize_out, const std::string& out_path) {
  IonChainSpec spec;
  spec.n_ions = ions;
  spec.ion_mass = mass_amu * constants::atomic_mass;
  spec.axial_frequency = 2.0 * 3.14159265358979323846 * trap_freq_hz;
  spec.gradient = gradient;
  if (sensitivity_hz_t > 0)
    spec.magnetic_sensitivity = 2.0 * 3.14159265358979323846 * sensitivity_hz_t;
  IsingModel model = coupling_matrix(spec);
  const double jmax = model.max_abs_coupling();
  std::cout << "max |J| = " << jmax << " Hz\n";
  if (normalize_out) model = normalized(model);
  if (!out_path.empty()) save_model(model, out_path);
  return 0;
}

// ---- fixtures ------------------------------------------------------------

int cmd_fixtures(const std::string& name, const std::string& out_dir) {
  const auto names = name == "all" ? fixture_names() : std::vector<std::string>{name};
  for (const auto& n : names) {
    const IsingModel m = paper_fixture(n);
    const FixtureMeta meta = fixture_meta(n);
    if (out_dir.empty()) {
      std::cout << n << ": " << m.n_spins() << " qubits, lambda " << meta.lambda
                << ", hx " << meta.driver_strength << "J, duration "
                << meta.duration << "/J, J " << meta.j_hz << " Hz ("
                << meta.source << ")\n";
    } else {
      std::filesystem::create_directories(out_dir);
      const std::string path = out_dir + "/" + n + ".json";
      json doc = json::parse(to_json(m));
      doc["meta"] = {{"lambda", meta.lambda},
                     {"hx", meta.driver_strength},
                     {"duration", meta.duration},
                     {"j_hz", meta.j_hz},
                     {"source", meta.source}};
      write_text(path, doc.dump(2) + "\n");
      std::cerr << "wrote " << path << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum annealing + dynamical decoupling simulator"};
  app.require_subcommand(1);

  // build
  auto* build = app.add_subcommand("build", "build a problem model file");
  std::string build_target;
  int build_frames = 1, build_bar_length = 3, build_bars = 1;
  double build_lambda = -1.0;
  std::vector<int> build_pieces{1, 1}, build_demands;
  bool build_no_ancilla = false;
  std::string build_out;
  build->add_option("target", build_target,
                    "mot5|mot9|cut5|cut6|mot|cutstock")->required();
  build->add_option("--frames", build_frames, "free frames (mot)");
  build->add_option("--lambda", build_lambda, "penalty weight override");
  build->add_option("--L", build_bar_length, "bar length (cutstock)");
  build->add_option("--pieces", build_pieces, "piece lengths (cutstock)")->delimiter(',');
  build->add_option("--demands", build_demands, "piece demands (cutstock)")->delimiter(',');
  build->add_option("--bars", build_bars, "number of bars (cutstock)");
  build->add_flag("--no-ancilla", build_no_ancilla,
                  "keep local fields instead of the ancilla encoding");
  build->add_option("--out", build_out, "output model file (stdout if omitted)");

  // anneal
  auto* anneal = app.add_subcommand("anneal", "single annealing run");
  std::string an_problem = "mot5", an_protocol = "couplings_only",
              an_noise = "none", an_record, an_trace_csv;
  double an_amplitude = 0.0, an_gamma = 3.0, an_center = 50.0;
  std::optional<double> an_hx, an_duration, an_jhz;
  int an_steps = 50000, an_pulses = 0;
  std::uint64_t an_seed = 1;
  bool an_uncorrelated = false, an_ftrace = false;
  anneal->add_option("--problem", an_problem, "preset name or model file");
  anneal->add_option("--hx", an_hx, "driver strength in units of J");
  anneal->add_option("--duration", an_duration, "sweep length in units 1/J");
  anneal->add_option("--steps", an_steps, "number of time steps");
  anneal->add_option("--protocol", an_protocol,
                     "couplings_only|local_fields_with_sign_flips|coupling_modulation");
  anneal->add_option("--noise", an_noise, "none|static|two-peak|single");
  anneal->add_option("--amplitude", an_amplitude, "noise amplitude in Hz");
  anneal->add_option("--gamma", an_gamma, "Lorentzian half width in Hz");
  anneal->add_option("--center", an_center, "single-peak center in Hz");
  anneal->add_option("--jhz", an_jhz, "energy scale J in Hz");
  anneal->add_option("--pulses", an_pulses, "dynamical decoupling pulse count");
  anneal->add_option("--seed", an_seed, "noise seed");
  anneal->add_flag("--uncorrelated", an_uncorrelated, "independent noise per qubit");
  anneal->add_option("--record", an_record, "write a run record (json)");
  anneal->add_option("--dump-noise", an_trace_csv, "write the noise trace (csv, Hz)");
  anneal->add_flag("--fidelity-trace", an_ftrace, "record fidelity every 100 steps");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "factorial DD sweep from a config file");
  std::string sw_config, sw_out;
  std::optional<std::uint64_t> sw_seed;
  int sw_workers = 0;
  bool sw_resume = false;
  sweep->add_option("--config", sw_config, "sweep config (json)")->required();
  sweep->add_option("--out", sw_out, "output csv (overrides config)");
  sweep->add_option("--seed", sw_seed, "master seed (overrides config)");
  sweep->add_option("--workers", sw_workers, "parallel workers (0 = auto)");
  sweep->add_flag("--resume", sw_resume, "fill in missing rows of an existing csv");

  // stability
  auto* stability = app.add_subcommand("stability", "ground-state stability scan");
  std::string st_problem = "mot5", st_kind = "local-correlated", st_out;
  double st_min = 0.1, st_max = 3.0;
  int st_steps = 30, st_samples = 10000;
  std::uint64_t st_seed = 1;
  stability->add_option("--problem", st_problem, "preset name or model file");
  stability->add_option("--kind", st_kind,
                        "local-correlated|local-uncorrelated|coupling-uncorrelated");
  stability->add_option("--sigma-min", st_min, "smallest sigma / J");
  stability->add_option("--sigma-max", st_max, "largest sigma / J");
  stability->add_option("--sigma-steps", st_steps, "grid size");
  stability->add_option("--samples", st_samples, "Monte Carlo samples per point");
  stability->add_option("--seed", st_seed, "RNG seed");
  stability->add_option("--out", st_out, "output csv (stdout if omitted)");

  // collapse
  auto* collapse = app.add_subcommand("collapse", "scaling collapse of a sweep csv");
  std::string co_input, co_c = "auto", co_out;
  collapse->add_option("--input", co_input, "sweep csv")->required();
  collapse->add_option("--c", co_c, "exponent, or 'auto'");
  collapse->add_option("--out", co_out, "output json (stdout if omitted)");

  // magic
  auto* magic = app.add_subcommand("magic", "trapped-ion coupling matrix");
  int mg_ions = 5;
  double mg_freq = 130e3, mg_gradient = 19.0, mg_sens = -1.0, mg_mass = 171.0;
  bool mg_norm = false;
  std::string mg_out;
  magic->add_option("--ions", mg_ions, "number of ions");
  magic->add_option("--trap-freq-hz", mg_freq, "axial trap frequency in Hz");
  magic->add_option("--gradient", mg_gradient, "magnetic gradient in T/m");
  magic->add_option("--sensitivity", mg_sens, "Zeeman sensitivity in Hz/T");
  magic->add_option("--mass-amu", mg_mass, "ion mass in amu");
  magic->add_flag("--normalized", mg_norm, "write the normalized model");
  magic->add_option("--out", mg_out, "output model file");

  // fixtures
  auto* fixtures = app.add_subcommand("fixtures", "paper cost matrices");
  std::string fx_name = "all", fx_out;
  fixtures->add_option("--name", fx_name, "mot5|mot9|cut5|cut6|all");
  fixtures->add_option("--out", fx_out, "output directory for json files");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed())
      return cmd_build(build_target, build_frames, build_lambda, build_bar_length,
                       build_pieces, build_demands, build_bars, build_no_ancilla,
                       build_out);
    if (anneal->parsed())
      return cmd_anneal(an_problem, an_hx, an_duration, an_steps, an_protocol,
                        an_noise, an_amplitude, an_gamma, an_center, an_jhz,
                        an_pulses, an_seed, an_uncorrelated, an_record,
                        an_trace_csv, an_ftrace);
    if (sweep->parsed())
      return cmd_sweep(sw_config, sw_out, sw_seed, sw_workers, sw_resume);
    if (stability->parsed())
      return cmd_stability(st_problem, st_kind, st_min, st_max, st_steps,
                           st_samples, st_seed, st_out);
    if (collapse->parsed()) return cmd_collapse(co_input, co_c, co_out);
    if (magic->parsed())
      return cmd_magic(mg_ions, mg_freq, mg_gradient, mg_sens, mg_mass, mg_norm, mg_out);
    if (fixtures->parsed()) return cmd_fixtures(fx_name, fx_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
