#include "qadd/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "qadd/rng.hpp"

namespace qadd {

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

}  // namespace

SweepResult dd_sweep(const IsingModel& model, const AnnealConfig& config,
                     const NoiseSpectrum& spectrum, const SweepSpec& spec) {
  if (spec.amplitudes_hz.empty() || spec.pulse_counts.empty() || spec.n_realizations < 1)
    throw std::invalid_argument("sweep grid must be nonempty");
  if (spec.j_hz <= 0.0) throw std::invalid_argument("energy scale must be positive");
  if (model.n_spins() > 10 && config.n_steps >= 50000)
    throw std::invalid_argument("sweep limited to 10 spins at full step count");

  const GroundStates targets = brute_force_ground_states(model);
  const int n = static_cast<int>(model.n_spins());
  const double duration_s = config.duration / spec.j_hz;

  SweepResult result;
  result.duration_s = duration_s;
  result.noiseless_fidelity =
      fidelity(propagate(model, config, NoiseTrace{}, PulseSchedule{}).state, targets);

  struct Cell {
    int amp_index, pulse_index, realization;
  };
  std::vector<Cell> cells;
  for (int a = 0; a < static_cast<int>(spec.amplitudes_hz.size()); ++a)
    for (int p = 0; p < static_cast<int>(spec.pulse_counts.size()); ++p)
      for (int r = 0; r < spec.n_realizations; ++r) cells.push_back({a, p, r});

  result.rows.resize(cells.size());
  std::atomic<std::size_t> cursor{0};

  auto run_cell = [&](const Cell& cell, SweepRow& row) {
    const double amplitude = spec.amplitudes_hz[cell.amp_index];
    const int pulses = spec.pulse_counts[cell.pulse_index];
    const std::uint64_t seed = rng::derive(
        spec.master_seed, {static_cast<std::uint64_t>(cell.amp_index),
                           static_cast<std::uint64_t>(cell.pulse_index),
                           static_cast<std::uint64_t>(cell.realization)});
    NoiseSpectrum cell_spectrum = spectrum;
    cell_spectrum.amplitude_hz = amplitude;
    NoiseTrace trace = sample_trace(cell_spectrum, config.n_steps, duration_s, n,
                                    spec.correlated, seed);
    trace = scaled_trace(trace, 1.0 / spec.j_hz);  // Hz -> units of J
    const PulseSchedule schedule = pulse_positions(pulses, config.n_steps);
    const double f =
        fidelity(propagate(model, config, trace, schedule).state, targets);
    row.amplitude_hz = amplitude;
    row.pulse_count = pulses;
    row.pulses_per_ms = pulses / (duration_s * 1e3);
    row.seed = seed;
    row.fidelity = f;
    row.protocol = to_string(config.protocol);
    row.problem = spec.problem_name;
    row.duration = config.duration;
    row.spectrum = cell_spectrum.id();
    row.normalized_fidelity =
        result.noiseless_fidelity > 0 ? f / result.noiseless_fidelity : 0.0;
  };

  int workers = spec.workers > 0
                    ? spec.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(cells.size())));

  if (workers == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(cells[i], result.rows[i]);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = cursor.fetch_add(1); i < cells.size();
             i = cursor.fetch_add(1))
          run_cell(cells[i], result.rows[i]);
      });
    for (auto& t : pool) t.join();
  }
  return result;
}

std::string to_string(DisorderKind k) {
  switch (k) {
    case DisorderKind::local_correlated: return "local_correlated";
    case DisorderKind::local_uncorrelated: return "local_uncorrelated";
    case DisorderKind::coupling_uncorrelated: return "coupling_uncorrelated";
  }
  return "?";
}

DisorderKind disorder_kind_from_string(const std::string& s) {
  if (s == "local_correlated" || s == "local-correlated")
    return DisorderKind::local_correlated;
  if (s == "local_uncorrelated" || s == "local-uncorrelated")
    return DisorderKind::local_uncorrelated;
  if (s == "coupling_uncorrelated" || s == "coupling-uncorrelated")
    return DisorderKind::coupling_uncorrelated;
  throw std::invalid_argument("unknown disorder kind: " + s);
}

std::vector<StabilityPoint> gs_change_probability(const IsingModel& model,
                                                  DisorderKind kind,
                                                  const std::vector<double>& sigma_grid,
                                                  int n_samples,
                                                  std::uint64_t seed) {
  if (model.n_spins() > 12)
    throw std::invalid_argument("stability enumeration limited to 12 spins");
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");

  const std::vector<std::uint64_t> clean = brute_force_ground_states(model).indices();
  auto is_subset = [&](const std::vector<std::uint64_t>& sub) {
    return std::all_of(sub.begin(), sub.end(), [&](std::uint64_t b) {
      return std::binary_search(clean.begin(), clean.end(), b);
    });
  };

  const int n = static_cast<int>(model.n_spins());
  std::vector<StabilityPoint> out;
  out.reserve(sigma_grid.size());
  for (std::size_t si = 0; si < sigma_grid.size(); ++si) {
    const double sigma = sigma_grid[si];
    if (sigma < 0) throw std::invalid_argument("sigma must be >= 0");
    rng::GaussianStream g(
        rng::derive(seed, {static_cast<std::uint64_t>(kind), si}));
    int changed = 0;
    for (int s = 0; s < n_samples; ++s) {
      IsingModel perturbed = model;
      switch (kind) {
        case DisorderKind::local_correlated:
          perturbed.fields.array() += sigma * g.gaussian();
          break;
        case DisorderKind::local_uncorrelated:
          for (int i = 0; i < n; ++i) perturbed.fields[i] += sigma * g.gaussian();
          break;
        case DisorderKind::coupling_uncorrelated:
          for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
              if (perturbed.couplings(i, j) != 0.0)
                perturbed.couplings(i, j) += sigma * g.gaussian();
          break;
      }
      if (!is_subset(brute_force_ground_states(perturbed).indices())) ++changed;
    }
    out.push_back({sigma, static_cast<double>(changed) / n_samples, n_samples});
  }
  return out;
}

namespace {

// Levenberg-Marquardt with analytic Jacobian callbacks.
template <typename Model, typename Jacobian>
FitResult levenberg_marquardt(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys,
                              Eigen::VectorXd p, Model&& f, Jacobian&& jac) {
  const Eigen::Index n = xs.size();
  const Eigen::Index k = p.size();
  auto residual = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) r[i] = f(xs[i], q) - ys[i];
    return r;
  };
  Eigen::VectorXd r = residual(p);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  FitResult out;
  for (int iter = 0; iter < 200; ++iter) {
    out.iterations = iter + 1;
    Eigen::MatrixXd j(n, k);
    for (Eigen::Index i = 0; i < n; ++i) j.row(i) = jac(xs[i], p);
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd jtr = j.transpose() * r;
    if (jtr.cwiseAbs().maxCoeff() < 1e-12 * (1.0 + std::sqrt(cost))) {
      out.converged = true;
      break;
    }
    bool stepped = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd delta = damped.ldlt().solve(-jtr);
      const Eigen::VectorXd q = p + delta;
      const Eigen::VectorXd rq = residual(q);
      if (rq.squaredNorm() < cost) {
        if (cost - rq.squaredNorm() < 1e-14 * (1.0 + cost)) out.converged = true;
        p = q;
        r = rq;
        cost = rq.squaredNorm();
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        break;
      }
      lambda *= 5.0;
    }
    if (out.converged) break;
    if (!stepped) break;  // no descent direction found: reported as unconverged
  }
  out.params = p;
  out.rms = std::sqrt(cost / std::max<Eigen::Index>(1, n));
  return out;
}

}  // namespace

FitResult arctan_fit(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys) {
  if (xs.size() != ys.size() || xs.size() < 4)
    throw std::invalid_argument("arctan fit needs >= 4 points");
  const double range = ys.maxCoeff() - ys.minCoeff();
  Eigen::VectorXd p(4);
  p << range / std::numbers::pi, 1.0, 0.5 * (xs.minCoeff() + xs.maxCoeff()),
      ys.mean();
  auto f = [](double x, const Eigen::VectorXd& q) {
    return q[0] * std::atan(q[1] * (x - q[2])) + q[3];
  };
  auto jac = [](double x, const Eigen::VectorXd& q) {
    const double u = q[1] * (x - q[2]);
    const double den = 1.0 + u * u;
    Eigen::RowVector4d row;
    row << std::atan(u), q[0] * (x - q[2]) / den, -q[0] * q[1] / den, 1.0;
    return row;
  };
  FitResult out = levenberg_marquardt(xs, ys, p, f, jac);
  const double yscale = std::max(1e-300, ys.cwiseAbs().maxCoeff());
  if (range < 1e-12 * yscale || std::abs(out.params[0]) < 1e-9 * yscale ||
      std::abs(out.params[1]) < 1e-9)
    out.degenerate = true;
  return out;
}

FitResult exp_saturation_fit(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys) {
  if (xs.size() != ys.size() || xs.size() < 3)
    throw std::invalid_argument("exponential fit needs >= 3 points");
  Eigen::VectorXd p(3);
  const double span = std::max(1e-12, xs.maxCoeff() - xs.minCoeff());
  p << ys.maxCoeff(), std::max(1e-6, ys.maxCoeff() - ys.minCoeff()), 1.0 / span;
  auto f = [](double x, const Eigen::VectorXd& q) {
    return q[0] - q[1] * std::exp(-q[2] * x);
  };
  auto jac = [](double x, const Eigen::VectorXd& q) {
    const double e = std::exp(-q[2] * x);
    Eigen::RowVector3d row;
    row << 1.0, -e, q[1] * x * e;
    return row;
  };
  return levenberg_marquardt(xs, ys, p, f, jac);
}

namespace {

struct Curve {
  std::vector<double> u;  // ascending
  std::vector<double> f;
};

double interpolate(const Curve& c, double u) {
  auto it = std::lower_bound(c.u.begin(), c.u.end(), u);
  if (it == c.u.begin()) return c.f.front();
  if (it == c.u.end()) return c.f.back();
  const std::size_t hi = it - c.u.begin();
  const std::size_t lo = hi - 1;
  const double w = (u - c.u[lo]) / (c.u[hi] - c.u[lo]);
  return (1.0 - w) * c.f[lo] + w * c.f[hi];
}

// max vertical spread between curves on the overlapping u window
double spread_residual(const std::vector<Curve>& curves) {
  if (curves.size() < 2) return std::numeric_limits<double>::infinity();
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& c : curves) {
    lo = std::max(lo, c.u.front());
    hi = std::min(hi, c.u.back());
  }
  if (!(hi > lo)) return std::numeric_limits<double>::infinity();
  constexpr int kGrid = 64;
  double worst = 0.0;
  for (int g = 0; g < kGrid; ++g) {
    const double u = lo + (hi - lo) * g / (kGrid - 1);
    double fmin = std::numeric_limits<double>::infinity();
    double fmax = -fmin;
    for (const auto& c : curves) {
      const double f = interpolate(c, u);
      fmin = std::min(fmin, f);
      fmax = std::max(fmax, f);
    }
    worst = std::max(worst, fmax - fmin);
  }
  return worst;
}

}  // namespace

CollapseFit collapse_fit(const SweepResult& result, std::optional<double> c) {
  // mean fidelity per (amplitude, pulse count), pulse count > 0
  std::map<double, std::map<int, std::pair<double, int>>> acc;
  for (const auto& row : result.rows) {
    if (row.pulse_count <= 0) continue;
    auto& slot = acc[row.amplitude_hz][row.pulse_count];
    slot.first += row.fidelity;
    slot.second += 1;
  }
  if (acc.size() < 2)
    throw std::invalid_argument("collapse needs at least two distinct amplitudes");
  if (result.duration_s <= 0.0)
    throw std::invalid_argument("sweep result lacks a physical duration");

  auto curves_for = [&](double expc) {
    std::vector<Curve> curves;
    for (const auto& [amp, by_pulse] : acc) {
      Curve curve;
      for (const auto& [pulses, sums] : by_pulse) {
        const double dt = result.duration_s / pulses;
        curve.u.push_back(1.0 / (dt * std::pow(amp, expc)));
        curve.f.push_back(sums.first / sums.second);
      }
      if (curve.u.size() >= 2) curves.push_back(std::move(curve));
    }
    return curves;
  };

  CollapseFit fit;
  fit.unrescaled_residual = spread_residual(curves_for(0.0));
  if (c) {
    fit.exponent = *c;
    fit.residual = spread_residual(curves_for(*c));
  } else {
    fit.auto_fitted = true;
    double best_c = 0.3;
    double best_r = std::numeric_limits<double>::infinity();
    for (double cc = 0.3; cc <= 1.0 + 1e-12; cc += 0.0025) {
      const double r = spread_residual(curves_for(cc));
      if (r < best_r) {
        best_r = r;
        best_c = cc;
      }
    }
    fit.exponent = best_c;
    fit.residual = best_r;
  }
  if (!std::isfinite(fit.residual))
    throw std::invalid_argument("collapse curves have no overlapping window");

  // pooled exponential fit of the rescaled data (saturation toward the
  // noiseless value); reported alongside, failures are non-fatal
  std::vector<double> us, fs;
  for (const auto& curve : curves_for(fit.exponent)) {
    us.insert(us.end(), curve.u.begin(), curve.u.end());
    fs.insert(fs.end(), curve.f.begin(), curve.f.end());
  }
  if (us.size() >= 3) {
    Eigen::VectorXd ux = Eigen::Map<Eigen::VectorXd>(us.data(), us.size());
    Eigen::VectorXd fy = Eigen::Map<Eigen::VectorXd>(fs.data(), fs.size());
    fit.exp_fit = exp_saturation_fit(ux, fy);
  }
  return fit;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

double median_sorted(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  const std::size_t n = hi - lo;
  return n % 2 ? v[lo + n / 2] : 0.5 * (v[lo + n / 2 - 1] + v[lo + n / 2]);
}

}  // namespace

std::vector<GroupStats> summarize(const SweepResult& result) {
  if (result.rows.empty()) throw std::invalid_argument("nothing to summarize");
  std::map<std::tuple<std::string, double, int>, std::vector<double>> groups;
  for (const auto& row : result.rows)
    groups[{row.spectrum, row.amplitude_hz, row.pulse_count}].push_back(row.fidelity);

  std::vector<GroupStats> out;
  out.reserve(groups.size());
  for (auto& [key, values] : groups) {
    std::sort(values.begin(), values.end());
    GroupStats g;
    g.spectrum = std::get<0>(key);
    g.amplitude_hz = std::get<1>(key);
    g.pulse_count = std::get<2>(key);
    g.count = static_cast<int>(values.size());
    const std::size_t n = values.size();
    g.median = median_sorted(values, 0, n);
    // halves exclude the middle element for odd n
    g.q1 = median_sorted(values, 0, n / 2);
    g.q3 = median_sorted(values, n % 2 ? n / 2 + 1 : n / 2, n);
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    g.mean = mean;
    g.stddev = std::sqrt(var / static_cast<double>(n));
    out.push_back(std::move(g));
  }
  return out;
}

void write_sweep_csv(const SweepResult& result, std::ostream& out,
                     const std::string& config_comment) {
  if (!config_comment.empty()) {
    std::istringstream lines(config_comment);
    std::string line;
    while (std::getline(lines, line)) out << "# " << line << "\n";
  }
  out << "# noiseless_fidelity=" << format_double(result.noiseless_fidelity)
      << " duration_s=" << format_double(result.duration_s) << "\n";
  out << "amplitude_hz,pulses,pulses_per_ms,seed,fidelity,protocol,problem,"
         "duration,spectrum,normalized_fidelity\n";
  for (const auto& r : result.rows)
    out << format_double(r.amplitude_hz) << "," << r.pulse_count << ","
        << format_double(r.pulses_per_ms) << "," << r.seed << ","
        << format_double(r.fidelity) << "," << r.protocol << "," << r.problem
        << "," << format_double(r.duration) << "," << r.spectrum << ","
        << format_double(r.normalized_fidelity) << "\n";
}

SweepResult read_sweep_csv(std::istream& in) {
  SweepResult result;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto nf = line.find("noiseless_fidelity=");
      if (nf != std::string::npos)
        result.noiseless_fidelity = std::stod(line.substr(nf + 19));
      const auto ds = line.find("duration_s=");
      if (ds != std::string::npos)
        result.duration_s = std::stod(line.substr(ds + 11));
      continue;
    }
    if (!header_seen) {  // column header
      header_seen = true;
      continue;
    }
    std::istringstream fields(line);
    std::string tok;
    SweepRow r;
    auto next = [&]() {
      if (!std::getline(fields, tok, ',')) throw std::runtime_error("short csv row");
      return tok;
    };
    r.amplitude_hz = std::stod(next());
    r.pulse_count = std::stoi(next());
    r.pulses_per_ms = std::stod(next());
    r.seed = std::stoull(next());
    r.fidelity = std::stod(next());
    r.protocol = next();
    r.problem = next();
    r.duration = std::stod(next());
    r.spectrum = next();
    r.normalized_fidelity = std::stod(next());
    result.rows.push_back(std::move(r));
  }
  return result;
}

}  // namespace qadd
