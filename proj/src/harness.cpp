#include "sprox/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "sprox/errors.hpp"

namespace sprox {
namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ReferenceFn build_reference(const ExperimentConfig& c, const std::vector<BlockShape>& shapes) {
  const ScalarRef h = c.reference == "barrier" ? ScalarRef::barrier(c.epsilon)
                                               : ScalarRef::hyper_kappa(c.epsilon, c.kappa);
  const bool iso = c.structure == "iso" || c.structure == "spectral_iso";
  return ReferenceFn::uniform(shapes, h, iso ? Structure::Iso : Structure::Aniso,
                              iso ? Structure::SpectralIso : Structure::SpectralAniso);
}

NoiseModel build_noise(const ExperimentConfig& c) {
  if (c.noise == "gaussian") return NoiseModel::gaussian(c.noise_sigma);
  if (c.noise == "student_t") return NoiseModel::student_t(c.noise_df, c.noise_sigma, c.noise_p);
  return NoiseModel::none();
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

double metric_of(const Trace& t, RateMetric m) {
  return m == RateMetric::Gap ? t.mean_gap() : t.mean_grad_norm();
}

}  // namespace

Instance build_instance(const ExperimentConfig& c) {
  check_config(c);
  std::mt19937_64 rng(c.problem_seed);
  ProblemPtr problem;
  if (c.problem == "quadratic") {
    problem = make_quadratic(c.dim, c.cond, rng, c.target_scale,
                             c.spectrum == "power" ? Spectrum::Power : Spectrum::Log,
                             c.spectrum_beta);
  } else if (c.problem == "logistic") {
    problem = make_logistic(c.samples, c.features, rng);
  } else {
    problem = make_matrix_quadratic(c.rows, c.cols, rng, c.target_scale);
  }
  const auto shapes = problem->shapes();

  BlockConstraint bc;
  bc.kind = *set_kind_from_string(c.constraint);
  bc.radius = c.radius;
  bc.count = c.sparsity;
  ConstraintSpec spec = [&] {
    try {
      return ConstraintSpec::uniform(shapes, bc);
    } catch (const InvalidSpec& e) {
      throw ConfigError(std::string("constraint: ") + e.what());
    }
  }();

  ParamVec x0 = ParamVec::zeros(shapes);
  if (c.x0 == "random") {
    std::mt19937_64 xrng(c.problem_seed + 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> N(0.0, c.x0_scale);
    Eigen::VectorXd flat(x0.total_size());
    for (Eigen::Index i = 0; i < flat.size(); ++i) flat(i) = N(xrng);
    x0 = ParamVec::unflatten(shapes, flat);
  }
  x0 = project(spec, x0);

  return Instance{problem, build_reference(c, shapes), std::move(spec), std::move(x0),
                  build_noise(c)};
}

RunConfig build_run_config(const ExperimentConfig& c, const Instance& inst,
                           std::uint64_t seed) {
  Mode mode;
  if (c.mode == "deterministic") {
    mode = Deterministic{c.gamma ? *c.gamma : inst.ref.mu() / inst.problem->lipschitz()};
  } else if (c.mode == "polyak") {
    mode = StochasticPolyak{c.gamma_bar};
  } else if (c.mode == "storm") {
    mode = StochasticStorm{c.gamma_bar};
  } else {
    PolarExpressMode pm;
    pm.gamma_bar = c.gamma_bar;
    pm.eps_hat = c.eps_hat;
    if (!c.poly_schedule.empty()) {
      const bool is_path = c.poly_schedule.find('/') != std::string::npos ||
                           c.poly_schedule.find('.') != std::string::npos;
      pm.schedule = load_schedule(is_path ? c.poly_schedule
                                          : shipped_schedule_path(c.poly_schedule));
    }
    mode = pm;
  }
  return RunConfig{inst.ref, inst.spec, mode, c.horizon, seed, inst.x0, inst.noise, false};
}

std::vector<Trace> run_repetitions(const ExperimentConfig& c, unsigned threads) {
  const Instance inst = build_instance(c);
  std::vector<RunConfig> configs;
  for (long r = 0; r < c.repetitions; ++r) {
    configs.push_back(build_run_config(c, inst, c.seed + static_cast<std::uint64_t>(r)));
  }
  validate(configs.front(), *inst.problem);
  std::vector<Trace> traces(configs.size());
  parallel_for(configs.size(), threads,
               [&](std::size_t i) { traces[i] = run(configs[i], *inst.problem); });
  return traces;
}

void write_csv(std::ostream& os, const std::vector<Trace>& traces) {
  os << "run_id,k,F,gap_bregman,step_norm,gamma_k,alpha_k\n";
  for (std::size_t r = 0; r < traces.size(); ++r) {
    for (const auto& rec : traces[r].records) {
      os << r << ',' << rec.k << ',' << fmt(rec.F) << ',' << fmt(rec.gap_bregman) << ','
         << fmt(rec.step_norm) << ',' << fmt(rec.gamma_k) << ',' << fmt(rec.alpha_k) << '\n';
    }
  }
}

std::string summary_text(const ExperimentConfig& c, const std::vector<Trace>& traces) {
  std::ostringstream os;
  double mean = 0.0;
  double mean_grad = 0.0;
  int step_viol = 0;
  int feas_viol = 0;
  int failed = 0;
  for (const auto& t : traces) {
    mean += t.mean_gap();
    mean_grad += t.mean_grad_norm();
    step_viol += t.step_bound_violations;
    feas_viol += t.feasibility_violations;
    if (!t.completed) ++failed;
  }
  mean /= static_cast<double>(traces.size());
  mean_grad /= static_cast<double>(traces.size());
  os << "mode = " << c.mode << "\n";
  os << "horizon = " << c.horizon << "\n";
  os << "runs = " << traces.size() << "\n";
  os << "failed_runs = " << failed << "\n";
  os << "mean_time_avg_gap = " << fmt(mean) << "\n";
  os << "mean_time_avg_grad_norm = " << fmt(mean_grad) << "\n";
  os << "step_bound_violations = " << step_viol << "\n";
  os << "feasibility_violations = " << feas_viol << "\n";
  for (std::size_t r = 0; r < traces.size(); ++r) {
    os << "run " << r << " seed " << traces[r].seed << " time_avg_gap " << fmt(traces[r].mean_gap());
    if (!traces[r].completed) os << " error \"" << traces[r].error << "\"";
    os << "\n";
  }
  return os.str();
}

ExperimentOutcome run_experiment(const ExperimentConfig& c, unsigned threads) {
  ExperimentOutcome out;
  out.traces = run_repetitions(c, threads);
  out.summary = summary_text(c, out.traces);
  for (const auto& t : out.traces) out.ok = out.ok && t.completed;

  std::ofstream csv(c.output, std::ios::binary);
  if (!csv) throw Error("cannot write " + c.output);
  write_csv(csv, out.traces);
  std::ofstream sum(c.output + ".summary", std::ios::binary);
  if (!sum) throw Error("cannot write " + c.output + ".summary");
  sum << out.summary;
  return out;
}

RateEstimate estimate_rate(const std::vector<long>& horizons,
                           const std::vector<double>& values) {
  if (horizons.size() != values.size()) {
    throw InvalidInput("rate estimate: horizons and values differ in length");
  }
  if (horizons.size() < 4) throw InvalidInput("rate estimate: need at least 4 horizons");
  for (std::size_t i = 1; i < horizons.size(); ++i) {
    if (horizons[i] <= horizons[i - 1]) {
      throw InvalidInput("rate estimate: horizons must be strictly increasing");
    }
  }
  RateEstimate est;
  est.horizons = horizons;
  est.values = values;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      est.warnings.push_back("horizon " + std::to_string(horizons[i]) +
                             ": degenerate value " + fmt(values[i]) + " excluded");
      continue;
    }
    lx.push_back(std::log(static_cast<double>(horizons[i]) + 1.0));
    ly.push_back(std::log(values[i]));
  }
  if (lx.size() < 2) throw InvalidInput("rate estimate: fewer than 2 usable horizons");
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  est.slope = sxy / sxx;
  est.intercept = my - est.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (est.intercept + est.slope * lx[i]);
    ss_res += r * r;
  }
  // A perfectly flat series is fit exactly.
  est.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return est;
}

RateSweep sweep_rates(const ExperimentConfig& c, const std::vector<long>& horizons,
                      RateMetric metric, unsigned threads) {
  RateSweep sweep;
  const Instance inst = build_instance(c);
  struct Job {
    std::size_t h;
    long r;
  };
  std::vector<Job> jobs;
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    for (long r = 0; r < c.repetitions; ++r) jobs.push_back({h, r});
  }
  std::vector<Trace> traces(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    ExperimentConfig ck = c;
    ck.horizon = horizons[jobs[i].h];
    const RunConfig rc = build_run_config(ck, inst, c.seed + static_cast<std::uint64_t>(jobs[i].r));
    traces[i] = run(rc, *inst.problem);
  });

  sweep.per_run.assign(horizons.size(), {});
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Trace& t = traces[i];
    sweep.step_bound_violations += t.step_bound_violations;
    sweep.feasibility_violations += t.feasibility_violations;
    if (!t.completed) ++sweep.failed_runs;
    sweep.per_run[jobs[i].h].push_back(metric_of(t, metric));
  }
  for (const auto& runs : sweep.per_run) {
    double s = 0.0;
    for (double v : runs) s += v;
    sweep.means.push_back(s / static_cast<double>(runs.size()));
  }
  sweep.estimate = estimate_rate(horizons, sweep.means);
  if (c.repetitions < 10) {
    sweep.estimate.warnings.push_back("fewer than 10 repetitions per horizon");
  }
  if (sweep.failed_runs > 0) {
    sweep.estimate.warnings.push_back(std::to_string(sweep.failed_runs) + " runs ended early");
  }
  return sweep;
}

std::vector<long> parse_horizons(const std::string& list) {
  std::vector<long> out;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    long v = -1;
    try {
      v = std::stol(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size() || v < 0) {
      throw ConfigError("horizons: bad entry '" + tok + "'");
    }
    if (!out.empty() && v <= out.back()) {
      throw ConfigError("horizons: list must be strictly increasing");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("horizons: empty list");
  return out;
}

std::vector<long> default_horizons() { return {64, 128, 256, 512, 1024, 2048, 4096}; }

}  // namespace sprox
