#include "lscreen/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

#include "lscreen/io.hpp"

namespace lscreen {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), tag};
  return std::mt19937_64(seq);
}

constexpr std::uint32_t kDictStream = 0x64696374;
constexpr std::uint32_t kTargetStream = 0x74617267;

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    T v{};
    if constexpr (std::is_floating_point_v<T>) {
      v = static_cast<T>(std::stod(text, &used));
    } else {
      v = static_cast<T>(std::stoll(text, &used));
    }
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  fail(Errc::InvalidArgument, "config key '" + key + "': cannot parse '" + text + "'");
}

}  // namespace

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

TargetGenerator::TargetGenerator(Index n, std::uint64_t seed) : n_(n), rng_(stream(seed, kTargetStream)) {
  require(n >= 1, Errc::InvalidArgument, "target dimension must be positive");
}

Vector TargetGenerator::next() {
  Vector y(n_);
  for (Index i = 0; i < n_; ++i) y[i] = uniform01(rng_);
  const double nrm = y.norm();
  require(nrm > 0.0, Errc::InvariantViolation, "drew an all-zero target");
  return y / nrm;
}

Matrix TargetGenerator::take(Index count) {
  Matrix out(n_, count);
  for (Index k = 0; k < count; ++k) out.col(k) = next();
  return out;
}

RandDataset generate_rand(Index p, Index n, std::uint64_t seed) {
  require(p >= 1 && n >= 1, Errc::InvalidArgument, "p and n must be positive");
  std::mt19937_64 rng = stream(seed, kDictStream);
  Matrix b(n, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) b(i, j) = uniform01(rng);
    b.col(j) /= b.col(j).norm();
  }
  return {Dictionary(std::move(b)), TargetGenerator(n, seed)};
}

MeanStderr mean_stderr(const std::vector<double>& xs) {
  MeanStderr out;
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  return out;
}

MeanStderr rand_lambda_max_stats(Index p, Index n, std::uint64_t seed, Index targets, ProblemKind kind) {
  RandDataset data = generate_rand(p, n, seed);
  std::vector<double> values;
  for (Index t = 0; t < targets; ++t) values.push_back(compute_lambda_max(data.dict, data.targets.next(), kind).value);
  return mean_stderr(values);
}

std::pair<Solution, double> timed_full_solve(const Dictionary& dict, const Instance& inst, const SolverConfig& solver,
                                             int repeats) {
  require(repeats >= 1, Errc::InvalidArgument, "need at least one timing repeat");
  std::vector<double> times;
  Solution sol;
  for (int r = 0; r < repeats; ++r) {
    const auto start = Clock::now();
    sol = solve_lasso(dict, inst, solver);
    times.push_back(elapsed(start));
  }
  return {std::move(sol), median(times)};
}

TrialResult evaluate_test(const Dictionary& dict, const Instance& inst, const TestSpec& spec, const Solution& full,
                          double t_full, const SolverConfig& solver, int repeats) {
  require(repeats >= 1, Errc::InvalidArgument, "need at least one timing repeat");
  struct Run {
    double screen, reduced;
  };
  std::vector<Run> runs;
  TrialResult res;
  res.t_full = t_full;
  for (int r = 0; r < repeats; ++r) {
    const ScreenReport rep = run_test(dict, inst, spec);
    const auto start = Clock::now();
    double primal = std::numeric_limits<double>::quiet_NaN();
    bool certified = true;
    try {
      primal = solve_screened(dict, inst, rep, solver).solution.primal;
    } catch (const Error& e) {
      if (e.code() != Errc::SafetyViolation) throw;
      certified = false;
    }
    runs.push_back({rep.screen_seconds, elapsed(start)});
    if (r == 0) {
      res.rejection_fraction = rep.rejection_fraction();
      bool hit = !certified;
      for (Index i : rep.partition.rejected) hit = hit || full.w[i] != 0.0;
      res.objective_rel_diff = std::abs(primal - full.primal) / std::max(std::abs(full.primal), 1e-300);
      res.violation = hit || !(res.objective_rel_diff <= 1e-6);
    }
  }
  std::sort(runs.begin(), runs.end(),
            [](const Run& a, const Run& b) { return a.screen + a.reduced < b.screen + b.reduced; });
  const Run& mid = runs[runs.size() / 2];
  res.t_screen = mid.screen;
  res.t_reduced = mid.reduced;
  res.speedup = speedup(t_full, res.t_screen, res.t_reduced);
  return res;
}

ExperimentConfig parse_experiment_config(const std::map<std::string, std::string>& kv) {
  ExperimentConfig cfg;
  bool oracle = false;
  int irdt_s = 5;
  double sis_gamma = 0.1;
  std::vector<std::string> names{"st", "dt", "tht"};
  for (const auto& [key, value] : kv) {
    if (key == "dataset") {
      if (value == "rand") {
        cfg.dataset = ExperimentConfig::Dataset::Rand;
      } else if (value == "files") {
        cfg.dataset = ExperimentConfig::Dataset::Files;
      } else {
        fail(Errc::InvalidArgument, "config key 'dataset' must be rand or files");
      }
    } else if (key == "p") {
      cfg.p = parse_number<Index>(key, value);
    } else if (key == "n") {
      cfg.n = parse_number<Index>(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "dict") {
      cfg.dict_path = value;
    } else if (key == "targets") {
      cfg.targets_path = value;
    } else if (key == "kind") {
      cfg.kind = parse_problem_kind(value);
    } else if (key == "tests") {
      names = split_list(value);
    } else if (key == "oracle") {
      oracle = parse_number<int>(key, value) != 0;
    } else if (key == "ratios") {
      cfg.lambda_ratios.clear();
      for (const auto& r : split_list(value)) cfg.lambda_ratios.push_back(parse_number<double>(key, r));
    } else if (key == "trials") {
      cfg.trials = parse_number<int>(key, value);
    } else if (key == "timing_repeats") {
      cfg.timing_repeats = parse_number<int>(key, value);
    } else if (key == "gap_tol") {
      cfg.solver.gap_tol = parse_number<double>(key, value);
    } else if (key == "max_iters") {
      cfg.solver.max_iters = parse_number<std::size_t>(key, value);
    } else if (key == "irdt_s") {
      irdt_s = parse_number<int>(key, value);
    } else if (key == "sis_gamma") {
      sis_gamma = parse_number<double>(key, value);
    } else if (key == "ssr_step") {
      cfg.ssr_step = parse_number<double>(key, value);
    } else if (key == "output") {
      cfg.output_path = value;
    } else {
      fail(Errc::InvalidArgument, "unknown config key '" + key + "'");
    }
  }
  if (cfg.lambda_ratios.empty()) cfg.lambda_ratios = {0.1, 0.3, 0.5, 0.7, 0.9};
  require(cfg.trials >= 1, Errc::InvalidArgument, "trials must be at least 1");
  require(cfg.timing_repeats >= 1, Errc::InvalidArgument, "timing_repeats must be at least 1");
  require(cfg.ssr_step > 0.0, Errc::InvalidArgument, "ssr_step must be positive");
  for (double r : cfg.lambda_ratios) {
    require(r > 0.0 && r <= 1.0, Errc::InvalidArgument, "lambda ratios must lie in (0, 1]");
  }
  if (cfg.dataset == ExperimentConfig::Dataset::Files) {
    require(!cfg.dict_path.empty() && !cfg.targets_path.empty(), Errc::InvalidArgument,
            "files dataset needs dict= and targets=");
  }
  for (const auto& name : names) {
    ExperimentTest t;
    t.spec.kind = parse_test_kind(name);
    t.spec.s_iters = irdt_s;
    t.spec.gamma = sis_gamma;
    t.name = name;
    cfg.tests.push_back(t);
  }
  if (oracle) {
    for (const auto& name : names) {
      ExperimentTest t;
      t.spec.kind = parse_test_kind(name);
      if (!t.spec.safe()) continue;
      t.spec.s_iters = irdt_s;
      t.name = name + "-oracle";
      t.oracle = true;
      cfg.tests.push_back(t);
    }
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(io::read_key_values(path));
}

std::vector<MetricsRow> run_experiment(const ExperimentConfig& cfg) {
  std::optional<Dictionary> dict;
  Matrix targets;
  if (cfg.dataset == ExperimentConfig::Dataset::Rand) {
    RandDataset data = generate_rand(cfg.p, cfg.n, cfg.seed);
    targets = data.targets.take(cfg.trials);
    dict.emplace(std::move(data.dict));
  } else {
    dict.emplace(io::read_matrix(cfg.dict_path));
    targets = io::read_matrix(cfg.targets_path);
    require(targets.rows() == dict->dim(), Errc::DimensionMismatch, "targets and dictionary dimensions differ");
    require(targets.cols() >= cfg.trials, Errc::InvalidArgument, "fewer targets than trials");
  }

  struct Acc {
    std::vector<double> rejection, speedup;
    int violations = 0;
  };
  std::vector<std::vector<Acc>> acc(cfg.tests.size(), std::vector<Acc>(cfg.lambda_ratios.size()));

  for (std::size_t ri = 0; ri < cfg.lambda_ratios.size(); ++ri) {
    const double ratio = cfg.lambda_ratios[ri];
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const Vector y = targets.col(trial);
      const LambdaMax lmax = compute_lambda_max(*dict, y, cfg.kind);
      if (!(lmax.value > 0.0)) continue;
      const Instance inst(y, ratio * lmax.value, cfg.kind, lmax);
      const auto [full, t_full] = timed_full_solve(*dict, inst, cfg.solver, cfg.timing_repeats);

      std::optional<Solution> previous;
      for (std::size_t ti = 0; ti < cfg.tests.size(); ++ti) {
        TestSpec spec = cfg.tests[ti].spec;
        if (cfg.tests[ti].oracle) spec.source = BoundSource::feasible_point(full.theta);
        if (spec.kind == TestKind::StrongSequentialRule) {
          const double lambda0 = std::min(ratio + cfg.ssr_step, 1.0) * lmax.value;
          if (!previous) previous = solve_lasso(*dict, inst.with_lambda(lambda0), cfg.solver);
          spec.source = BoundSource::dual_solution(lambda0, previous->theta);
        }
        const TrialResult r = evaluate_test(*dict, inst, spec, full, t_full, cfg.solver, cfg.timing_repeats);
        Acc& a = acc[ti][ri];
        a.rejection.push_back(r.rejection_fraction);
        a.speedup.push_back(r.speedup);
        a.violations += r.violation ? 1 : 0;
      }
    }
  }

  std::vector<MetricsRow> rows;
  for (std::size_t ti = 0; ti < cfg.tests.size(); ++ti) {
    for (std::size_t ri = 0; ri < cfg.lambda_ratios.size(); ++ri) {
      const Acc& a = acc[ti][ri];
      const MeanStderr rej = mean_stderr(a.rejection);
      const MeanStderr spd = mean_stderr(a.speedup);
      rows.push_back({cfg.tests[ti].name, cfg.lambda_ratios[ri], static_cast<int>(a.rejection.size()), rej.mean,
                      rej.stderr_, spd.mean, spd.stderr_, a.violations, cfg.tests[ti].spec.safe()});
    }
  }
  return rows;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    os << r.test << ',' << r.lambda_ratio << ',' << r.trials << ',' << r.rejection_mean << ',' << r.rejection_stderr
       << ',' << r.speedup_mean << ',' << r.speedup_stderr << ',' << r.safety_violations << ',' << (r.safe ? 1 : 0)
       << '\n';
  }
  return os.str();
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows) {
  std::ofstream out(path);
  if (!out) fail(Errc::IoError, "cannot write " + path.string());
  out << metrics_csv(rows);
  if (!out) fail(Errc::IoError, "write failed for " + path.string());
}

}  // namespace lscreen
