#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "lscreen/screening.hpp"
#include "lscreen/solver.hpp"

namespace lscreen {

/// Uniform [0, 1) double from the top 53 bits of one 64-bit draw.
double uniform01(std::mt19937_64& rng);

/// Unit-norm random targets with i.i.d. uniform [0, 1) entries before scaling.
class TargetGenerator {
 public:
  TargetGenerator(Index n, std::uint64_t seed);

  Vector next();
  /// The next `count` targets as the columns of an n x count matrix.
  Matrix take(Index count);

 private:
  Index n_;
  std::mt19937_64 rng_;
};

struct RandDataset {
  Dictionary dict;
  TargetGenerator targets;
};

/// p unit-norm features in ℝⁿ with i.i.d. uniform [0, 1) entries before
/// scaling. Dictionary and targets use independent streams of the same seed.
RandDataset generate_rand(Index p, Index n, std::uint64_t seed);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};
MeanStderr mean_stderr(const std::vector<double>& xs);

/// λ_max over `targets` draws against a RAND dictionary.
MeanStderr rand_lambda_max_stats(Index p, Index n, std::uint64_t seed, Index targets,
                                 ProblemKind kind = ProblemKind::Lasso);

/// One screened run compared against a reference full solve.
struct TrialResult {
  double rejection_fraction = 0.0;
  double t_screen = 0.0;
  double t_reduced = 0.0;
  double t_full = 0.0;
  double speedup = 0.0;
  double objective_rel_diff = 0.0;
  /// A rejected feature carries weight in the reference solution, or the
  /// screened solution failed full-dictionary certification.
  bool violation = false;
};

/// Times `repeats` screen + reduced-solve runs and keeps the median.
TrialResult evaluate_test(const Dictionary& dict, const Instance& inst, const TestSpec& spec, const Solution& full,
                          double t_full, const SolverConfig& solver, int repeats = 3);

/// Median wall time of `repeats` full solves, with the last solution.
std::pair<Solution, double> timed_full_solve(const Dictionary& dict, const Instance& inst, const SolverConfig& solver,
                                             int repeats = 3);

struct ExperimentTest {
  std::string name;
  TestSpec spec;
  /// Sphere radius from the certified dual optimum instead of the default.
  bool oracle = false;
};

struct ExperimentConfig {
  enum class Dataset { Rand, Files };
  Dataset dataset = Dataset::Rand;
  Index p = 2000;
  Index n = 28;
  std::uint64_t seed = 1;
  std::filesystem::path dict_path;
  std::filesystem::path targets_path;
  ProblemKind kind = ProblemKind::Lasso;
  std::vector<ExperimentTest> tests;
  std::vector<double> lambda_ratios;
  int trials = 64;
  int timing_repeats = 3;
  /// The Strong Sequential Rule screens at ratio ρ using the solution at ρ + this.
  double ssr_step = 0.05;
  SolverConfig solver;
  std::filesystem::path output_path = "metrics.csv";
};

/// Keys: dataset (rand|files), p, n, seed, dict, targets, kind, tests (comma
/// list of st,dt,tht,irdt,strong,ssr,sis), oracle (0|1), ratios, trials,
/// timing_repeats, gap_tol, max_iters, irdt_s, sis_gamma, ssr_step, output.
ExperimentConfig parse_experiment_config(const std::map<std::string, std::string>& kv);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct MetricsRow {
  std::string test;
  double lambda_ratio = 0.0;
  int trials = 0;
  double rejection_mean = 0.0;
  double rejection_stderr = 0.0;
  double speedup_mean = 0.0;
  double speedup_stderr = 0.0;
  int safety_violations = 0;
  bool safe = true;
};

inline constexpr const char* kMetricsHeader =
    "test,lambda_ratio,trials,rejection_mean,rejection_stderr,speedup_mean,speedup_stderr,safety_violations,safe";

/// Rows ordered by test (config order) then ratio.
std::vector<MetricsRow> run_experiment(const ExperimentConfig& cfg);
std::string metrics_csv(const std::vector<MetricsRow>& rows);
void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows);

}  // namespace lscreen
