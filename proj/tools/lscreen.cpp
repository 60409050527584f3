// lscreen: generate data, screen, solve and benchmark from the command line.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "lscreen/bench.hpp"
#include "lscreen/io.hpp"
#include "lscreen/screening.hpp"
#include "lscreen/sequential.hpp"
#include "lscreen/solver.hpp"

using namespace lscreen;
namespace fs = std::filesystem;

namespace {

ProblemKind parse_kind(const std::string& s) {
  if (s == "lasso") return ProblemKind::Lasso;
  if (s == "nonneg") return ProblemKind::NonNegLasso;
  fail(Errc::InvalidArgument, "unknown problem kind '" + s + "' (lasso|nonneg)");
}

struct ProblemArgs {
  std::string dict;
  std::string y;
  double ratio = 0.5;
  std::string kind = "lasso";
};

void add_problem_options(CLI::App* cmd, ProblemArgs& a) {
  cmd->add_option("--dict", a.dict, "Dictionary file (.csv: one feature per column, .bin: binary)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--y", a.y, "Target vector file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--lambda-ratio", a.ratio, "lambda / lambda_max")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--kind", a.kind, "lasso or nonneg")->check(CLI::IsMember({"lasso", "nonneg"}));
}

void write_flags(std::ostream& out, const ScreenReport& rep) {
  out << "index,rejected\n";
  for (std::size_t i = 0; i < rep.rejected_flags.size(); ++i) out << i << ',' << int{rep.rejected_flags[i]} << '\n';
}

// ---------------------------------------------------------------------------

struct GenArgs {
  Index p = 2000;
  Index n = 28;
  std::uint64_t seed = 1;
  std::string out;
  std::string y_out;
  Index targets = 1;
};

int run_gen(const GenArgs& a) {
  RandDataset data = generate_rand(a.p, a.n, a.seed);
  io::write_matrix(a.out, data.dict.matrix());
  fs::path y_out = a.y_out;
  if (y_out.empty()) {
    const fs::path out(a.out);
    y_out = out.parent_path() / (out.stem().string() + "_y.csv");
  }
  if (a.targets == 1) {
    io::write_vector(y_out, data.targets.next());
  } else {
    io::write_matrix(y_out, data.targets.take(a.targets));
  }
  std::printf("dictionary=%s\ntargets=%s\n", a.out.c_str(), y_out.c_str());
  return 0;
}

struct ScreenArgs {
  ProblemArgs prob;
  std::string test = "dt";
  std::string dual;
  std::string out;
  double epsilon = 0.0;
  int irdt_s = 5;
  double gamma = 0.1;
};

TestSpec make_spec(const std::string& test, const std::string& dual, double epsilon, int irdt_s, double gamma) {
  TestSpec spec;
  spec.kind = parse_test_kind(test);
  spec.epsilon = epsilon;
  spec.s_iters = irdt_s;
  spec.gamma = gamma;
  if (!dual.empty()) {
    io::DualSolution d = io::read_dual_solution(dual);
    spec.source = BoundSource::dual_solution(d.lambda, std::move(d.theta));
  }
  return spec;
}

int run_screen(const ScreenArgs& a) {
  const Dictionary dict(io::read_matrix(a.prob.dict));
  const Instance inst = Instance::from_ratio(dict, io::read_vector(a.prob.y), a.prob.ratio, parse_kind(a.prob.kind));
  const ScreenReport rep = run_test(dict, inst, make_spec(a.test, a.dual, a.epsilon, a.irdt_s, a.gamma));
  if (a.out.empty()) {
    write_flags(std::cout, rep);
    return 0;
  }
  std::ofstream out(a.out);
  if (!out) fail(Errc::IoError, "cannot open " + a.out);
  write_flags(out, rep);
  std::printf("rejected=%ld\ncount=%ld\nfraction=%.6f\nregions=%s\nseconds=%.6g\n",
              static_cast<long>(rep.rejected_count()), static_cast<long>(rep.count()), rep.rejection_fraction(),
              rep.regions_used.c_str(), rep.screen_seconds);
  return 0;
}

struct SolveArgs {
  ProblemArgs prob;
  std::string screen;
  std::string dual;
  std::string out = "solution.txt";
  double gap_tol = 1e-8;
};

int run_solve(const SolveArgs& a) {
  const Dictionary dict(io::read_matrix(a.prob.dict));
  const Instance inst = Instance::from_ratio(dict, io::read_vector(a.prob.y), a.prob.ratio, parse_kind(a.prob.kind));
  SolverConfig cfg;
  cfg.gap_tol = a.gap_tol;
  Solution sol;
  if (a.screen.empty()) {
    sol = solve_lasso(dict, inst, cfg);
  } else {
    const TestSpec spec = make_spec(a.screen, a.dual, 0.0, 5, 0.1);
    const ScreenedSolve s = solve_screened(dict, inst, run_test(dict, inst, spec), cfg);
    std::printf("rejected=%ld\n", static_cast<long>(s.metrics.rejected));
    sol = s.solution;
  }
  io::write_solution_file(a.out, inst.lambda(), sol);
  std::printf("lambda=%.17g\nobjective=%.17g\ngap=%.6g\nconverged=%d\nsolution=%s\n", inst.lambda(), sol.primal,
              sol.gap, sol.converged ? 1 : 0, a.out.c_str());
  return 0;
}

struct DassArgs {
  ProblemArgs prob;
  double R = 0.2;
  Index block_size = 0;
  std::string out = "solution.txt";
  std::string trace = "trace.csv";
};

int run_dass(const DassArgs& a) {
  const ProblemKind kind = parse_kind(a.prob.kind);
  const Vector y = io::read_vector(a.prob.y);
  std::unique_ptr<ColumnSource> dict;
  if (io::format_for_path(a.prob.dict) == io::MatrixFormat::Binary) {
    dict = std::make_unique<io::BinaryColumnReader>(a.prob.dict, a.block_size > 0 ? a.block_size : 4096);
  } else {
    if (a.block_size > 0) fail(Errc::InvalidArgument, "--block-size needs a binary dictionary");
    dict = std::make_unique<Dictionary>(io::read_matrix(a.prob.dict));
  }
  const double lambda_t = a.prob.ratio * compute_lambda_max(*dict, y, kind).value;
  const SequentialResult res = dass_solve(*dict, y, lambda_t, a.R, {}, kind);
  io::write_solution_file(a.out, lambda_t, res.solution);
  write_trace_csv(a.trace, res.trace);
  std::printf("lambda=%.17g\nobjective=%.17g\ngap=%.6g\nsteps=%d\nmax_dome_diameter=%.6g\nsolution=%s\ntrace=%s\n",
              lambda_t, res.solution.primal, res.solution.gap, res.trace.N(), res.trace.max_dome_diameter(),
              a.out.c_str(), a.trace.c_str());
  return 0;
}

struct BenchArgs {
  std::string config;
  std::string out;
};

int run_bench(const BenchArgs& a) {
  ExperimentConfig cfg = load_experiment_config(a.config);
  if (!a.out.empty()) cfg.output_path = a.out;
  const auto rows = run_experiment(cfg);
  write_metrics_csv(cfg.output_path, rows);
  std::printf("%-14s %6s %10s %10s %6s\n", "test", "ratio", "rejection", "speedup", "viol");
  for (const auto& r : rows) {
    std::printf("%-14s %6.3f %10.4f %10.3f %6d\n", r.test.c_str(), r.lambda_ratio, r.rejection_mean, r.speedup_mean,
                r.safety_violations);
  }
  std::printf("metrics=%s\n", cfg.output_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe screening for the lasso and the nonnegative lasso"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-rand", "Generate a RAND dictionary and targets");
  gen_cmd->add_option("--p", gen.p, "Number of features")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--n", gen.n, "Feature dimension")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("--out", gen.out, "Dictionary output (.csv or .bin)")->required();
  gen_cmd->add_option("--y-out", gen.y_out, "Target output (default: <out>_y.csv)");
  gen_cmd->add_option("--targets", gen.targets, "Number of targets")->check(CLI::PositiveNumber);

  ScreenArgs scr;
  auto* scr_cmd = app.add_subcommand("screen", "Run one screening test and write the rejection flags");
  add_problem_options(scr_cmd, scr.prob);
  scr_cmd->add_option("--test", scr.test, "st|dt|tht|irdt|strong|ssr|sis")
      ->required()
      ->check(CLI::IsMember({"st", "dt", "tht", "irdt", "strong", "ssr", "sis"}));
  scr_cmd->add_option("--dual-solution", scr.dual, "Solution file of a previous solve")->check(CLI::ExistingFile);
  scr_cmd->add_option("--out", scr.out, "Flags CSV (default: stdout)");
  scr_cmd->add_option("--epsilon", scr.epsilon, "Safety margin")->check(CLI::NonNegativeNumber);
  scr_cmd->add_option("--irdt-s", scr.irdt_s, "IRDT iterations")->check(CLI::PositiveNumber);
  scr_cmd->add_option("--sis-gamma", scr.gamma, "SIS keeps floor(gamma * n) features")->check(CLI::Range(0.0, 1.0));

  SolveArgs sol;
  auto* sol_cmd = app.add_subcommand("solve", "Solve, optionally after screening");
  add_problem_options(sol_cmd, sol.prob);
  sol_cmd->add_option("--screen", sol.screen, "Screening test to apply first")
      ->check(CLI::IsMember({"st", "dt", "tht", "irdt", "strong", "ssr", "sis"}));
  sol_cmd->add_option("--dual-solution", sol.dual, "Solution file of a previous solve")->check(CLI::ExistingFile);
  sol_cmd->add_option("--out", sol.out, "Solution file");
  sol_cmd->add_option("--gap-tol", sol.gap_tol, "Relative duality gap target")->check(CLI::PositiveNumber);

  DassArgs dass;
  auto* dass_cmd = app.add_subcommand("dass", "Data-adaptive sequential screening down to the target lambda");
  add_problem_options(dass_cmd, dass.prob);
  dass_cmd->add_option("--R", dass.R, "Dome diameter bound")->required()->check(CLI::PositiveNumber);
  dass_cmd->add_option("--block-size", dass.block_size, "Features held in memory when streaming a .bin dictionary")
      ->check(CLI::PositiveNumber);
  dass_cmd->add_option("--out", dass.out, "Solution file");
  dass_cmd->add_option("--trace", dass.trace, "Trace CSV");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run an experiment config and write the metrics CSV");
  bench_cmd->add_option("--config", bench.config, "key=value config file")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--out", bench.out, "Metrics CSV (overrides the config's output)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*scr_cmd) return run_screen(scr);
    if (*sol_cmd) return run_solve(sol);
    if (*dass_cmd) return run_dass(dass);
    if (*bench_cmd) return run_bench(bench);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
