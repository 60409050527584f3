#pragma once

#include <filesystem>
#include <vector>

#include "lscreen/screening.hpp"
#include "lscreen/solver.hpp"

namespace lscreen {

/// λ_k = α^{k-1}·λ₁ with α = (λ_t/λ₁)^{1/(N-1)}; both endpoints exact.
std::vector<double> geometric_schedule(double lambda1, double lambda_t, int N);

/// 1/λ_k = 1/λ_{k-1} + (R/2)/sqrt(yᵀ(I - nnᵀ)y), clamped below at λ_t.
/// Returns λ_t when n is parallel to y.
double next_lambda_feedback(double lambda_prev, const Vector& n_prev, const Vector& y, double R,
                            double lambda_t = 0.0);

struct SequentialStep {
  int k = 0;
  double lambda = 0.0;
  Index surviving = 0;
  double screen_seconds = 0.0;
  double solve_seconds = 0.0;
  /// Diameter of the dome built from step k-1; NaN for the first step.
  double dome_diameter = 0.0;
  Vector theta;
  std::vector<std::uint8_t> rejected_flags;
};

struct SequentialTrace {
  std::vector<SequentialStep> steps;
  /// Post-hoc path constant C and the step bound 1 + log(λ_max/λ_t)/log(1 + C/2R)
  /// it implies; informational only.
  double path_constant = 0.0;
  double step_bound = 0.0;

  int N() const noexcept { return static_cast<int>(steps.size()); }
  std::vector<double> lambdas() const;
  double max_dome_diameter() const;
};

struct SequentialConfig {
  /// λ₁ = lambda1_fraction·λ_max.
  double lambda1_fraction = 0.95;
  TestKind test = TestKind::TwoHyperplane;
  SolverConfig solver;
  /// Warm-start each solve from the previous step's weights.
  bool warm_start = true;
};

struct SequentialResult {
  Solution solution;
  SequentialTrace trace;
};

/// Data-adaptive sequential screening down to λ_t with dome diameter R.
SequentialResult dass_solve(const ColumnSource& dict, const Vector& y, double lambda_t, double R,
                            const SequentialConfig& cfg = {}, ProblemKind kind = ProblemKind::Lasso);

/// Same screen-and-solve loop over a fixed descending schedule.
SequentialResult sequential_solve(const ColumnSource& dict, const Vector& y, const std::vector<double>& lambdas,
                                  const SequentialConfig& cfg = {}, ProblemKind kind = ProblemKind::Lasso);

/// Columns: k, lambda_k, surviving, screen_seconds, solve_seconds, dome_diameter.
void write_trace_csv(const std::filesystem::path& path, const SequentialTrace& trace);
std::string trace_csv(const SequentialTrace& trace);

}  // namespace lscreen
