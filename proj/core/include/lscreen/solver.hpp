#pragma once

#include <cstdint>

#include "lscreen/problem.hpp"
#include "lscreen/screening.hpp"

namespace lscreen {

struct SolverConfig {
  /// Stop once gap <= gap_tol · primal.
  double gap_tol = 1e-8;
  std::size_t max_iters = 100000;
  /// Used only when shuffle is set.
  std::uint64_t rng_seed = 0;
  bool shuffle = false;
  bool record_history = false;
  /// Re-solve the support's normal equations once coordinate descent settles.
  bool polish = true;
};

/// Cyclic coordinate descent with soft-thresholding (one-sided for the
/// nonnegative lasso). `w0`, when given, is the starting point.
Solution solve_lasso(const Dictionary& dict, const Instance& inst, const SolverConfig& cfg = {},
                     const Vector* w0 = nullptr);

struct ScreenedMetrics {
  Index selected = 0;
  Index rejected = 0;
  double rejection_fraction = 0.0;
  double t_screen = 0.0;
  double t_solve_reduced = 0.0;
  /// Duality gap of the upsampled solution on the full dictionary.
  double full_gap = 0.0;
};

struct ScreenedSolve {
  Solution solution;
  ScreenedMetrics metrics;
};

/// Solves on B↓S, upsamples and re-certifies on the full dictionary. Throws
/// SafetyViolation when the full gap exceeds 10·gap_tol·primal. Works on a
/// streamed source too: only the selected columns are loaded.
ScreenedSolve solve_screened(const ColumnSource& dict, const Instance& inst, const ScreenReport& report,
                             const SolverConfig& cfg = {}, const Vector* w0 = nullptr);

/// B↓S from any column source.
Dictionary load_columns(const ColumnSource& dict, const IndexSet& s);

/// t_full / (t_screen + t_reduced).
inline double speedup(double t_full, double t_screen, double t_reduced) {
  return t_full / (t_screen + t_reduced);
}

}  // namespace lscreen
