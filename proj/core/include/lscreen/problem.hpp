#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "lscreen/error.hpp"

namespace lscreen {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexSet = std::vector<Index>;

/// Threshold |θᵀb_i| >= 1 - kActiveTol marks a constraint as active.
inline constexpr double kActiveTol = 1e-7;

enum class ProblemKind { Lasso, NonNegLasso };

std::string_view to_string(ProblemKind kind) noexcept;
ProblemKind parse_problem_kind(std::string_view text);

/// Pool value f(z): |z| for the lasso (pool ±b_i), z for the nonnegative lasso.
inline double pool_value(ProblemKind kind, double z) noexcept {
  return kind == ProblemKind::Lasso ? (z < 0 ? -z : z) : z;
}

/// Pool sign g(z): which of ±b_i attains f(z).
inline int pool_sign(ProblemKind kind, double z) noexcept {
  return (kind == ProblemKind::Lasso && z < 0) ? -1 : 1;
}

/// Read-only access to the columns of a dictionary. The screening code only
/// needs inner products with a handful of probe vectors, one column at a time
/// for halfspace construction, and the column norms, so both the in-memory
/// Dictionary and the block-streamed binary reader implement this.
class ColumnSource {
 public:
  virtual ~ColumnSource() = default;

  virtual Index dim() const = 0;
  virtual Index count() const = 0;
  virtual const Vector& norms() const = 0;

  /// Returns Bᵀ·probes (count() x probes.cols()).
  virtual Matrix inner_products(const Matrix& probes) const = 0;
  virtual Vector column(Index i) const = 0;

  Vector correlations(const Vector& v) const;
};

/// Dense column-major dictionary B = [b_1 ... b_p], b_i ∈ ℝⁿ, all nonzero.
class Dictionary final : public ColumnSource {
 public:
  explicit Dictionary(Matrix columns);

  /// Densifies a compressed-sparse-column matrix.
  static Dictionary from_csc(const Eigen::SparseMatrix<double, Eigen::ColMajor>& m);

  const Matrix& matrix() const noexcept { return columns_; }
  Index dim() const override { return columns_.rows(); }
  Index count() const override { return columns_.cols(); }
  const Vector& norms() const override { return norms_; }
  bool normalized() const noexcept { return normalized_; }

  Matrix inner_products(const Matrix& probes) const override;
  Vector column(Index i) const override;

  /// B·w.
  Vector apply(const Vector& w) const;
  Dictionary normalized_copy() const;

 private:
  Matrix columns_;
  Vector norms_;
  bool normalized_ = false;
};

struct LambdaMax {
  double value = 0.0;
  Index index = 0;
  int sign = 1;
};

/// λ_max = max over the feature pool of yᵀb; ties go to the lowest index.
LambdaMax compute_lambda_max(const ColumnSource& dict, const Vector& y, ProblemKind kind);
/// Same, from precomputed correlations Bᵀy.
LambdaMax lambda_max_from_correlations(const Vector& correlations, ProblemKind kind);

/// A lasso instance (y, λ) against a fixed dictionary.
class Instance {
 public:
  Instance(const ColumnSource& dict, Vector y, double lambda, ProblemKind kind = ProblemKind::Lasso);
  Instance(Vector y, double lambda, ProblemKind kind, LambdaMax lambda_max);

  static Instance from_ratio(const ColumnSource& dict, Vector y, double ratio,
                             ProblemKind kind = ProblemKind::Lasso);

  const Vector& y() const noexcept { return y_; }
  double lambda() const noexcept { return lambda_; }
  ProblemKind kind() const noexcept { return kind_; }
  double lambda_max() const noexcept { return lambda_max_.value; }
  const LambdaMax& lambda_max_info() const noexcept { return lambda_max_; }
  /// λ/λ_max; +inf when λ_max <= 0 (w = 0 is optimal for every λ > 0).
  double ratio() const noexcept;

  Instance with_lambda(double lambda) const;

 private:
  Vector y_;
  double lambda_;
  ProblemKind kind_;
  LambdaMax lambda_max_;
};

/// Selected S and rejected S̄, both sorted, disjoint, covering [0, p).
struct Partition {
  IndexSet selected;
  IndexSet rejected;

  static Partition from_flags(const std::vector<std::uint8_t>& rejected_flags);
  std::vector<std::uint8_t> to_flags(Index p) const;
};

struct Solution {
  Vector w;
  Vector theta;
  double gap = 0.0;
  double primal = 0.0;
  IndexSet active;
  bool converged = true;
  /// Set when the support system was solved exactly and θ satisfies every
  /// constraint without rescaling: θ is then the dual optimum to roundoff.
  bool polished = false;
  std::size_t sweeps = 0;
  std::vector<double> objective_history;
};

double primal_objective(const Dictionary& dict, const Instance& inst, const Vector& w);
double dual_objective(const Instance& inst, const Vector& theta);

/// θ ← θ / max(1, max_pool θᵀb).
Vector scale_to_feasible(const ColumnSource& dict, ProblemKind kind, const Vector& theta);

/// θ = (y - Bw)/λ.
Vector dual_from_primal(const Dictionary& dict, const Instance& inst, const Vector& w);

/// Primal minus dual objective after scaling θ into the feasible set.
double duality_gap(const Dictionary& dict, const Instance& inst, const Vector& w, const Vector& theta);

/// Indices whose pool constraint is tight: f(θᵀb_i) >= 1 - tol.
IndexSet active_set(const ColumnSource& dict, ProblemKind kind, const Vector& theta,
                    double tol = kActiveTol);

struct RecoveredPrimal {
  Vector w;
  IndexSet active;
  bool rank_deficient = false;
  /// False when the minimum-norm solution violates w_i·θᵀb_i >= 0; the
  /// solution set then contains other representatives.
  bool sign_consistent = true;
  double residual = 0.0;
};

/// Primal point from the dual optimum: minimum-norm least-squares solution of
/// B_A w_A = y - λθ on the active set A(θ). Throws InconsistentSystem when the
/// residual exceeds 1e-8·max(1, ‖y‖).
RecoveredPrimal recover_primal(const Dictionary& dict, const Instance& inst, const Vector& theta_opt);

/// z↓S.
Vector subsample(const Vector& w, const IndexSet& s);
/// z↑S into ℝᵖ.
Vector upsample(const Vector& z, const IndexSet& s, Index p);
/// B↓S.
Dictionary subsample(const Dictionary& dict, const IndexSet& s);

struct ScaledProblem {
  Dictionary dict;
  Instance inst;
};

/// ȳ = αy, B̄ = αB, λ̄ = α²λ; λ̄/λ̄_max = λ/λ_max.
ScaledProblem rescale_instance(const Dictionary& dict, const Instance& inst, double alpha);

}  // namespace lscreen
