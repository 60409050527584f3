#include "lscreen/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "lscreen/parallel.hpp"

namespace lscreen {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DimensionMismatch: return "dimension mismatch";
    case Errc::InvalidArgument: return "invalid argument";
    case Errc::IndexOutOfRange: return "index out of range";
    case Errc::EmptyRegion: return "empty region";
    case Errc::ImproperRegion: return "improper region";
    case Errc::NotRefinable: return "not refinable";
    case Errc::NotApplicable: return "not applicable";
    case Errc::DegenerateRegion: return "degenerate region";
    case Errc::InconsistentSystem: return "inconsistent system";
    case Errc::SafetyViolation: return "safety violation";
    case Errc::DomainError: return "domain error";
    case Errc::IoError: return "I/O error";
    case Errc::InvariantViolation: return "invariant violation";
  }
  return "unknown error";
}

std::string_view to_string(ProblemKind kind) noexcept {
  return kind == ProblemKind::Lasso ? "lasso" : "nonneg";
}

ProblemKind parse_problem_kind(std::string_view text) {
  if (text == "lasso") return ProblemKind::Lasso;
  if (text == "nonneg" || text == "nonneg-lasso") return ProblemKind::NonNegLasso;
  fail(Errc::InvalidArgument, "unknown problem kind '" + std::string(text) + "'");
}

Vector ColumnSource::correlations(const Vector& v) const {
  require(v.size() == dim(), Errc::DimensionMismatch, "probe length differs from feature dimension");
  Matrix probes = v;
  return inner_products(probes).col(0);
}

// ---------------------------------------------------------------------------
// Dictionary

Dictionary::Dictionary(Matrix columns) : columns_(std::move(columns)) {
  require(columns_.rows() > 0 && columns_.cols() > 0, Errc::InvalidArgument, "dictionary must be nonempty");
  norms_.resize(columns_.cols());
  normalized_ = true;
  for (Index i = 0; i < columns_.cols(); ++i) {
    const double nrm = columns_.col(i).norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) {
      fail(Errc::InvalidArgument, "feature " + std::to_string(i) + " is zero or non-finite");
    }
    norms_[i] = nrm;
    if (std::abs(nrm - 1.0) > 1e-12) normalized_ = false;
  }
}

Dictionary Dictionary::from_csc(const Eigen::SparseMatrix<double, Eigen::ColMajor>& m) {
  return Dictionary(Matrix(m));
}

Matrix Dictionary::inner_products(const Matrix& probes) const {
  require(probes.rows() == dim(), Errc::DimensionMismatch, "probe length differs from feature dimension");
  Matrix out(count(), probes.cols());
  // One dot product per entry keeps every value independent of the chunking.
  parallel_for(count(), [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      for (Index k = 0; k < probes.cols(); ++k) out(i, k) = columns_.col(i).dot(probes.col(k));
    }
  });
  return out;
}

Vector Dictionary::column(Index i) const {
  require(i >= 0 && i < count(), Errc::IndexOutOfRange, "feature index out of range");
  return columns_.col(i);
}

Vector Dictionary::apply(const Vector& w) const {
  require(w.size() == count(), Errc::DimensionMismatch, "weight vector length differs from feature count");
  return columns_ * w;
}

Dictionary Dictionary::normalized_copy() const {
  Matrix scaled = columns_;
  for (Index i = 0; i < scaled.cols(); ++i) scaled.col(i) /= norms_[i];
  return Dictionary(std::move(scaled));
}

// ---------------------------------------------------------------------------
// λ_max and instances

LambdaMax lambda_max_from_correlations(const Vector& correlations, ProblemKind kind) {
  require(correlations.size() > 0, Errc::InvalidArgument, "empty dictionary");
  LambdaMax best{-std::numeric_limits<double>::infinity(), 0, 1};
  for (Index i = 0; i < correlations.size(); ++i) {
    const double v = pool_value(kind, correlations[i]);
    if (v > best.value) best = {v, i, pool_sign(kind, correlations[i])};
  }
  return best;
}

LambdaMax compute_lambda_max(const ColumnSource& dict, const Vector& y, ProblemKind kind) {
  require(y.size() == dict.dim(), Errc::DimensionMismatch, "target length differs from feature dimension");
  return lambda_max_from_correlations(dict.correlations(y), kind);
}

Instance::Instance(const ColumnSource& dict, Vector y, double lambda, ProblemKind kind)
    : Instance(y, lambda, kind, compute_lambda_max(dict, y, kind)) {}

Instance::Instance(Vector y, double lambda, ProblemKind kind, LambdaMax lambda_max)
    : y_(std::move(y)), lambda_(lambda), kind_(kind), lambda_max_(lambda_max) {
  require(lambda_ > 0.0 && std::isfinite(lambda_), Errc::InvalidArgument, "lambda must be positive");
}

Instance Instance::from_ratio(const ColumnSource& dict, Vector y, double ratio, ProblemKind kind) {
  require(ratio > 0.0, Errc::InvalidArgument, "lambda ratio must be positive");
  const LambdaMax lmax = compute_lambda_max(dict, y, kind);
  require(lmax.value > 0.0, Errc::DomainError, "lambda_max is not positive; ratio is undefined");
  return Instance(std::move(y), ratio * lmax.value, kind, lmax);
}

double Instance::ratio() const noexcept {
  if (lambda_max_.value <= 0.0) return std::numeric_limits<double>::infinity();
  return lambda_ / lambda_max_.value;
}

Instance Instance::with_lambda(double lambda) const { return Instance(y_, lambda, kind_, lambda_max_); }

// ---------------------------------------------------------------------------
// Partitions

Partition Partition::from_flags(const std::vector<std::uint8_t>& rejected_flags) {
  Partition part;
  for (std::size_t i = 0; i < rejected_flags.size(); ++i) {
    (rejected_flags[i] ? part.rejected : part.selected).push_back(static_cast<Index>(i));
  }
  return part;
}

std::vector<std::uint8_t> Partition::to_flags(Index p) const {
  std::vector<std::uint8_t> flags(static_cast<std::size_t>(p), 0);
  for (Index i : rejected) {
    require(i >= 0 && i < p, Errc::IndexOutOfRange, "partition index out of range");
    flags[static_cast<std::size_t>(i)] = 1;
  }
  return flags;
}

// ---------------------------------------------------------------------------
// Primal / dual

double primal_objective(const Dictionary& dict, const Instance& inst, const Vector& w) {
  const Vector r = inst.y() - dict.apply(w);
  return 0.5 * r.squaredNorm() + inst.lambda() * w.lpNorm<1>();
}

double dual_objective(const Instance& inst, const Vector& theta) {
  require(theta.size() == inst.y().size(), Errc::DimensionMismatch, "dual point length differs from target");
  const double lam = inst.lambda();
  return 0.5 * inst.y().squaredNorm() - 0.5 * lam * lam * (theta - inst.y() / lam).squaredNorm();
}

Vector scale_to_feasible(const ColumnSource& dict, ProblemKind kind, const Vector& theta) {
  const Vector corr = dict.correlations(theta);
  double worst = 0.0;
  for (Index i = 0; i < corr.size(); ++i) worst = std::max(worst, pool_value(kind, corr[i]));
  return worst > 1.0 ? Vector(theta / worst) : theta;
}

Vector dual_from_primal(const Dictionary& dict, const Instance& inst, const Vector& w) {
  require(inst.y().size() == dict.dim(), Errc::DimensionMismatch, "target length differs from feature dimension");
  return (inst.y() - dict.apply(w)) / inst.lambda();
}

double duality_gap(const Dictionary& dict, const Instance& inst, const Vector& w, const Vector& theta) {
  const Vector feasible = scale_to_feasible(dict, inst.kind(), theta);
  return primal_objective(dict, inst, w) - dual_objective(inst, feasible);
}

IndexSet active_set(const ColumnSource& dict, ProblemKind kind, const Vector& theta, double tol) {
  const Vector corr = dict.correlations(theta);
  IndexSet active;
  for (Index i = 0; i < corr.size(); ++i) {
    if (pool_value(kind, corr[i]) >= 1.0 - tol) active.push_back(i);
  }
  return active;
}

RecoveredPrimal recover_primal(const Dictionary& dict, const Instance& inst, const Vector& theta_opt) {
  require(theta_opt.size() == dict.dim(), Errc::DimensionMismatch, "dual point length differs from feature dimension");
  RecoveredPrimal out;
  out.w = Vector::Zero(dict.count());
  out.active = active_set(dict, inst.kind(), theta_opt);
  const Vector rhs = inst.y() - inst.lambda() * theta_opt;
  const double tol = 1e-8 * std::max(1.0, inst.y().norm());

  if (out.active.empty()) {
    out.residual = rhs.norm();
  } else {
    Matrix sub(dict.dim(), static_cast<Index>(out.active.size()));
    for (std::size_t k = 0; k < out.active.size(); ++k) {
      sub.col(static_cast<Index>(k)) = dict.matrix().col(out.active[k]);
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sub);
    const Vector z = cod.solve(rhs);
    out.rank_deficient = cod.rank() < sub.cols();
    out.residual = (sub * z - rhs).norm();
    out.w = upsample(z, out.active, dict.count());
    const Vector corr = dict.correlations(theta_opt);
    for (std::size_t k = 0; k < out.active.size(); ++k) {
      const Index i = out.active[k];
      if (z[static_cast<Index>(k)] * corr[i] < -1e-12) out.sign_consistent = false;
      if (inst.kind() == ProblemKind::NonNegLasso && z[static_cast<Index>(k)] < -1e-12) out.sign_consistent = false;
    }
  }
  if (out.residual > tol) {
    fail(Errc::InconsistentSystem, "active-set system residual " + std::to_string(out.residual) +
                                       " exceeds tolerance; dual point is not optimal");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sub/upsampling and scaling

Vector subsample(const Vector& w, const IndexSet& s) {
  Vector out(static_cast<Index>(s.size()));
  for (std::size_t k = 0; k < s.size(); ++k) {
    require(s[k] >= 0 && s[k] < w.size(), Errc::IndexOutOfRange, "subsample index out of range");
    out[static_cast<Index>(k)] = w[s[k]];
  }
  return out;
}

Vector upsample(const Vector& z, const IndexSet& s, Index p) {
  require(z.size() == static_cast<Index>(s.size()), Errc::DimensionMismatch, "upsample length differs from index set");
  Vector out = Vector::Zero(p);
  for (std::size_t k = 0; k < s.size(); ++k) {
    require(s[k] >= 0 && s[k] < p, Errc::IndexOutOfRange, "upsample index out of range");
    out[s[k]] = z[static_cast<Index>(k)];
  }
  return out;
}

Dictionary subsample(const Dictionary& dict, const IndexSet& s) {
  require(!s.empty(), Errc::InvalidArgument, "cannot build an empty sub-dictionary");
  Matrix sub(dict.dim(), static_cast<Index>(s.size()));
  for (std::size_t k = 0; k < s.size(); ++k) {
    require(s[k] >= 0 && s[k] < dict.count(), Errc::IndexOutOfRange, "subsample index out of range");
    sub.col(static_cast<Index>(k)) = dict.matrix().col(s[k]);
  }
  return Dictionary(std::move(sub));
}

ScaledProblem rescale_instance(const Dictionary& dict, const Instance& inst, double alpha) {
  require(alpha > 0.0 && std::isfinite(alpha), Errc::InvalidArgument, "scale factor must be positive");
  Dictionary scaled(alpha * dict.matrix());
  Vector y = alpha * inst.y();
  Instance scaled_inst(scaled, std::move(y), alpha * alpha * inst.lambda(), inst.kind());
  return {std::move(scaled), std::move(scaled_inst)};
}

}  // namespace lscreen
