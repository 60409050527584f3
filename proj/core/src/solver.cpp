#include "lscreen/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace lscreen {
namespace {

using Clock = std::chrono::steady_clock;

constexpr int kInnerSweeps = 200;

double soft_threshold(ProblemKind kind, double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (kind == ProblemKind::Lasso && z < -lambda) return z + lambda;
  return 0.0;
}

struct State {
  const Matrix& B;
  const Vector& y;
  const Vector& sq_norms;
  double lambda;
  ProblemKind kind;
  Vector w;
  Vector r;  // y - Bw

  double primal() const { return 0.5 * r.squaredNorm() + lambda * w.lpNorm<1>(); }

  // One coordinate update; returns |Δw_j|·‖b_j‖.
  double update(Index j) {
    const double old = w[j];
    const double z = B.col(j).dot(r) + sq_norms[j] * old;
    const double fresh = soft_threshold(kind, z, lambda) / sq_norms[j];
    if (fresh != old) {
      r.noalias() -= (fresh - old) * B.col(j);
      w[j] = fresh;
    }
    return std::abs(fresh - old) * std::sqrt(sq_norms[j]);
  }
};

struct GapInfo {
  double gap = 0.0;
  double primal = 0.0;
  double scale = 1.0;  // max(1, max_pool θᵀb) for θ = r/λ
};

GapInfo certify(const State& st) {
  const Vector corr = st.B.transpose() * st.r;
  double worst = 0.0;
  for (Index i = 0; i < corr.size(); ++i) worst = std::max(worst, pool_value(st.kind, corr[i]) / st.lambda);
  GapInfo g;
  g.scale = std::max(1.0, worst);
  g.primal = st.primal();
  const Vector theta = st.r / (st.lambda * g.scale);
  const double dual = 0.5 * st.y.squaredNorm() - 0.5 * st.lambda * st.lambda * (theta - st.y / st.lambda).squaredNorm();
  g.gap = g.primal - dual;
  return g;
}

// Exact solve of the KKT system on the current support with the current
// signs. Accepted only if the signs survive and the objective does not rise.
bool polish(State& st) {
  IndexSet support;
  for (Index j = 0; j < st.w.size(); ++j) {
    if (st.w[j] != 0.0) support.push_back(j);
  }
  if (support.empty()) return false;
  const Index k = static_cast<Index>(support.size());
  Matrix bs(st.B.rows(), k);
  Vector sgn(k);
  for (Index c = 0; c < k; ++c) {
    bs.col(c) = st.B.col(support[static_cast<std::size_t>(c)]);
    sgn[c] = st.w[support[static_cast<std::size_t>(c)]] > 0.0 ? 1.0 : -1.0;
  }
  const Matrix gram = bs.transpose() * bs;
  const Vector rhs = bs.transpose() * st.y - st.lambda * sgn;
  Vector z;
  Eigen::LDLT<Matrix> ldlt(gram);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) z = ldlt.solve(rhs);
  if (z.size() != k || !z.allFinite() || (gram * z - rhs).norm() > 1e-10 * std::max(1.0, rhs.norm())) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(gram);
    z = cod.solve(rhs);
    if (!z.allFinite() || (gram * z - rhs).norm() > 1e-10 * std::max(1.0, rhs.norm())) return false;
  }
  for (Index c = 0; c < k; ++c) {
    if (z[c] * sgn[c] <= 0.0) return false;
  }
  Vector w = Vector::Zero(st.w.size());
  for (Index c = 0; c < k; ++c) w[support[static_cast<std::size_t>(c)]] = z[c];
  Vector r = st.y - bs * z;
  const double before = st.primal();
  const double after = 0.5 * r.squaredNorm() + st.lambda * w.lpNorm<1>();
  if (after > before + 1e-12 * std::max(1.0, before)) return false;
  st.w = std::move(w);
  st.r = std::move(r);
  return true;
}

Solution zero_solution(const Dictionary& dict, const Instance& inst) {
  Solution sol;
  sol.w = Vector::Zero(dict.count());
  sol.theta = inst.y() / inst.lambda();
  sol.primal = 0.5 * inst.y().squaredNorm();
  sol.gap = 0.0;
  sol.converged = true;
  sol.polished = true;
  return sol;
}

}  // namespace

Solution solve_lasso(const Dictionary& dict, const Instance& inst, const SolverConfig& cfg, const Vector* w0) {
  require(cfg.gap_tol > 0.0, Errc::InvalidArgument, "gap tolerance must be positive");
  require(inst.y().size() == dict.dim(), Errc::DimensionMismatch, "target length differs from feature dimension");
  if (inst.lambda() >= inst.lambda_max() && w0 == nullptr) return zero_solution(dict, inst);

  const Matrix& B = dict.matrix();
  const Vector sq_norms = dict.norms().array().square();
  State st{B, inst.y(), sq_norms, inst.lambda(), inst.kind(), Vector::Zero(dict.count()), inst.y()};
  if (w0 != nullptr) {
    require(w0->size() == dict.count(), Errc::DimensionMismatch, "warm start length differs from feature count");
    st.w = *w0;
    if (inst.kind() == ProblemKind::NonNegLasso) st.w = st.w.cwiseMax(0.0);
    st.r = inst.y() - B * st.w;
  }

  std::vector<Index> order(static_cast<std::size_t>(dict.count()));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(cfg.rng_seed);

  Solution sol;
  GapInfo g = certify(st);
  std::size_t sweeps = 0;
  while (g.gap > cfg.gap_tol * g.primal && sweeps < cfg.max_iters) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);
    for (Index j : order) st.update(j);
    ++sweeps;
    if (cfg.record_history) sol.objective_history.push_back(st.primal());

    // Settle the coefficients on the current support before paying for
    // another full pass.
    for (int inner = 0; inner < kInnerSweeps; ++inner) {
      double biggest = 0.0;
      for (Index j : order) {
        if (st.w[j] != 0.0) biggest = std::max(biggest, st.update(j));
      }
      if (cfg.record_history) sol.objective_history.push_back(st.primal());
      if (biggest <= 1e-13 * std::max(1.0, st.r.norm())) break;
    }
    g = certify(st);
    if (cfg.polish && g.gap > cfg.gap_tol * g.primal && polish(st)) {
      g = certify(st);
      if (cfg.record_history) sol.objective_history.push_back(g.primal);
    }
  }
  bool exact = false;
  if (cfg.polish && polish(st)) {
    g = certify(st);
    exact = true;
    if (cfg.record_history) sol.objective_history.push_back(g.primal);
  } else if (st.w.isZero(0.0)) {
    exact = true;
  }

  sol.w = st.w;
  sol.theta = st.r / (st.lambda * g.scale);
  sol.gap = std::max(g.gap, 0.0);
  sol.primal = g.primal;
  sol.converged = g.gap <= cfg.gap_tol * g.primal;
  sol.polished = exact && sol.converged && g.scale <= 1.0 + 1e-12;
  sol.sweeps = sweeps;
  sol.active = active_set(dict, inst.kind(), sol.theta);
  return sol;
}

ScreenedSolve solve_screened(const ColumnSource& dict, const Instance& inst, const ScreenReport& report,
                             const SolverConfig& cfg, const Vector* w0) {
  require(report.count() == dict.count(), Errc::DimensionMismatch, "report covers a different feature count");
  require(inst.y().size() == dict.dim(), Errc::DimensionMismatch, "target length differs from feature dimension");
  ScreenedSolve out;
  const IndexSet& keep = report.partition.selected;
  const auto start = Clock::now();
  Vector w = Vector::Zero(dict.count());
  Vector residual = inst.y();
  bool converged = true;
  bool exact = true;
  std::size_t sweeps = 0;
  if (!keep.empty()) {
    const Dictionary sub = load_columns(dict, keep);
    const Instance sub_inst(sub, inst.y(), inst.lambda(), inst.kind());
    Vector sub_w0;
    if (w0 != nullptr) sub_w0 = subsample(*w0, keep);
    const Solution reduced = solve_lasso(sub, sub_inst, cfg, w0 != nullptr ? &sub_w0 : nullptr);
    w = upsample(reduced.w, keep, dict.count());
    residual -= sub.apply(reduced.w);
    converged = reduced.converged;
    exact = reduced.polished;
    sweeps = reduced.sweeps;
    out.solution.objective_history = reduced.objective_history;
  }
  out.metrics.t_solve_reduced = std::chrono::duration<double>(Clock::now() - start).count();

  // Re-certify against every feature, rejected ones included.
  Solution& sol = out.solution;
  const Vector raw_theta = residual / inst.lambda();
  const Vector corr = dict.correlations(raw_theta);
  double worst = 0.0;
  for (Index i = 0; i < corr.size(); ++i) worst = std::max(worst, pool_value(inst.kind(), corr[i]));
  const double scale = std::max(1.0, worst);
  sol.theta = raw_theta / scale;
  sol.primal = 0.5 * residual.squaredNorm() + inst.lambda() * w.lpNorm<1>();
  sol.gap = std::max(0.0, sol.primal - dual_objective(inst, sol.theta));
  sol.w = std::move(w);
  sol.converged = converged;
  sol.polished = exact && scale <= 1.0 + 1e-12 && sol.gap <= cfg.gap_tol * sol.primal;
  sol.sweeps = sweeps;
  for (Index i = 0; i < corr.size(); ++i) {
    if (pool_value(inst.kind(), corr[i] / scale) >= 1.0 - kActiveTol) sol.active.push_back(i);
  }

  out.metrics.selected = static_cast<Index>(keep.size());
  out.metrics.rejected = report.rejected_count();
  out.metrics.rejection_fraction = report.rejection_fraction();
  out.metrics.t_screen = report.screen_seconds;
  out.metrics.full_gap = sol.gap;
  if (converged && sol.gap > 10.0 * cfg.gap_tol * std::max(sol.primal, 1e-300)) {
    fail(Errc::SafetyViolation, "screened solution fails full-dictionary certification (gap " +
                                    std::to_string(sol.gap) + ")");
  }
  return out;
}

Dictionary load_columns(const ColumnSource& dict, const IndexSet& s) {
  if (const auto* dense = dynamic_cast<const Dictionary*>(&dict)) return subsample(*dense, s);
  require(!s.empty(), Errc::InvalidArgument, "cannot build an empty sub-dictionary");
  Matrix sub(dict.dim(), static_cast<Index>(s.size()));
  for (std::size_t k = 0; k < s.size(); ++k) sub.col(static_cast<Index>(k)) = dict.column(s[k]);
  return Dictionary(std::move(sub));
}

}  // namespace lscreen
