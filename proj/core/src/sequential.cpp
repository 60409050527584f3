#include "lscreen/sequential.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace lscreen {
namespace {

using Clock = std::chrono::steady_clock;

class Stepper {
 public:
  Stepper(const ColumnSource& dict, const Vector& y, ProblemKind kind, LambdaMax lmax, const SequentialConfig& cfg)
      : dict_(dict), y_(y), kind_(kind), lmax_(lmax), cfg_(cfg) {}

  SequentialStep step(int k, double lambda) {
    const Instance inst(y_, lambda, kind_, lmax_);
    TestSpec spec;
    spec.kind = cfg_.test;
    if (have_prev_) {
      // The dual-solution halfspace is only valid for an exact θ; otherwise
      // fall back to using θ_{k-1} as a feasible point.
      spec.source = prev_exact_ ? BoundSource::dual_solution(lambda_prev_, theta_prev_)
                                : BoundSource::feasible_point(theta_prev_);
    }
    SequentialStep st;
    st.k = k;
    st.lambda = lambda;
    st.dome_diameter = have_prev_ ? previous_dome_diameter(inst) : std::numeric_limits<double>::quiet_NaN();

    const ScreenReport report = run_test(dict_, inst, spec);
    const auto t0 = Clock::now();
    const bool warm = cfg_.warm_start && have_prev_;
    ScreenedSolve solved = solve_screened(dict_, inst, report, cfg_.solver, warm ? &w_prev_ : nullptr);
    st.solve_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    st.screen_seconds = report.screen_seconds;
    st.surviving = static_cast<Index>(report.partition.selected.size());
    st.theta = solved.solution.theta;
    st.rejected_flags = report.rejected_flags;

    w_prev_ = solved.solution.w;
    theta_prev_ = solved.solution.theta;
    lambda_prev_ = lambda;
    prev_exact_ = solved.solution.polished;
    have_prev_ = true;
    last_ = std::move(solved.solution);
    return st;
  }

  double lambda_prev() const { return lambda_prev_; }
  const Vector& theta_prev() const { return theta_prev_; }
  Solution take_solution() { return std::move(last_); }

 private:
  double previous_dome_diameter(const Instance& inst) const {
    try {
      const HalfSpace h = halfspace_from_dual_solution(y_, lambda_prev_, theta_prev_);
      return dome_diameter(make_dome(sphere_from_feasible_point(inst, theta_prev_), h));
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  }

  const ColumnSource& dict_;
  const Vector& y_;
  ProblemKind kind_;
  LambdaMax lmax_;
  const SequentialConfig& cfg_;
  bool have_prev_ = false;
  bool prev_exact_ = false;
  double lambda_prev_ = 0.0;
  Vector w_prev_;
  Vector theta_prev_;
  Solution last_;
};

SequentialResult zero_result(const ColumnSource& dict, const Vector& y, double lambda_t) {
  SequentialResult out;
  out.solution.w = Vector::Zero(dict.count());
  out.solution.theta = y / lambda_t;
  out.solution.primal = 0.5 * y.squaredNorm();
  out.solution.polished = true;
  SequentialStep st;
  st.k = 1;
  st.lambda = lambda_t;
  st.dome_diameter = std::numeric_limits<double>::quiet_NaN();
  st.theta = out.solution.theta;
  out.trace.steps.push_back(std::move(st));
  return out;
}

void fill_path_bound(SequentialTrace& trace, double lambda_max, double lambda_t, double R) {
  const auto& s = trace.steps;
  if (s.size() < 2) return;
  // Smallest per-step contraction, ignoring the clamped final step when
  // there is anything else to look at.
  const std::size_t last = s.size() > 2 ? s.size() - 1 : s.size();
  double ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < last; ++k) ratio = std::min(ratio, s[k - 1].lambda / s[k].lambda);
  trace.path_constant = 2.0 * R * (ratio - 1.0);
  trace.step_bound = 1.0 + std::log(lambda_max / lambda_t) / std::log(ratio);
}

void check_source(const SequentialConfig& cfg) {
  TestSpec probe;
  probe.kind = cfg.test;
  if (!probe.safe()) fail(Errc::InvalidArgument, "sequential screening needs a safe test");
}

}  // namespace

std::vector<double> geometric_schedule(double lambda1, double lambda_t, int N) {
  require(N >= 2, Errc::InvalidArgument, "schedule needs at least two values");
  require(lambda_t > 0.0 && lambda_t < lambda1, Errc::InvalidArgument, "need 0 < lambda_t < lambda1");
  const double alpha = std::pow(lambda_t / lambda1, 1.0 / (N - 1));
  std::vector<double> out(static_cast<std::size_t>(N));
  out.front() = lambda1;
  for (int k = 1; k < N - 1; ++k) out[static_cast<std::size_t>(k)] = lambda1 * std::pow(alpha, k);
  out.back() = lambda_t;
  return out;
}

double next_lambda_feedback(double lambda_prev, const Vector& n_prev, const Vector& y, double R, double lambda_t) {
  require(R > 0.0, Errc::InvalidArgument, "R must be positive");
  require(lambda_prev > 0.0, Errc::InvalidArgument, "lambda_prev must be positive");
  require(n_prev.size() == y.size(), Errc::DimensionMismatch, "normal and target dimensions differ");
  require(std::abs(n_prev.norm() - 1.0) <= 1e-9, Errc::InvalidArgument, "normal must have unit norm");
  const double ny = n_prev.dot(y);
  const double perp = y.squaredNorm() - ny * ny;
  if (!(perp > 1e-28 * std::max(1.0, y.squaredNorm()))) {
    require(lambda_t > 0.0, Errc::DomainError, "normal is parallel to y and no target lambda was given");
    return lambda_t;
  }
  const double next = 1.0 / (1.0 / lambda_prev + 0.5 * R / std::sqrt(perp));
  return std::max(next, lambda_t);
}

std::vector<double> SequentialTrace::lambdas() const {
  std::vector<double> out;
  for (const auto& s : steps) out.push_back(s.lambda);
  return out;
}

double SequentialTrace::max_dome_diameter() const {
  double worst = 0.0;
  for (const auto& s : steps) {
    if (!std::isnan(s.dome_diameter)) worst = std::max(worst, s.dome_diameter);
  }
  return worst;
}

SequentialResult dass_solve(const ColumnSource& dict, const Vector& y, double lambda_t, double R,
                            const SequentialConfig& cfg, ProblemKind kind) {
  require(lambda_t > 0.0, Errc::InvalidArgument, "lambda_t must be positive");
  require(R > 0.0, Errc::InvalidArgument, "R must be positive");
  check_source(cfg);
  const LambdaMax lmax = compute_lambda_max(dict, y, kind);
  if (lambda_t >= lmax.value) return zero_result(dict, y, lambda_t);

  double lambda = std::max(cfg.lambda1_fraction * lmax.value, lambda_t);
  Stepper stepper(dict, y, kind, lmax, cfg);
  SequentialResult out;
  out.trace.steps.push_back(stepper.step(1, lambda));
  int k = 1;
  while (lambda > lambda_t) {
    const Vector d = y / lambda - stepper.theta_prev();
    const double nrm = d.norm();
    lambda = nrm > 0.0 ? next_lambda_feedback(lambda, d / nrm, y, R, lambda_t) : lambda_t;
    out.trace.steps.push_back(stepper.step(++k, lambda));
  }
  out.solution = stepper.take_solution();
  fill_path_bound(out.trace, lmax.value, lambda_t, R);
  return out;
}

SequentialResult sequential_solve(const ColumnSource& dict, const Vector& y, const std::vector<double>& lambdas,
                                  const SequentialConfig& cfg, ProblemKind kind) {
  require(!lambdas.empty(), Errc::InvalidArgument, "empty schedule");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    require(lambdas[k] > 0.0, Errc::InvalidArgument, "schedule values must be positive");
    require(k == 0 || lambdas[k] < lambdas[k - 1], Errc::InvalidArgument, "schedule must be strictly decreasing");
  }
  check_source(cfg);
  const LambdaMax lmax = compute_lambda_max(dict, y, kind);
  Stepper stepper(dict, y, kind, lmax, cfg);
  SequentialResult out;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    out.trace.steps.push_back(stepper.step(static_cast<int>(k + 1), lambdas[k]));
  }
  out.solution = stepper.take_solution();
  return out;
}

std::string trace_csv(const SequentialTrace& trace) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "k,lambda_k,surviving,screen_seconds,solve_seconds,dome_diameter\n";
  for (const auto& s : trace.steps) {
    os << s.k << ',' << s.lambda << ',' << s.surviving << ',' << s.screen_seconds << ',' << s.solve_seconds << ',';
    if (std::isnan(s.dome_diameter)) {
      os << "nan";
    } else {
      os << s.dome_diameter;
    }
    os << '\n';
  }
  return os.str();
}

void write_trace_csv(const std::filesystem::path& path, const SequentialTrace& trace) {
  std::ofstream out(path);
  if (!out) fail(Errc::IoError, "cannot write " + path.string());
  out << trace_csv(trace);
  if (!out) fail(Errc::IoError, "write failed for " + path.string());
}

}  // namespace lscreen
