#include "lscreen/screening.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "lscreen/parallel.hpp"

namespace lscreen {
namespace {

using Clock = std::chrono::steady_clock;
using Flags = std::vector<std::uint8_t>;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ScreenReport finish(Flags flags, Clock::time_point start, std::string regions, bool safe = true) {
  ScreenReport rep;
  rep.partition = Partition::from_flags(flags);
  rep.rejected_flags = std::move(flags);
  rep.regions_used = std::move(regions);
  rep.safe = safe;
  rep.screen_seconds = seconds_since(start);
  return rep;
}

// Reject iff V_l + ε < ρ < V_u - ε, with the thresholds given per feature.
template <class Upper, class Lower>
void apply_threshold(Flags& flags, const Vector& rho, double epsilon, Upper upper, Lower lower) {
  parallel_for(rho.size(), [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      if (flags[static_cast<std::size_t>(i)]) continue;
      const double vu = upper(i);
      const double vl = lower(i);
      if (vl + epsilon < rho[i] && rho[i] < vu - epsilon) flags[static_cast<std::size_t>(i)] = 1;
    }
  });
}

void sphere_flags(Flags& flags, ProblemKind kind, const Vector& rho, const Vector& norms, double r, double eps) {
  const bool lasso = kind == ProblemKind::Lasso;
  apply_threshold(
      flags, rho, eps, [&](Index i) { return 1.0 - r * norms[i]; },
      [&](Index i) { return lasso ? -(1.0 - r * norms[i]) : -std::numeric_limits<double>::infinity(); });
}

// A feature parallel to a bounding normal can sit exactly on the region's
// boundary (μ = 1, e.g. the feature that defines the halfspace). Roundoff must
// not reject it, so such features need μ < 1 - kBoundaryTol.
constexpr double kBoundaryTol = 1e-12;

double boundary_slack(double t, double norm) { return t >= (1.0 - kBoundaryTol) * norm ? kBoundaryTol : 0.0; }

// Dome (q, r, n, ψ): ρ = Bᵀq, sigma = Bᵀn.
void dome_flags(Flags& flags, ProblemKind kind, const Vector& rho, const Vector& sigma, const Vector& norms,
                double r, double psi, double eps) {
  const bool lasso = kind == ProblemKind::Lasso;
  apply_threshold(
      flags, rho, eps,
      [&](Index i) {
        return 1.0 - dome_support_offset(r, psi, sigma[i], norms[i]) - boundary_slack(sigma[i], norms[i]);
      },
      [&](Index i) {
        if (!lasso) return -std::numeric_limits<double>::infinity();
        return -(1.0 - dome_support_offset(r, psi, -sigma[i], norms[i]) - boundary_slack(-sigma[i], norms[i]));
      });
}

void region2h_flags(Flags& flags, ProblemKind kind, const Vector& rho, const Vector& sigma, const Vector& tau_b,
                    const Vector& norms, const Region2H& g, double eps) {
  const bool lasso = kind == ProblemKind::Lasso;
  const double r = g.sphere.radius;
  auto slack = [&](double t1, double t2, double norm) {
    return std::max(boundary_slack(t1, norm), boundary_slack(t2, norm));
  };
  apply_threshold(
      flags, rho, eps,
      [&](Index i) {
        return 1.0 - region2h_support_offset(r, g.psi1, g.psi2, g.tau, sigma[i], tau_b[i], norms[i]).value -
               slack(sigma[i], tau_b[i], norms[i]);
      },
      [&](Index i) {
        if (!lasso) return -std::numeric_limits<double>::infinity();
        return -(1.0 - region2h_support_offset(r, g.psi1, g.psi2, g.tau, -sigma[i], -tau_b[i], norms[i]).value -
                 slack(-sigma[i], -tau_b[i], norms[i]));
      });
}

// Every safe region contains a known dual-feasible point: y/λ_max for the
// default sphere, θ otherwise. A feature that point holds at the boundary has
// μ >= 1, so a rejection can only come from roundoff.
constexpr double kWitnessTol = 1e-12;

ScreenReport guarded(const ColumnSource& dict, const Instance& inst, const BoundSource& src,
                     const Vector& rho_center, Flags flags, Clock::time_point start, std::string regions) {
  Vector corr;
  if (src.kind == BoundSource::Kind::Default) {
    if (inst.lambda_max() > 0.0) corr = rho_center * (inst.lambda() / inst.lambda_max());
  } else {
    corr = dict.correlations(src.theta);
  }
  for (Index i = 0; i < corr.size(); ++i) {
    if (pool_value(inst.kind(), corr[i]) >= 1.0 - kWitnessTol) flags[static_cast<std::size_t>(i)] = 0;
  }
  return finish(std::move(flags), start, std::move(regions));
}

struct Greedy {
  Index index = -1;
  int sign = 1;
  double score = -std::numeric_limits<double>::infinity();
};

Greedy greedy_argmax(ProblemKind kind, const Vector& rho, const Vector& norms, const Flags* skip = nullptr,
                     Index exclude = -1) {
  Greedy best;
  for (Index i = 0; i < rho.size(); ++i) {
    if (i == exclude || (skip && (*skip)[static_cast<std::size_t>(i)])) continue;
    const double score = (pool_value(kind, rho[i]) - 1.0) / norms[i];
    if (score > best.score) best = {i, pool_sign(kind, rho[i]), score};
  }
  return best;
}

Sphere sphere_for(const Instance& inst, const BoundSource& src) {
  switch (src.kind) {
    case BoundSource::Kind::Default: return select_default_sphere(inst);
    case BoundSource::Kind::FeasiblePoint:
    case BoundSource::Kind::DualSolution: return sphere_from_feasible_point(inst, src.theta);
  }
  return select_default_sphere(inst);
}

// Shared setup: sphere, ρ = Bᵀq and the first halfspace.
struct FirstStage {
  Sphere sphere;
  Vector rho;
  HalfSpace h1;
  Vector sigma;
  Index i_star = -1;  // -1 when the halfspace came from a dual solution
  bool degenerate = false;  // λ_max <= 0 or r = 0: the sphere is a point
};

FirstStage first_stage(const ColumnSource& dict, const Instance& inst, const BoundSource& src) {
  require(inst.y().size() == dict.dim(), Errc::DimensionMismatch, "target length differs from feature dimension");
  FirstStage st;
  st.sphere = sphere_for(inst, src);
  if (inst.lambda_max() <= 0.0 || st.sphere.radius == 0.0) {
    st.rho = dict.correlations(st.sphere.center);
    st.degenerate = true;
    return st;
  }
  bool from_dual = false;
  if (src.kind == BoundSource::Kind::DualSolution) {
    try {
      st.h1 = halfspace_from_dual_solution(inst.y(), src.lambda0, src.theta);
      from_dual = true;
    } catch (const Error& e) {
      if (e.code() != Errc::NotApplicable) throw;
    }
  }
  if (from_dual) {
    Matrix probes(dict.dim(), 2);
    probes.col(0) = st.sphere.center;
    probes.col(1) = st.h1.normal;
    const Matrix ip = dict.inner_products(probes);
    st.rho = ip.col(0);
    st.sigma = ip.col(1);
    return st;
  }
  st.rho = dict.correlations(st.sphere.center);
  const Greedy g = greedy_argmax(inst.kind(), st.rho, dict.norms());
  st.i_star = g.index;
  st.h1 = HalfSpace::from_feature(dict.column(g.index), g.sign);
  st.sigma = dict.correlations(st.h1.normal);
  return st;
}

std::optional<Dome> try_dome(const Sphere& s, const HalfSpace& h) {
  try {
    return make_dome(s, h);
  } catch (const Error& e) {
    if (e.code() != Errc::ImproperRegion) throw;
    return std::nullopt;
  }
}

}  // namespace

std::string_view to_string(TestKind kind) noexcept {
  switch (kind) {
    case TestKind::Sphere: return "st";
    case TestKind::Dome: return "dt";
    case TestKind::TwoHyperplane: return "tht";
    case TestKind::IteratedDome: return "irdt";
    case TestKind::StrongRule: return "strong";
    case TestKind::StrongSequentialRule: return "ssr";
    case TestKind::Sis: return "sis";
  }
  return "unknown";
}

TestKind parse_test_kind(std::string_view text) {
  for (TestKind k : {TestKind::Sphere, TestKind::Dome, TestKind::TwoHyperplane, TestKind::IteratedDome,
                     TestKind::StrongRule, TestKind::StrongSequentialRule, TestKind::Sis}) {
    if (text == to_string(k)) return k;
  }
  fail(Errc::InvalidArgument, "unknown test '" + std::string(text) + "'");
}

bool TestSpec::safe() const noexcept {
  return kind != TestKind::StrongRule && kind != TestKind::StrongSequentialRule && kind != TestKind::Sis;
}

std::string TestSpec::name() const {
  std::string base(to_string(kind));
  switch (source.kind) {
    case BoundSource::Kind::Default: break;
    case BoundSource::Kind::FeasiblePoint: base += "+feasible"; break;
    case BoundSource::Kind::DualSolution: base += "+dual"; break;
  }
  if (kind == TestKind::IteratedDome) base += "(s=" + std::to_string(s_iters) + ")";
  return base;
}

double ScreenReport::rejection_fraction() const noexcept {
  return rejected_flags.empty() ? 0.0 : static_cast<double>(partition.rejected.size()) / rejected_flags.size();
}

Sphere select_default_sphere(const Instance& inst) {
  const Vector q = inst.y() / inst.lambda();
  if (inst.lambda_max() <= 0.0) return {q, 0.0};
  return {q, std::abs(1.0 / inst.lambda() - 1.0 / inst.lambda_max()) * inst.y().norm()};
}

Sphere sphere_from_feasible_point(const Instance& inst, const Vector& theta_f) {
  require(theta_f.size() == inst.y().size(), Errc::DimensionMismatch, "feasible point length differs from target");
  Vector q = inst.y() / inst.lambda();
  const double r = (theta_f - q).norm();
  return {std::move(q), r};
}

GreedyChoice select_halfspace_greedy(const ColumnSource& dict, ProblemKind kind, const Vector& q,
                                     const IndexSet& exclude) {
  const Vector rho = dict.correlations(q);
  Flags skip(static_cast<std::size_t>(dict.count()), 0);
  for (Index i : exclude) {
    require(i >= 0 && i < dict.count(), Errc::IndexOutOfRange, "excluded index out of range");
    skip[static_cast<std::size_t>(i)] = 1;
  }
  const Greedy g = greedy_argmax(kind, rho, dict.norms(), &skip);
  require(g.index >= 0, Errc::InvalidArgument, "no candidate feature left for halfspace selection");
  return {HalfSpace::from_feature(dict.column(g.index), g.sign), g.index, g.sign, g.score};
}

HalfSpace halfspace_from_dual_solution(const Vector& y0, double lambda0, const Vector& theta0) {
  require(y0.size() == theta0.size(), Errc::DimensionMismatch, "dual point length differs from target");
  require(lambda0 > 0.0, Errc::InvalidArgument, "lambda0 must be positive");
  const Vector d = y0 / lambda0 - theta0;
  const double nrm = d.norm();
  if (!(nrm > 0.0)) fail(Errc::NotApplicable, "y0/lambda0 is dual feasible; no halfspace");
  Vector n = d / nrm;
  const double c = n.dot(theta0);
  return {std::move(n), c};
}

ScreenReport sphere_test(const ColumnSource& dict, const Instance& inst, const Sphere& s, double epsilon) {
  const auto start = Clock::now();
  const Vector rho = dict.correlations(s.center);
  Flags flags(static_cast<std::size_t>(dict.count()), 0);
  sphere_flags(flags, inst.kind(), rho, dict.norms(), s.radius, epsilon);
  return finish(std::move(flags), start, "sphere");
}

ScreenReport dome_test(const ColumnSource& dict, const Instance& inst, const Dome& d, double epsilon) {
  const auto start = Clock::now();
  Matrix probes(dict.dim(), 2);
  probes.col(0) = d.sphere.center;
  probes.col(1) = d.halfspace.normal;
  const Matrix ip = dict.inner_products(probes);
  const Vector rho = ip.col(0), sigma = ip.col(1);
  Flags flags(static_cast<std::size_t>(dict.count()), 0);
  sphere_flags(flags, inst.kind(), rho, dict.norms(), d.sphere.radius, epsilon);
  dome_flags(flags, inst.kind(), rho, sigma, dict.norms(), d.sphere.radius, d.psi, epsilon);
  return finish(std::move(flags), start, "dome");
}

ScreenReport region2h_test(const ColumnSource& dict, const Instance& inst, const Region2H& g, double epsilon) {
  const auto start = Clock::now();
  Matrix probes(dict.dim(), 3);
  probes.col(0) = g.sphere.center;
  probes.col(1) = g.h1.normal;
  probes.col(2) = g.h2.normal;
  const Matrix ip = dict.inner_products(probes);
  const Vector rho = ip.col(0), sigma = ip.col(1), tau_b = ip.col(2);
  Flags flags(static_cast<std::size_t>(dict.count()), 0);
  sphere_flags(flags, inst.kind(), rho, dict.norms(), g.sphere.radius, epsilon);
  dome_flags(flags, inst.kind(), rho, sigma, dict.norms(), g.sphere.radius, g.psi1, epsilon);
  region2h_flags(flags, inst.kind(), rho, sigma, tau_b, dict.norms(), g, epsilon);
  return finish(std::move(flags), start, "sphere+2h");
}

ScreenReport dome_test(const ColumnSource& dict, const Instance& inst, const TestSpec& spec) {
  const auto start = Clock::now();
  const FirstStage st = first_stage(dict, inst, spec.source);
  Flags flags(static_cast<std::size_t>(dict.count()), 0);
  sphere_flags(flags, inst.kind(), st.rho, dict.norms(), st.sphere.radius, spec.epsilon);
  if (st.degenerate) return guarded(dict, inst, spec.source, st.rho, std::move(flags), start, "point");
  const auto dome = try_dome(st.sphere, st.h1);
  if (!dome) return guarded(dict, inst, spec.source, st.rho, std::move(flags), start, "sphere (halfspace inactive)");
  dome_flags(flags, inst.kind(), st.rho, st.sigma, dict.norms(), dome->sphere.radius, dome->psi, spec.epsilon);
  return guarded(dict, inst, spec.source, st.rho, std::move(flags), start, "dome");
}

ScreenReport tht_test(const ColumnSource& dict, const Instance& inst, const TestSpec& spec) {
  const auto start = Clock::now();
  const ProblemKind kind = inst.kind();
  const Vector& norms = dict.norms();
  const double eps = spec.epsilon;
  FirstStage st = first_stage(dict, inst, spec.source);
  Flags flags(static_cast<std::size_t>(dict.count()), 0);
  sphere_flags(flags, kind, st.rho, norms, st.sphere.radius, eps);
  if (st.degenerate) return guarded(dict, inst, spec.source, st.rho, std::move(flags), start, "point");

  const auto dome1 = try_dome(st.sphere, st.h1);
  if (dome1) dome_flags(flags, kind, st.rho, st.sigma, norms, st.sphere.radius, dome1->psi, eps);
  const bool dictionary_selected = st.i_star >= 0;
  if (dict.count() < 2 && dictionary_selected) {
    return guarded(dict, inst, spec.source, st.rho, std::move(flags), start, "dome (p < 2)");
  }

  // Second halfspace: greedy on the projection of q onto the first hyperplane.
  const double a = st.h1.normal.dot(st.sphere.center) - st.h1.offset;
  const Vector t = st.rho - a * st.sigma;
  const Greedy g2 = greedy_argmax(kind, t, norms, nullptr, dictionary_selected ? st.i_star : -1);
  const HalfSpace h2 = HalfSpace::from_feature(dict.column(g2.index), g2.sign);
  const Vector tau_b = dict.correlations(h2.normal);

  try {
    const Region2H region = make_region2h(st.sphere, st.h1, h2);
    region2h_flags(flags, kind, st.rho, st.sigma, tau_b, norms, region, eps);
      return guarded(dict, inst, spec.source, st.rho, std::move(flags), start, "sphere+2h");
  } catch (const Error& e) {
    if (e.code() != Errc::DegenerateRegion && e.code() != Errc::ImproperRegion) throw;
  }
  // Both single-halfspace domes still contain the region; use them jointly.
  if (const auto dome2 = try_dome(st.sphere, h2)) {
    dome_flags(flags, kind, st.rho, tau_b, norms, st.sphere.radius, dome2->psi, eps);
  }
  return guarded(dict, inst, spec.source, st.rho, std::move(flags), start, "dome|dome");
}

ScreenReport irdt_test(const ColumnSource& dict, const Instance& inst, int s_iters, const TestSpec& spec) {
  if (s_iters < 1) fail(Errc::DomainError, "IRDT needs at least one iteration");
  const auto start = Clock::now();
  require(inst.y().size() == dict.dim(), Errc::DimensionMismatch, "target length differs from feature dimension");
  const ProblemKind kind = inst.kind();
  const Vector& norms = dict.norms();
  const double eps = spec.epsilon;
  const Index p = dict.count();

  const Sphere s1 = sphere_for(inst, spec.source);
  std::vector<Vector> q{s1.center};
  std::vector<Vector> rho{dict.correlations(s1.center)};
  std::vector<double> r{s1.radius};
  Flags flags(static_cast<std::size_t>(p), 0);
  sphere_flags(flags, kind, rho[0], norms, r[0], eps);
  if (inst.lambda_max() <= 0.0 || r[0] == 0.0) {
    return guarded(dict, inst, spec.source, rho[0], std::move(flags), start, "point");
  }

  Flags used(static_cast<std::size_t>(p), 0);
  int domes = 0;
  for (int j1 = 0; j1 < s_iters; ++j1) {
    Flags skip(flags);
    for (std::size_t i = 0; i < skip.size(); ++i) skip[i] |= used[i];
    const Greedy h = greedy_argmax(kind, rho[j1], norms, &skip);
    if (h.index < 0 || r[j1] == 0.0) break;
    const HalfSpace hs = HalfSpace::from_feature(dict.column(h.index), h.sign);
    double psi = (pool_value(kind, rho[j1][h.index]) - 1.0) / (norms[h.index] * r[j1]);
    if (psi <= 0.0) break;
    if (psi > 1.0) {
      if (psi > 1.0 + kPsiTol) fail(Errc::EmptyRegion, "refinement halfspace misses the sphere");
      psi = 1.0;
    }
    const Vector t = dict.correlations(hs.normal);
    if (j1 + 1 < s_iters) {
      q.push_back(q[j1] - (psi * r[j1]) * hs.normal);
      rho.push_back(rho[j1] - (psi * r[j1]) * t);
      r.push_back(r[j1] * std::sqrt(std::max(0.0, 1.0 - psi * psi)));
    }
    for (int j2 = j1; j2 >= 0; --j2) {
      double psi2 = psi;
      if (j2 < j1) {
        if (r[j2] == 0.0) continue;
        psi2 = (hs.normal.dot(q[j2]) - hs.offset) / r[j2];
        if (psi2 > 1.0 + kPsiTol || psi2 < -1.0 - kPsiTol) continue;
        psi2 = std::clamp(psi2, -1.0, 1.0);
      }
      dome_flags(flags, kind, rho[j2], t, norms, r[j2], psi2, eps);
      ++domes;
    }
    used[static_cast<std::size_t>(h.index)] = 1;
  }
  return guarded(dict, inst, spec.source, rho[0], std::move(flags), start,
                 "sphere+" + std::to_string(domes) + " domes");
}

ScreenReport heuristic_test(const ColumnSource& dict, const Instance& inst, const TestSpec& spec) {
  const auto start = Clock::now();
  require(inst.y().size() == dict.dim(), Errc::DimensionMismatch, "target length differs from feature dimension");
  const ProblemKind kind = inst.kind();
  const Index p = dict.count();
  Flags flags(static_cast<std::size_t>(p), 0);

  switch (spec.kind) {
    case TestKind::StrongRule: {
      const Vector rho = dict.correlations(inst.y());
      const double thr = 2.0 * inst.lambda() - inst.lambda_max();
      for (Index i = 0; i < p; ++i) flags[static_cast<std::size_t>(i)] = pool_value(kind, rho[i]) < thr;
      return finish(std::move(flags), start, "strong rule", false);
    }
    case TestKind::StrongSequentialRule: {
      if (spec.source.kind != BoundSource::Kind::DualSolution) {
        fail(Errc::DomainError, "strong sequential rule needs a prior dual solution");
      }
      require(spec.source.lambda0 > 0.0, Errc::InvalidArgument, "lambda0 must be positive");
      const Vector rho = dict.correlations(spec.source.theta);
      const double thr = 2.0 * inst.lambda() / spec.source.lambda0 - 1.0;
      for (Index i = 0; i < p; ++i) flags[static_cast<std::size_t>(i)] = pool_value(kind, rho[i]) < thr;
      return finish(std::move(flags), start, "strong sequential rule", false);
    }
    case TestKind::Sis: {
      require(spec.gamma > 0.0 && spec.gamma < 1.0, Errc::InvalidArgument, "SIS gamma must lie in (0, 1)");
      const Vector rho = dict.correlations(inst.y());
      const Vector& norms = dict.norms();
      const Index keep = std::clamp<Index>(static_cast<Index>(std::floor(spec.gamma * dict.dim())), 1, p);
      std::vector<Index> order(static_cast<std::size_t>(p));
      std::iota(order.begin(), order.end(), Index{0});
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return pool_value(kind, rho[a]) / norms[a] > pool_value(kind, rho[b]) / norms[b];
      });
      std::fill(flags.begin(), flags.end(), 1);
      for (Index k = 0; k < keep; ++k) flags[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = 0;
      return finish(std::move(flags), start, "sis", false);
    }
    default: break;
  }
  fail(Errc::InvalidArgument, "not a heuristic test: " + spec.name());
}

ScreenReport run_test(const ColumnSource& dict, const Instance& inst, const TestSpec& spec) {
  switch (spec.kind) {
    case TestKind::Sphere: {
      const auto start = Clock::now();
      const Sphere s = sphere_for(inst, spec.source);
      const Vector rho = dict.correlations(s.center);
      Flags flags(static_cast<std::size_t>(dict.count()), 0);
      sphere_flags(flags, inst.kind(), rho, dict.norms(), s.radius, spec.epsilon);
      return guarded(dict, inst, spec.source, rho, std::move(flags), start, "sphere");
    }
    case TestKind::Dome: return dome_test(dict, inst, spec);
    case TestKind::TwoHyperplane: return tht_test(dict, inst, spec);
    case TestKind::IteratedDome: return irdt_test(dict, inst, spec.s_iters, spec);
    case TestKind::StrongRule:
    case TestKind::StrongSequentialRule:
    case TestKind::Sis: return heuristic_test(dict, inst, spec);
  }
  fail(Errc::InvalidArgument, "unknown test kind");
}

ScreenReport combine_disjunction(const std::vector<ScreenReport>& reports) {
  require(!reports.empty(), Errc::InvalidArgument, "nothing to combine");
  const auto start = Clock::now();
  const std::size_t p = reports.front().rejected_flags.size();
  Flags flags(p, 0);
  double elapsed = 0.0;
  std::string regions;
  for (const ScreenReport& rep : reports) {
    if (!rep.safe) fail(Errc::DomainError, "disjunction of unsafe tests is not safe");
    require(rep.rejected_flags.size() == p, Errc::DimensionMismatch, "reports cover different feature counts");
    for (std::size_t i = 0; i < p; ++i) flags[i] |= rep.rejected_flags[i];
    elapsed += rep.screen_seconds;
    regions += regions.empty() ? rep.regions_used : " | " + rep.regions_used;
  }
  ScreenReport out = finish(std::move(flags), start, std::move(regions));
  out.screen_seconds += elapsed;
  return out;
}

double sis_equivalent_ratio(const ColumnSource& dict, const Vector& y, double gamma) {
  require(gamma > 0.0 && gamma < 1.0, Errc::InvalidArgument, "SIS gamma must lie in (0, 1)");
  const double ynorm = y.norm();
  require(ynorm > 0.0, Errc::InvalidArgument, "target must be nonzero");
  const Vector rho = dict.correlations(y);
  std::vector<double> scores(static_cast<std::size_t>(rho.size()));
  for (Index i = 0; i < rho.size(); ++i) {
    scores[static_cast<std::size_t>(i)] = std::abs(rho[i]) / (dict.norms()[i] * ynorm);
  }
  std::sort(scores.begin(), scores.end(), std::greater<>());
  const Index keep = std::clamp<Index>(static_cast<Index>(std::floor(gamma * dict.dim())), 1, rho.size());
  const double t_gamma = scores[static_cast<std::size_t>(keep - 1)];
  return (1.0 + t_gamma) / (1.0 + scores.front());
}

}  // namespace lscreen
