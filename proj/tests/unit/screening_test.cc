#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "lscreen/screening.hpp"
#include "lscreen/solver.hpp"
#include "support/oracles.hpp"

using namespace lscreen;

namespace {

using Flags = std::vector<std::uint8_t>;

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

TestSpec spec_of(TestKind kind) {
  TestSpec s;
  s.kind = kind;
  return s;
}

struct Random {
  Dictionary dict;
  Vector y;
};

Random random_problem(std::uint64_t seed, Index n, Index p, bool unit) {
  std::mt19937_64 rng(seed);
  Dictionary dict(oracle::random_dictionary(rng, n, p, unit));
  Vector y = unit ? oracle::random_unit(rng, n) : oracle::random_gaussian(rng, n);
  return {std::move(dict), std::move(y)};
}

}  // namespace

TEST(SphereTest, Examples) {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  const Dictionary dict(m);
  const Instance inst(dict, v2(1, 0), 0.5);
  const auto rep = sphere_test(dict, inst, {v2(2, 0), 0.5});
  EXPECT_EQ(rep.rejected_flags, (Flags{1, 0}));
}

TEST(SphereTest, LargeRadiusRejectsNothing) {
  const auto rp = random_problem(1, 5, 30, false);
  const Instance inst = Instance::from_ratio(rp.dict, rp.y, 0.5);
  const double r = 1.0 / rp.dict.norms().minCoeff();
  EXPECT_EQ(sphere_test(rp.dict, inst, {rp.y / inst.lambda(), r}).rejected_count(), 0);
}

TEST(SphereTest, TinyDefaultRejectsNothing) {
  oracle::Tiny t;
  const Dictionary dict(t.B);
  const Instance inst(dict, t.y, 0.5);
  EXPECT_EQ(run_test(dict, inst, spec_of(TestKind::Sphere)).rejected_count(), 0);
}

TEST(SphereTest, NonnegOnlyUpperThreshold) {
  Matrix m(2, 2);
  m << 0, -1, 1, 0;
  const Dictionary dict(m);
  const Instance lasso(dict, v2(1, 0), 0.5, ProblemKind::Lasso);
  const Instance nonneg(dict, v2(1, 0), 0.5, ProblemKind::NonNegLasso);
  const Sphere s{v2(2, 0), 0.5};
  EXPECT_EQ(sphere_test(dict, lasso, s).rejected_flags, (Flags{1, 0}));
  EXPECT_EQ(sphere_test(dict, nonneg, s).rejected_flags, (Flags{1, 1}));
}

TEST(DefaultSphere, Examples) {
  oracle::Tiny t;
  const Dictionary dict(t.B);
  const Sphere s = select_default_sphere(Instance(dict, t.y, 0.5));
  EXPECT_EQ(s.center, v2(2, 0));
  EXPECT_DOUBLE_EQ(s.radius, 1.0);
  EXPECT_EQ(select_default_sphere(Instance(dict, t.y, 1.0)).radius, 0.0);
}

TEST(DefaultSphere, FeasiblePointAtLambdaMaxMatches) {
  const auto rp = random_problem(2, 6, 40, false);
  const Instance inst = Instance::from_ratio(rp.dict, rp.y, 0.4);
  const Sphere d = select_default_sphere(inst);
  const Sphere f = sphere_from_feasible_point(inst, rp.y / inst.lambda_max());
  EXPECT_NEAR(f.radius, d.radius, 1e-12);
  EXPECT_LE(f.radius, d.radius + 1e-12);
}

TEST(GreedyHalfspace, UnitNormsPickLambdaMaxFeature) {
  const auto rp = random_problem(3, 8, 60, true);
  const Instance inst = Instance::from_ratio(rp.dict, rp.y, 0.5);
  const auto g = select_halfspace_greedy(rp.dict, ProblemKind::Lasso, rp.y / inst.lambda());
  EXPECT_EQ(g.index, inst.lambda_max_info().index);
  EXPECT_EQ(g.sign, inst.lambda_max_info().sign);
}

TEST(GreedyHalfspace, MatchesBruteForceWithExclusion) {
  const auto rp = random_problem(4, 7, 50, false);
  const Vector q = 3.0 * rp.y;
  for (auto kind : {ProblemKind::Lasso, ProblemKind::NonNegLasso}) {
    auto best = [&](Index skip) {
      Index arg = -1;
      double val = -1e300;
      for (Index i = 0; i < rp.dict.count(); ++i) {
        if (i == skip) continue;
        const double z = rp.dict.matrix().col(i).dot(q);
        const double score = ((kind == ProblemKind::Lasso ? std::abs(z) : z) - 1.0) / rp.dict.norms()[i];
        if (score > val) {
          val = score;
          arg = i;
        }
      }
      return arg;
    };
    const auto first = select_halfspace_greedy(rp.dict, kind, q);
    EXPECT_EQ(first.index, best(-1));
    const auto second = select_halfspace_greedy(rp.dict, kind, q, {first.index});
    EXPECT_EQ(second.index, best(first.index));
    EXPECT_NEAR(second.halfspace.offset, 1.0 / rp.dict.norms()[second.index], 1e-15);
  }
}

TEST(GreedyHalfspace, EmptyCandidateSetThrows) {
  const Dictionary dict(Matrix::Identity(2, 2));
  EXPECT_THROW(select_halfspace_greedy(dict, ProblemKind::Lasso, v2(1, 1), {0, 1}), Error);
}

TEST(DualHalfspace, TinyInstance) {
  oracle::Tiny t;
  const HalfSpace h = halfspace_from_dual_solution(t.y, 0.5, v2(1, 0));
  EXPECT_EQ(h.normal, v2(1, 0));
  EXPECT_DOUBLE_EQ(h.offset, 1.0);
  try {
    halfspace_from_dual_solution(t.y, 2.0, t.y / 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotApplicable);
  }
}

TEST(DualHalfspace, BoundsSampledFeasiblePoints) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    const auto rp = random_problem(100 + rep, 6, 30, false);
    const Instance inst = Instance::from_ratio(rp.dict, rp.y, 0.3);
    const Solution sol = oracle::reference_solve(rp.dict, inst);
    const HalfSpace h = halfspace_from_dual_solution(rp.y, inst.lambda(), sol.theta);
    EXPECT_GE(h.offset, 0.0);
    for (int k = 0; k < 500; ++k) {
      const Vector theta = scale_to_feasible(rp.dict, inst.kind(), oracle::random_gaussian(rng, 6, 3.0));
      ASSERT_LE(h.normal.dot(theta), h.offset + 1e-9);
    }
  }
}

TEST(DomeTest, TinyDefaultRejectsTwoAndThree) {
  oracle::Tiny t;
  const Dictionary dict(t.B);
  const Instance inst(dict, t.y, 0.5);
  const auto rep = run_test(dict, inst, spec_of(TestKind::Dome));
  EXPECT_EQ(rep.rejected_flags, (Flags{0, 1, 1}));
  const Solution sol = solve_lasso(dict, inst);
  EXPECT_NEAR(sol.w[0], 0.5, 1e-12);
  EXPECT_TRUE(oracle::false_rejections(rep, dict, inst.kind(), sol).empty());
}

TEST(DomeTest, ImproperLimitMatchesSphere) {
  const auto rp = random_problem(6, 8, 100, true);
  const Instance inst = Instance::from_ratio(rp.dict, rp.y, 0.7);
  const Sphere s = select_default_sphere(inst);
  std::mt19937_64 rng(6);
  const Vector n = oracle::random_unit(rng, 8);
  const Dome d = make_dome(s, HalfSpace::make(n, n.dot(s.center) + s.radius));
  EXPECT_EQ(dome_test(rp.dict, inst, d).rejected_flags, sphere_test(rp.dict, inst, s).rejected_flags);
}

TEST(DomeTest, ContainsSphereRejections) {
  const auto rp = random_problem(7, 10, 300, true);
  const Instance inst = Instance::from_ratio(rp.dict, rp.y, 0.7);
  const auto st = run_test(rp.dict, inst, spec_of(TestKind::Sphere));
  const auto dt = run_test(rp.dict, inst, spec_of(TestKind::Dome));
  EXPECT_TRUE(oracle::subset(st.rejected_flags, dt.rejected_flags));
}

TEST(ThtTest, TinyInstance) {
  oracle::Tiny t;
  const Dictionary dict(t.B);
  const Instance inst = Instance::from_ratio(dict, t.y, 0.5);
  EXPECT_EQ(run_test(dict, inst, spec_of(TestKind::TwoHyperplane)).rejected_flags, (Flags{0, 1, 1}));
}

TEST(ThtTest, PointRegionGivesIdealPartition) {
  const auto rp = random_problem(8, 10, 200, false);
  const Instance probe(rp.dict, rp.y, 1.0);
  const Instance inst = probe.with_lambda(probe.lambda_max());
  TestSpec spec = spec_of(TestKind::TwoHyperplane);
  spec.source = BoundSource::feasible_point(rp.y / inst.lambda_max());
  const auto rep = run_test(rp.dict, inst, spec);
  const Vector corr = rp.dict.correlations(rp.y / inst.lambda_max());
  for (Index i = 0; i < rp.dict.count(); ++i) {
    EXPECT_EQ(rep.rejected_flags[static_cast<std::size_t>(i)], std::abs(corr[i]) < 1.0 ? 1 : 0) << i;
  }
}

TEST(ThtTest, OrderingOnRandomInstance) {
  const auto rp = random_problem(9, 50, 500, true);
  const Instance inst = Instance::from_ratio(rp.dict, rp.y, 0.5);
  const auto st = run_test(rp.dict, inst, spec_of(TestKind::Sphere));
  const auto dt = run_test(rp.dict, inst, spec_of(TestKind::Dome));
  const auto tht = run_test(rp.dict, inst, spec_of(TestKind::TwoHyperplane));
  EXPECT_GE(tht.rejected_count(), dt.rejected_count());
  EXPECT_GE(dt.rejected_count(), st.rejected_count());
  EXPECT_TRUE(oracle::subset(st.rejected_flags, dt.rejected_flags));
  EXPECT_TRUE(oracle::subset(dt.rejected_flags, tht.rejected_flags));
}

TEST(ThtTest, SingleFeatureFallsBackToDome) {
  Matrix m(2, 1);
  m << 1, 0;
  const Dictionary dict(m);
  const Instance inst = Instance::from_ratio(dict, v2(0.6, 0.8), 0.5);
  EXPECT_EQ(run_test(dict, inst, spec_of(TestKind::TwoHyperplane)).rejected_flags,
            run_test(dict, inst, spec_of(TestKind::Dome)).rejected_flags);
}

TEST(ThtTest, DualSolutionSourceIsSafe) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto rp = random_problem(200 + seed, 15, 150, false);
    const Instance prev = Instance::from_ratio(rp.dict, rp.y, 0.5);
    const Solution s0 = oracle::reference_solve(rp.dict, prev);
    const Instance inst = prev.with_lambda(0.4 * prev.lambda_max());
    const Solution ref = oracle::reference_solve(rp.dict, inst);
    for (auto kind : {TestKind::Dome, TestKind::TwoHyperplane, TestKind::IteratedDome}) {
      TestSpec spec = spec_of(kind);
      spec.source = BoundSource::dual_solution(prev.lambda(), s0.theta);
      const auto rep = run_test(rp.dict, inst, spec);
      EXPECT_TRUE(oracle::false_rejections(rep, rp.dict, inst.kind(), ref).empty()) << spec.name() << " seed " << seed;
    }
  }
}

TEST(IrdtTest, SingleIterationEqualsDome) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto rp = random_problem(300 + seed, 12, 200, true);
    const Instance inst = Instance::from_ratio(rp.dict, rp.y, 0.6);
    TestSpec spec = spec_of(TestKind::IteratedDome);
    spec.s_iters = 1;
    EXPECT_EQ(run_test(rp.dict, inst, spec).rejected_flags,
              run_test(rp.dict, inst, spec_of(TestKind::Dome)).rejected_flags);
  }
}

TEST(IrdtTest, TinyInstance) {
  oracle::Tiny t;
  const Dictionary dict(t.B);
  const Instance inst = Instance::from_ratio(dict, t.y, 0.5);
  const auto rep = run_test(dict, inst, spec_of(TestKind::IteratedDome));
  EXPECT_EQ(rep.rejected_flags, (Flags{0, 1, 1}));
  // The first dome is the point (1, 0); nothing refinable is left after it.
  EXPECT_EQ(rep.regions_used, "sphere+1 domes");
}

TEST(IrdtTest, ContainsSphereRejections) {
  const auto rp = random_problem(10, 20, 400, true);
  const Instance inst = Instance::from_ratio(rp.dict, rp.y, 0.4);
  EXPECT_TRUE(oracle::subset(run_test(rp.dict, inst, spec_of(TestKind::Sphere)).rejected_flags,
                             run_test(rp.dict, inst, spec_of(TestKind::IteratedDome)).rejected_flags));
}

TEST(IrdtTest, ZeroIterationsIsDomainError) {
  oracle::Tiny t;
  const Dictionary dict(t.B);
  const Instance inst(dict, t.y, 0.5);
  TestSpec spec = spec_of(TestKind::IteratedDome);
  spec.s_iters = 0;
  try {
    run_test(dict, inst, spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DomainError);
  }
}

TEST(Heuristics, StrongRule) {
  oracle::Tiny t;
  const Dictionary dict(t.B);
  const auto rep = run_test(dict, Instance(dict, t.y, 0.9), spec_of(TestKind::StrongRule));
  EXPECT_EQ(rep.rejected_flags, (Flags{0, 1, 1}));
  EXPECT_FALSE(rep.safe);
  // 2λ - λ_max <= 0: nothing is rejected.
  EXPECT_EQ(run_test(dict, Instance(dict, t.y, 0.4), spec_of(TestKind::StrongRule)).rejected_count(), 0);
}

TEST(Heuristics, SsrNeedsPriorSolution) {
  oracle::Tiny t;
  const Dictionary dict(t.B);
  try {
    run_test(dict, Instance(dict, t.y, 0.5), spec_of(TestKind::StrongSequentialRule));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DomainError);
  }
}

TEST(Heuristics, SsrThreshold) {
  oracle::Tiny t;
  const Dictionary dict(t.B);
  TestSpec spec = spec_of(TestKind::StrongSequentialRule);
  spec.source = BoundSource::dual_solution(1.0, t.y);
  // |b_iᵀθ₀| < 2·0.9/1 - 1 = 0.8.
  EXPECT_EQ(run_test(dict, Instance(dict, t.y, 0.9), spec).rejected_flags, (Flags{0, 1, 1}));
}

TEST(Heuristics, SisKeepsTopFeatures) {
  const auto rp = random_problem(11, 20, 100, true);
  const Instance inst = Instance::from_ratio(rp.dict, rp.y, 0.5);
  TestSpec spec = spec_of(TestKind::Sis);
  spec.gamma = 0.25;
  const auto rep = run_test(rp.dict, inst, spec);
  EXPECT_EQ(rep.partition.selected.size(), 5u);
  const Vector corr = rp.dict.correlations(rp.y).cwiseAbs();
  double kept_min = 1e300, dropped_max = -1e300;
  for (Index i : rep.partition.selected) kept_min = std::min(kept_min, corr[i]);
  for (Index i : rep.partition.rejected) dropped_max = std::max(dropped_max, corr[i]);
  EXPECT_GE(kept_min, dropped_max);
  EXPECT_FALSE(rep.safe);
}

TEST(Heuristics, SisEquivalentRatio) {
  const auto rp = random_problem(12, 20, 100, true);
  const double ratio = sis_equivalent_ratio(rp.dict, rp.y, 0.25);
  const Vector corr = rp.dict.correlations(rp.y).cwiseAbs();
  std::vector<double> sorted(corr.data(), corr.data() + corr.size());
  std::sort(sorted.rbegin(), sorted.rend());
  EXPECT_NEAR(ratio, (1.0 + sorted[4]) / (1.0 + sorted[0]), 1e-15);
}

TEST(Disjunction, Identities) {
  const auto rp = random_problem(13, 10, 200, true);
  const Instance inst = Instance::from_ratio(rp.dict, rp.y, 0.6);
  const auto st = run_test(rp.dict, inst, spec_of(TestKind::Sphere));
  const auto dt = run_test(rp.dict, inst, spec_of(TestKind::Dome));
  EXPECT_EQ(combine_disjunction({dt, dt}).rejected_flags, dt.rejected_flags);
  EXPECT_EQ(combine_disjunction({st, dt}).rejected_flags, dt.rejected_flags);
  const auto strong = run_test(rp.dict, inst, spec_of(TestKind::StrongRule));
  try {
    combine_disjunction({st, strong});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DomainError);
  }
}

TEST(Disjunction, WeakerThanIntersection) {
  // Two domes on the same sphere versus the region cut by both halfspaces:
  // whatever either dome rejects, the intersection rejects too, and the
  // support values agree: μ_{D1∩D2} <= min(μ_D1, μ_D2).
  const auto rp = random_problem(14, 12, 250, true);
  const Instance inst = Instance::from_ratio(rp.dict, rp.y, 0.5);
  const Sphere s = select_default_sphere(inst);
  const auto g1 = select_halfspace_greedy(rp.dict, inst.kind(), s.center);
  const auto g2 = select_halfspace_greedy(rp.dict, inst.kind(), s.center, {g1.index});
  const Dome d1 = make_dome(s, g1.halfspace), d2 = make_dome(s, g2.halfspace);
  const Region2H g = make_region2h(s, g1.halfspace, g2.halfspace);
  const auto either = combine_disjunction({dome_test(rp.dict, inst, d1), dome_test(rp.dict, inst, d2)});
  const auto both = region2h_test(rp.dict, inst, g);
  EXPECT_TRUE(oracle::subset(either.rejected_flags, both.rejected_flags));
  for (Index i = 0; i < rp.dict.count(); ++i) {
    const Vector b = rp.dict.column(i);
    EXPECT_LE(mu_region2h(g, b), std::min(mu_dome(d1, b), mu_dome(d2, b)) + 1e-9);
  }
}

TEST(Determinism, ThreadCountDoesNotChangeFlags) {
  const auto rp = random_problem(15, 20, 9000, true);
  const Instance inst = Instance::from_ratio(rp.dict, rp.y, 0.5);
  std::vector<Flags> runs;
  for (const char* threads : {"1", "3", "8"}) {
    setenv("LS_THREADS", threads, 1);
    runs.push_back(run_test(rp.dict, inst, spec_of(TestKind::TwoHyperplane)).rejected_flags);
  }
  unsetenv("LS_THREADS");
  EXPECT_EQ(runs[0], runs[1]);
  EXPECT_EQ(runs[0], runs[2]);
}

TEST(TestSpec, NamesAndSafety) {
  EXPECT_EQ(parse_test_kind("tht"), TestKind::TwoHyperplane);
  EXPECT_THROW(parse_test_kind("nope"), Error);
  EXPECT_TRUE(spec_of(TestKind::IteratedDome).safe());
  EXPECT_FALSE(spec_of(TestKind::Sis).safe());
  EXPECT_EQ(spec_of(TestKind::IteratedDome).name(), "irdt(s=5)");
}

TEST(Safety, EpsilonMarginOnlyShrinksRejections) {
  const auto rp = random_problem(16, 10, 300, true);
  const Instance inst = Instance::from_ratio(rp.dict, rp.y, 0.5);
  TestSpec loose = spec_of(TestKind::TwoHyperplane), strict = loose;
  strict.epsilon = 1e-3;
  EXPECT_TRUE(oracle::subset(run_test(rp.dict, inst, strict).rejected_flags,
                             run_test(rp.dict, inst, loose).rejected_flags));
}
