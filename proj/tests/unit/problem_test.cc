#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/QR>

#include "lscreen/problem.hpp"
#include "lscreen/screening.hpp"
#include "lscreen/solver.hpp"
#include "support/oracles.hpp"

using namespace lscreen;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST(LambdaMax, IdentityColumns) {
  const Dictionary dict(Matrix::Identity(2, 2));
  auto lm = compute_lambda_max(dict, vec({0.6, 0.8}), ProblemKind::Lasso);
  EXPECT_DOUBLE_EQ(lm.value, 0.8);
  EXPECT_EQ(lm.index, 1);
  EXPECT_EQ(lm.sign, 1);

  lm = compute_lambda_max(dict, vec({-0.6, -0.8}), ProblemKind::Lasso);
  EXPECT_DOUBLE_EQ(lm.value, 0.8);
  EXPECT_EQ(lm.index, 1);
  EXPECT_EQ(lm.sign, -1);
}

TEST(LambdaMax, NonnegIgnoresNegatedFeatures) {
  const Dictionary dict(Matrix::Identity(2, 2));
  const auto lm = compute_lambda_max(dict, vec({0.6, -0.8}), ProblemKind::NonNegLasso);
  EXPECT_DOUBLE_EQ(lm.value, 0.6);
  EXPECT_EQ(lm.index, 0);
}

TEST(LambdaMax, TiesGoToLowestIndex) {
  Matrix m(2, 3);
  m << 1, 0, 1, 0, 1, 0;
  const auto lm = compute_lambda_max(Dictionary(m), vec({1.0, 1.0}), ProblemKind::Lasso);
  EXPECT_EQ(lm.index, 0);
}

TEST(LambdaMax, MatchesExhaustiveScan) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u;
  for (int rep = 0; rep < 20; ++rep) {
    Matrix m(10, 30);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
    const Vector y = oracle::random_unit(rng, 10);
    for (auto kind : {ProblemKind::Lasso, ProblemKind::NonNegLasso}) {
      const auto got = compute_lambda_max(Dictionary(m), y, kind);
      const auto want = oracle::lambda_max_scan(m, y, kind);
      EXPECT_EQ(got.value, want.value);
      EXPECT_EQ(got.index, want.index);
      EXPECT_EQ(got.sign, want.sign);
    }
  }
}

TEST(LambdaMax, DimensionMismatchThrows) {
  const Dictionary dict(Matrix::Identity(2, 2));
  try {
    compute_lambda_max(dict, Vector::Ones(3), ProblemKind::Lasso);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimensionMismatch);
  }
}

TEST(Dictionary, RejectsZeroColumn) {
  Matrix m = Matrix::Identity(3, 3);
  m.col(1).setZero();
  EXPECT_THROW(Dictionary{m}, Error);
}

TEST(Dictionary, NormsAndNormalizedFlag) {
  Matrix m(2, 2);
  m << 3, 1, 4, 0;
  const Dictionary dict(m);
  EXPECT_DOUBLE_EQ(dict.norms()[0], 5.0);
  EXPECT_FALSE(dict.normalized());
  EXPECT_TRUE(dict.normalized_copy().normalized());
}

TEST(Dictionary, FromSparseMatchesDense) {
  Eigen::SparseMatrix<double> s(3, 2);
  s.insert(0, 0) = 1.0;
  s.insert(2, 1) = -2.0;
  s.makeCompressed();
  const Dictionary dict = Dictionary::from_csc(s);
  EXPECT_DOUBLE_EQ(dict.matrix()(2, 1), -2.0);
  EXPECT_DOUBLE_EQ(dict.norms()[1], 2.0);
}

TEST(DualFromPrimal, ZeroWeights) {
  oracle::Tiny t;
  const Dictionary dict(t.B);
  const Instance inst(dict, t.y, 0.5);
  EXPECT_TRUE(dual_from_primal(dict, inst, Vector::Zero(3)).isApprox(t.y / 0.5));
}

TEST(DualFromPrimal, AboveLambdaMaxIsFeasible) {
  std::mt19937_64 rng(3);
  const Dictionary dict(oracle::random_dictionary(rng, 6, 20, false));
  const Vector y = oracle::random_gaussian(rng, 6);
  const Instance probe(dict, y, 1.0);
  const Instance inst(dict, y, 1.3 * probe.lambda_max());
  const Vector theta = dual_from_primal(dict, inst, Vector::Zero(20));
  const Vector corr = dict.correlations(theta);
  EXPECT_LE(corr.cwiseAbs().maxCoeff(), 1.0);
}

TEST(DualFromPrimal, TinyOptimum) {
  oracle::Tiny t;
  const Dictionary dict(t.B);
  const Instance inst(dict, t.y, 0.5);
  const Vector w = vec({0.5, 0.0, 0.0});
  const Vector theta = dual_from_primal(dict, inst, w);
  EXPECT_NEAR(theta[0], 1.0, 1e-15);
  EXPECT_NEAR(theta[1], 0.0, 1e-15);
  // KKT: b₁ᵀθ = sign(w₁), |b_iᵀθ| <= 1 elsewhere.
  const Vector corr = dict.correlations(theta);
  EXPECT_NEAR(corr[0], 1.0, 1e-15);
  EXPECT_LE(std::abs(corr[1]), 1.0);
  EXPECT_LE(std::abs(corr[2]), 1.0);
}

TEST(RecoverPrimal, EmptyActiveSet) {
  oracle::Tiny t;
  const Dictionary dict(t.B);
  const Instance inst(dict, t.y, 2.0);
  const auto rec = recover_primal(dict, inst, t.y / 2.0);
  EXPECT_TRUE(rec.active.empty());
  EXPECT_TRUE(rec.w.isZero());
}

TEST(RecoverPrimal, TinyInstance) {
  oracle::Tiny t;
  const Dictionary dict(t.B);
  const Instance inst(dict, t.y, 0.5);
  const auto rec = recover_primal(dict, inst, vec({1.0, 0.0}));
  ASSERT_EQ(rec.active.size(), 1u);
  EXPECT_EQ(rec.active[0], 0);
  EXPECT_NEAR(rec.w[0], 0.5, 1e-12);
  EXPECT_EQ(rec.w[1], 0.0);
  EXPECT_EQ(rec.w[2], 0.0);
  EXPECT_TRUE(rec.sign_consistent);
}

TEST(RecoverPrimal, OrthonormalSoftThreshold) {
  std::mt19937_64 rng(5);
  const Matrix q = Eigen::HouseholderQR<Matrix>(oracle::random_gaussian(rng, 36).reshaped(6, 6)).householderQ();
  const Dictionary dict(q);
  const Vector y = oracle::random_gaussian(rng, 6);
  const double lambda = 0.4;
  const Instance inst(dict, y, lambda);
  Vector w_star(6);
  for (Index i = 0; i < 6; ++i) w_star[i] = oracle::soft_threshold(q.col(i).dot(y), lambda);
  const Vector theta = (y - q * w_star) / lambda;
  const auto rec = recover_primal(dict, inst, theta);
  EXPECT_LE((rec.w - w_star).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RecoverPrimal, NonOptimalDualThrows) {
  oracle::Tiny t;
  const Dictionary dict(t.B);
  const Instance inst(dict, t.y, 0.5);
  // (1, 0.3) is tight only on b₁ yet y - λθ is not a multiple of b₁.
  try {
    recover_primal(dict, inst, vec({1.0, 0.3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InconsistentSystem);
  }
}

TEST(DualityGap, OptimalPairOnTiny) {
  oracle::Tiny t;
  const Dictionary dict(t.B);
  const Instance inst(dict, t.y, 0.5);
  EXPECT_LE(std::abs(duality_gap(dict, inst, vec({0.5, 0, 0}), vec({1.0, 0.0}))), 1e-10);
}

TEST(DualityGap, ZeroAboveLambdaMax) {
  oracle::Tiny t;
  const Dictionary dict(t.B);
  const Instance inst(dict, t.y, 1.5);
  EXPECT_EQ(duality_gap(dict, inst, Vector::Zero(3), t.y / 1.5), 0.0);
}

TEST(DualityGap, PositiveForSuboptimalPoint) {
  oracle::Tiny t;
  const Dictionary dict(t.B);
  const Instance inst(dict, t.y, 0.5);
  EXPECT_GT(duality_gap(dict, inst, Vector::Zero(3), t.y / 0.5), 0.0);
}

TEST(Sampling, SubAndUpsample) {
  const Vector w = vec({1, 2, 3});
  const IndexSet s{0, 2};
  const Vector down = subsample(w, s);
  EXPECT_EQ(down, vec({1, 3}));
  EXPECT_EQ(upsample(down, s, 3), vec({1, 0, 3}));
  const IndexSet all{0, 1, 2};
  EXPECT_EQ(subsample(w, all), w);
  EXPECT_EQ(upsample(w, all, 3), w);
  EXPECT_THROW(subsample(w, IndexSet{0, 3}), Error);
}

TEST(Sampling, SubDictionaryActsLikeFull) {
  std::mt19937_64 rng(8);
  const Dictionary dict(oracle::random_dictionary(rng, 5, 12, false));
  const IndexSet s{1, 4, 5, 9};
  Vector w = Vector::Zero(12);
  for (Index i : s) w[i] = oracle::random_gaussian(rng, 1)[0];
  const Dictionary sub = subsample(dict, s);
  EXPECT_LE((sub.apply(subsample(w, s)) - dict.apply(w)).norm(), 1e-14);
}

TEST(Partition, FlagsRoundTrip) {
  const std::vector<std::uint8_t> flags{0, 1, 1, 0};
  const Partition p = Partition::from_flags(flags);
  EXPECT_EQ(p.selected, (IndexSet{0, 3}));
  EXPECT_EQ(p.rejected, (IndexSet{1, 2}));
  EXPECT_EQ(p.to_flags(4), flags);
}

TEST(Rescale, IdentityAndRatio) {
  oracle::Tiny t;
  const Dictionary dict(t.B);
  const Instance inst(dict, t.y, 0.5);
  const auto same = rescale_instance(dict, inst, 1.0);
  EXPECT_EQ(same.inst.lambda(), inst.lambda());
  EXPECT_EQ(same.dict.matrix(), dict.matrix());

  const auto twice = rescale_instance(dict, inst, 2.0);
  EXPECT_DOUBLE_EQ(twice.inst.lambda_max(), 4.0 * inst.lambda_max());
  EXPECT_DOUBLE_EQ(twice.inst.ratio(), inst.ratio());
  EXPECT_THROW(rescale_instance(dict, inst, 0.0), Error);
}

TEST(Rescale, DefaultTestFlagsUnchanged) {
  std::mt19937_64 rng(21);
  const Dictionary dict(oracle::random_dictionary(rng, 10, 80, false));
  const Vector y = oracle::random_gaussian(rng, 10);
  const Instance inst = Instance::from_ratio(dict, y, 0.6);
  for (double alpha : {0.37, 0.1, 3.7}) {
    const auto scaled = rescale_instance(dict, inst, alpha);
    for (auto kind : {TestKind::Sphere, TestKind::Dome, TestKind::TwoHyperplane}) {
      TestSpec spec;
      spec.kind = kind;
      EXPECT_EQ(run_test(dict, inst, spec).rejected_flags, run_test(scaled.dict, scaled.inst, spec).rejected_flags)
          << "alpha " << alpha << " " << spec.name();
    }
  }
}

TEST(DualGeometry, ProjectionCharacterization) {
  std::mt19937_64 rng(31);
  const Dictionary dict(oracle::random_dictionary(rng, 8, 40, true));
  const Vector y = oracle::random_unit(rng, 8);
  const Instance inst = Instance::from_ratio(dict, y, 0.4);
  const Solution sol = oracle::reference_solve(dict, inst);
  const Vector q = y / inst.lambda();
  int checked = 0;
  while (checked < 1000) {
    const Vector theta = scale_to_feasible(dict, inst.kind(), oracle::random_gaussian(rng, 8, 2.0));
    EXPECT_LE((q - sol.theta).dot(theta - sol.theta), 1e-8);
    // -θ is feasible too for the lasso.
    EXPECT_LE(dict.correlations(-theta).cwiseAbs().maxCoeff(), 1.0 + 1e-12);
    ++checked;
  }
}
