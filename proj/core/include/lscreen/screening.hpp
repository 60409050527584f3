#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lscreen/geometry.hpp"
#include "lscreen/problem.hpp"

namespace lscreen {

enum class TestKind {
  Sphere,
  Dome,
  TwoHyperplane,
  IteratedDome,
  StrongRule,
  StrongSequentialRule,
  Sis,
};

std::string_view to_string(TestKind kind) noexcept;
/// Accepts the CLI spellings: st, dt, tht, irdt, strong, ssr, sis.
TestKind parse_test_kind(std::string_view text);

/// Where the bounding sphere (and, for a dual solution, the first halfspace)
/// comes from.
struct BoundSource {
  enum class Kind { Default, FeasiblePoint, DualSolution };
  Kind kind = Kind::Default;
  Vector theta;         // θ_F, or θ₀ of the dual solution
  double lambda0 = 0.0;  // λ₀ of the dual solution

  static BoundSource default_source() { return {}; }
  static BoundSource feasible_point(Vector theta) { return {Kind::FeasiblePoint, std::move(theta), 0.0}; }
  static BoundSource dual_solution(double lambda0, Vector theta0) {
    return {Kind::DualSolution, std::move(theta0), lambda0};
  }
};

struct TestSpec {
  TestKind kind = TestKind::Sphere;
  BoundSource source;
  /// Safety margin: reject only if the test value clears its threshold by ε.
  double epsilon = 0.0;
  int s_iters = 5;
  double gamma = 0.1;

  bool safe() const noexcept;
  std::string name() const;
};

struct ScreenReport {
  Partition partition;
  std::vector<std::uint8_t> rejected_flags;
  double screen_seconds = 0.0;
  std::string regions_used;
  bool safe = true;

  Index count() const noexcept { return static_cast<Index>(rejected_flags.size()); }
  Index rejected_count() const noexcept { return static_cast<Index>(partition.rejected.size()); }
  double rejection_fraction() const noexcept;
};

/// Center y/λ, radius |1/λ - 1/λ_max|·‖y‖ (0 when λ_max <= 0: y/λ is then
/// itself dual feasible and optimal).
Sphere select_default_sphere(const Instance& inst);
/// Center y/λ, radius ‖θ_F - y/λ‖.
Sphere sphere_from_feasible_point(const Instance& inst, const Vector& theta_f);

struct GreedyChoice {
  HalfSpace halfspace;
  Index index = 0;
  int sign = 1;
  /// (f(bᵀq) - 1)/‖b‖ at the winner.
  double score = 0.0;
};

/// Feature maximizing (f(b_iᵀq) - 1)/‖b_i‖ outside `exclude`; ties go to the
/// lowest index. Throws InvalidArgument when every feature is excluded.
GreedyChoice select_halfspace_greedy(const ColumnSource& dict, ProblemKind kind, const Vector& q,
                                     const IndexSet& exclude = {});

/// n₀ = (y₀/λ₀ - θ₀)/‖·‖, c₀ = n₀ᵀθ₀. NotApplicable when y₀/λ₀ = θ₀.
HalfSpace halfspace_from_dual_solution(const Vector& y0, double lambda0, const Vector& theta0);

ScreenReport sphere_test(const ColumnSource& dict, const Instance& inst, const Sphere& s, double epsilon = 0.0);
ScreenReport dome_test(const ColumnSource& dict, const Instance& inst, const Dome& d, double epsilon = 0.0);
/// Sphere ∩ {h1} ∩ {h2}. Rejections include those of the dome on h1.
ScreenReport region2h_test(const ColumnSource& dict, const Instance& inst, const Region2H& g,
                           double epsilon = 0.0);

/// DT: the sphere of `source` with the dual-solution halfspace, or the
/// greedy feature halfspace.
ScreenReport dome_test(const ColumnSource& dict, const Instance& inst, const TestSpec& spec);
ScreenReport tht_test(const ColumnSource& dict, const Instance& inst, const TestSpec& spec);
ScreenReport irdt_test(const ColumnSource& dict, const Instance& inst, int s_iters, const TestSpec& spec);

/// Strong Rule, Strong Sequential Rule (needs a DualSolution source) and SIS.
/// Never safe.
ScreenReport heuristic_test(const ColumnSource& dict, const Instance& inst, const TestSpec& spec);

/// Runs whichever test `spec.kind` names.
ScreenReport run_test(const ColumnSource& dict, const Instance& inst, const TestSpec& spec);

/// Feature rejected iff any report rejects it. All reports must be safe.
ScreenReport combine_disjunction(const std::vector<ScreenReport>& reports);

/// λ/λ_max at which SIS with parameter γ coincides with the default sphere
/// test: (1 + t_γ)/(1 + λ_max) on unit-norm data.
double sis_equivalent_ratio(const ColumnSource& dict, const Vector& y, double gamma);

}  // namespace lscreen
