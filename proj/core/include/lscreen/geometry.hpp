#pragma once

#include "lscreen/problem.hpp"

namespace lscreen {

/// Tolerance on ψ ∈ [-1, 1]; values within it are clamped to the boundary.
inline constexpr double kPsiTol = 1e-12;
/// Slack allowed on the two-halfspace intersection condition.
inline constexpr double kAngleTol = 1e-10;

/// Closed ball {θ : ‖θ - center‖ <= radius}.
struct Sphere {
  Vector center;
  double radius = 0.0;
};

/// Closed halfspace {θ : normalᵀθ <= offset} with a unit normal.
struct HalfSpace {
  Vector normal;
  double offset = 0.0;

  /// Validates ‖normal‖ = 1 within 1e-12.
  static HalfSpace make(Vector normal, double offset);
  /// The dual constraint (sign·b)ᵀθ <= 1 as n = sign·b/‖b‖, c = 1/‖b‖.
  static HalfSpace from_feature(const Vector& b, int sign = 1);
};

/// Sphere ∩ halfspace. The dome center q_d lies on the hyperplane, at signed
/// distance ψ·r from the sphere center along -n.
struct Dome {
  Sphere sphere;
  HalfSpace halfspace;
  double psi = 0.0;
  Vector center;
  double radius = 0.0;
};

/// Sphere ∩ two halfspaces, with ψ_i = (n_iᵀq - c_i)/r and τ = n₁ᵀn₂.
struct Region2H {
  Sphere sphere;
  HalfSpace h1;
  HalfSpace h2;
  double psi1 = 0.0;
  double psi2 = 0.0;
  double tau = 0.0;
};

/// Which closed-form piece of the two-halfspace support function applied.
enum class Region2HBranch { SphereOnly, SecondFace, FirstFace, Edge };

struct Region2HSupport {
  double value = 0.0;
  Region2HBranch branch = Region2HBranch::SphereOnly;
};

/// ψ = (nᵀq - c)/r without validation (±inf when r = 0).
double signed_fraction(const Sphere& s, const HalfSpace& h);

/// μ(b) = qᵀb + r‖b‖.
double mu_sphere(const Sphere& s, const Vector& b);

/// Throws EmptyRegion when ψ > 1 and ImproperRegion when ψ < -1 (the
/// halfspace does not cut the sphere; callers fall back to the sphere).
Dome make_dome(const Sphere& s, const HalfSpace& h);

/// Dome support offset M₁(t₁, t₂) for t₁ = nᵀb, t₂ = ‖b‖; μ(b) = qᵀb + M₁.
double dome_support_offset(double radius, double psi, double t1, double t2);
double mu_dome(const Dome& d, const Vector& b);

/// Validates |ψ_i| <= 1, |τ| < 1 and that the two bounding hyperplanes meet
/// inside the sphere. Throws EmptyRegion, ImproperRegion or DegenerateRegion.
Region2H make_region2h(const Sphere& s, const HalfSpace& h1, const HalfSpace& h2);

/// Two-halfspace support offset M₂(t₁, t₂, t₃) for t_i = n_iᵀb, t₃ = ‖b‖.
Region2HSupport region2h_support_offset(double radius, double psi1, double psi2, double tau, double t1,
                                        double t2, double t3);
double mu_region2h(const Region2H& g, const Vector& b);

/// Circumsphere of the dome, Sphere(q_d, r_d); requires 0 < ψ <= 1.
Sphere circumsphere_refine(const Sphere& s, const HalfSpace& h);

/// 2·r_d when the sphere center is outside the dome (ψ > 0), else 2·r.
double dome_diameter(const Dome& d);

/// Diameter of the sequential dome built at λ_k from the solved instance at
/// λ_{k-1} with normal n: 2(1/λ_k - 1/λ_{k-1})·sqrt(yᵀ(I - nnᵀ)y).
double sequential_dome_diameter(double lambda_k, double lambda_prev, const Vector& y, const Vector& n);

}  // namespace lscreen
