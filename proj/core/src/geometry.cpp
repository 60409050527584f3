#include "lscreen/geometry.hpp"

#include <cmath>
#include <limits>

namespace lscreen {
namespace {

double clamp_psi(double psi) {
  if (psi > 1.0 && psi <= 1.0 + kPsiTol) return 1.0;
  if (psi < -1.0 && psi >= -1.0 - kPsiTol) return -1.0;
  return psi;
}

// sqrt of a radicand that is nonnegative in exact arithmetic.
double safe_sqrt(double radicand, double scale, const char* what) {
  if (radicand >= 0.0) return std::sqrt(radicand);
  if (radicand >= -1e-12 * std::max(1.0, scale)) return 0.0;
  fail(Errc::InvariantViolation, what);
}

}  // namespace

HalfSpace HalfSpace::make(Vector normal, double offset) {
  require(std::abs(normal.norm() - 1.0) <= 1e-12, Errc::InvalidArgument, "halfspace normal must have unit norm");
  return {std::move(normal), offset};
}

HalfSpace HalfSpace::from_feature(const Vector& b, int sign) {
  const double nrm = b.norm();
  require(nrm > 0.0, Errc::InvalidArgument, "feature must be nonzero");
  return {(static_cast<double>(sign) / nrm) * b, 1.0 / nrm};
}

double signed_fraction(const Sphere& s, const HalfSpace& h) {
  require(s.center.size() == h.normal.size(), Errc::DimensionMismatch, "sphere and halfspace dimensions differ");
  const double num = h.normal.dot(s.center) - h.offset;
  if (s.radius > 0.0) return num / s.radius;
  if (num > 0.0) return std::numeric_limits<double>::infinity();
  return -std::numeric_limits<double>::infinity();
}

double mu_sphere(const Sphere& s, const Vector& b) {
  require(s.center.size() == b.size(), Errc::DimensionMismatch, "sphere and vector dimensions differ");
  return s.center.dot(b) + s.radius * b.norm();
}

Dome make_dome(const Sphere& s, const HalfSpace& h) {
  const double psi = clamp_psi(signed_fraction(s, h));
  if (psi > 1.0) fail(Errc::EmptyRegion, "halfspace misses the sphere (psi > 1)");
  if (psi < -1.0) fail(Errc::ImproperRegion, "halfspace contains the sphere (psi < -1)");
  Dome d{s, h, psi, s.center - (psi * s.radius) * h.normal, s.radius * std::sqrt(std::max(0.0, 1.0 - psi * psi))};
  return d;
}

double dome_support_offset(double radius, double psi, double t1, double t2) {
  if (t1 < -psi * t2) return radius * t2;
  return -psi * radius * t1 + radius * std::sqrt(std::max(0.0, t2 * t2 - t1 * t1)) *
                                  std::sqrt(std::max(0.0, 1.0 - psi * psi));
}

double mu_dome(const Dome& d, const Vector& b) {
  require(d.sphere.center.size() == b.size(), Errc::DimensionMismatch, "dome and vector dimensions differ");
  return d.sphere.center.dot(b) + dome_support_offset(d.sphere.radius, d.psi, d.halfspace.normal.dot(b), b.norm());
}

Region2H make_region2h(const Sphere& s, const HalfSpace& h1, const HalfSpace& h2) {
  if (!(s.radius > 0.0)) fail(Errc::DegenerateRegion, "zero-radius sphere");
  const double tau = h1.normal.dot(h2.normal);
  if (std::abs(tau) >= 1.0 - 1e-12) fail(Errc::DegenerateRegion, "parallel halfspace normals");
  const double psi1 = clamp_psi(signed_fraction(s, h1));
  const double psi2 = clamp_psi(signed_fraction(s, h2));
  if (psi1 > 1.0 || psi2 > 1.0) fail(Errc::EmptyRegion, "a halfspace misses the sphere");
  if (psi1 < -1.0 || psi2 < -1.0) fail(Errc::ImproperRegion, "a halfspace contains the sphere");
  // The bounding hyperplanes must cross inside the ball: the angular caps
  // arccos ψ_i must reach each other, and their intersection line must meet
  // the ball (Gram determinant of n₁, n₂ and the ψ's nonnegative).
  const double a1 = std::acos(psi1), a2 = std::acos(psi2), g = std::acos(tau);
  if (a1 + a2 < g - kAngleTol) fail(Errc::DegenerateRegion, "halfspaces do not intersect within the sphere");
  const double gram = 1.0 - tau * tau + 2.0 * tau * psi1 * psi2 - psi1 * psi1 - psi2 * psi2;
  if (gram < -kAngleTol) fail(Errc::DegenerateRegion, "hyperplane intersection misses the sphere");
  return {s, h1, h2, psi1, psi2, tau};
}

Region2HSupport region2h_support_offset(double radius, double psi1, double psi2, double tau, double t1,
                                        double t2, double t3) {
  if (!(t3 > 0.0)) return {0.0, Region2HBranch::SphereOnly};
  const double s1 = std::sqrt(std::max(0.0, 1.0 - psi1 * psi1));
  const double s2 = std::sqrt(std::max(0.0, 1.0 - psi2 * psi2));
  const double u1 = std::sqrt(std::max(0.0, t3 * t3 - t1 * t1));
  const double u2 = std::sqrt(std::max(0.0, t3 * t3 - t2 * t2));

  if (t1 < -psi1 * t3 && t2 < -psi2 * t3) return {radius * t3, Region2HBranch::SphereOnly};
  // Ratio conditions multiplied through by the (nonnegative) square roots.
  if (t2 >= -psi2 * t3 && (t1 - tau * t2) * s2 < (-psi1 + tau * psi2) * u2) {
    return {-radius * t2 * psi2 + radius * u2 * s2, Region2HBranch::SecondFace};
  }
  if (t1 >= -psi1 * t3 && (t2 - tau * t1) * s1 < (-psi2 + tau * psi1) * u1) {
    return {-radius * t1 * psi1 + radius * u1 * s1, Region2HBranch::FirstFace};
  }
  const double det = 1.0 - tau * tau;
  const double h_psi = safe_sqrt(det + 2.0 * tau * psi1 * psi2 - psi1 * psi1 - psi2 * psi2, 1.0,
                                 "negative two-halfspace radicand (psi)");
  const double h_t = safe_sqrt(det * t3 * t3 + 2.0 * tau * t1 * t2 - t1 * t1 - t2 * t2, t3 * t3,
                               "negative two-halfspace radicand (t)");
  const double value =
      -radius / det * ((psi1 - tau * psi2) * t1 + (psi2 - tau * psi1) * t2) + radius / det * h_psi * h_t;
  return {value, Region2HBranch::Edge};
}

double mu_region2h(const Region2H& g, const Vector& b) {
  require(g.sphere.center.size() == b.size(), Errc::DimensionMismatch, "region and vector dimensions differ");
  const auto m = region2h_support_offset(g.sphere.radius, g.psi1, g.psi2, g.tau, g.h1.normal.dot(b),
                                         g.h2.normal.dot(b), b.norm());
  return g.sphere.center.dot(b) + m.value;
}

Sphere circumsphere_refine(const Sphere& s, const HalfSpace& h) {
  if (!(s.radius > 0.0)) fail(Errc::NotRefinable, "zero-radius sphere cannot shrink");
  const double psi = clamp_psi(signed_fraction(s, h));
  if (psi > 1.0) fail(Errc::EmptyRegion, "halfspace misses the sphere (psi > 1)");
  if (psi <= 0.0) fail(Errc::NotRefinable, "sphere center lies inside the dome (psi <= 0)");
  const Dome d = make_dome(s, h);
  return {d.center, d.radius};
}

double dome_diameter(const Dome& d) { return d.psi > 0.0 ? 2.0 * d.radius : 2.0 * d.sphere.radius; }

double sequential_dome_diameter(double lambda_k, double lambda_prev, const Vector& y, const Vector& n) {
  require(y.size() == n.size(), Errc::DimensionMismatch, "target and normal dimensions differ");
  const double ny = n.dot(y);
  const double perp = std::max(0.0, y.squaredNorm() - ny * ny);
  return 2.0 * (1.0 / lambda_k - 1.0 / lambda_prev) * std::sqrt(perp);
}

}  // namespace lscreen
