#pragma once
#include "qbind/errors.hpp"
#include "qbind/vec3.hpp"
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace qbind {

//! Controls the deterministic product quadrature used for all momentum-space
//! integrals. Refinement doubles every order; convergence is declared when two
//! consecutive estimates agree to the mixed tolerance
//! |I2 - I1| <= max(rel_tol*|I2|, abs_tol).
struct QuadratureSpec {
  int radial_order = 64;    //!< Gauss-Legendre points in |k|; >= 2
  int angular_order = 32;   //!< Gauss-Legendre points in cos(theta); >= 2
  double rel_tol = 1e-8;    //!< relative agreement target; > 0
  double abs_tol = 1e-12;   //!< absolute floor for near-zero integrals; > 0
  int max_refinements = 3;  //!< doublings allowed before giving up; >= 1

  void validate() const;
};

//! Nodes and weights of the n-point Gauss-Legendre rule on [-1,1],
//! computed by Newton iteration on the Legendre recurrence.
struct GaussLegendre {
  std::vector<double> x;
  std::vector<double> w;
};
GaussLegendre gauss_legendre(int n);

//! One cubature node: location in momentum space and product weight
//! (includes the r^2 volume factor).
struct QuadNode {
  Vec3 k;
  double weight;
};

//! Product rule on the half space {k : dot(k, normal) > 0}, radial domain
//! (0, r_max]. Polar nodes are strictly interior, so no node touches the
//! dividing plane.
std::vector<QuadNode> halfspace_nodes(const Vec3 &normal, double r_max,
                                      int radial_order, int angular_order);

//! Product rule on all of momentum space, radial domain (0, r_max], built as
//! an upper-hemisphere rule about `axis` plus the exact componentwise
//! negation of every node. The node set is therefore closed under k -> -k
//! bitwise, which lets inversion-symmetry arguments hold to machine
//! precision, and no node lies on the plane {dot(k, axis) = 0}.
std::vector<QuadNode> fullspace_nodes(const Vec3 &axis, double r_max,
                                      int radial_order, int angular_order);

//! Product rule on the ball {|k| <= radius} (full sphere in angle).
std::vector<QuadNode> ball_nodes(double radius, int radial_order,
                                 int angular_order);

//! Fixed-order accumulation over a node set (deterministic reduction order).
template <class F> double sum_nodes(const std::vector<QuadNode> &nodes, F &&f) {
  double acc = 0.0;
  for (const auto &n : nodes)
    acc += n.weight * f(n.k);
  return acc;
}

namespace detail {

inline bool agreed(double prev, double cur, const QuadratureSpec &spec) {
  const double diff = std::abs(cur - prev);
  return diff <= std::max(spec.rel_tol * std::abs(cur), spec.abs_tol);
}

//! Shared refinement loop: `build(radial, angular)` supplies nodes at each
//! level. Throws ConvergenceError (with the last two estimates) if doubling
//! max_refinements times never produces two agreeing values.
template <class Builder, class F>
double integrate_refined(Builder &&build, F &&f, const QuadratureSpec &spec,
                         const char *label) {
  spec.validate();
  int radial = spec.radial_order;
  int angular = spec.angular_order;
  double prev = sum_nodes(build(radial, angular), f);
  double cur = prev;
  for (int level = 1; level <= spec.max_refinements; ++level) {
    radial *= 2;
    angular *= 2;
    cur = sum_nodes(build(radial, angular), f);
    if (agreed(prev, cur, spec))
      return cur;
    if (level < spec.max_refinements)
      prev = cur;
  }
  throw ConvergenceError(std::string(label) +
                             ": estimates did not stabilize after " +
                             std::to_string(spec.max_refinements) +
                             " refinements",
                         prev, cur);
}

//! Radial truncation for Gaussian-envelope integrands: the neglected tail of
//! r^2 exp(-r^2/2 sigma^2) beyond 10 sigma is ~1e-20 of the total.
inline double gaussian_radial_cut(double sigma) { return 10.0 * sigma; }

} // namespace detail

//! Integral over the half space {dot(k, normal) > 0} of an integrand decaying
//! at least as fast as exp(-|k|^2 / 2 sigma^2); the radial domain is
//! truncated at 10 sigma.
template <class F>
double integrate_halfspace_gaussian(F &&f, const Vec3 &normal, double sigma,
                                    const QuadratureSpec &spec) {
  if (!(sigma > 0.0))
    throw DomainError("integrate_halfspace_gaussian: sigma must be positive");
  const double r_max = detail::gaussian_radial_cut(sigma);
  return detail::integrate_refined(
      [&](int r, int a) { return halfspace_nodes(normal, r_max, r, a); },
      std::forward<F>(f), spec, "integrate_halfspace_gaussian");
}

//! Integral over all momentum space with the same Gaussian-envelope
//! truncation; `axis` orients the rule (value is axis-independent, the node
//! placement is not). Piecewise-smooth integrands whose only jump lies on the
//! plane {dot(k, axis) = 0} are integrated spectrally because no node meets
//! that plane.
template <class F>
double integrate_fullspace_gaussian(F &&f, const Vec3 &axis, double sigma,
                                    const QuadratureSpec &spec) {
  if (!(sigma > 0.0))
    throw DomainError("integrate_fullspace_gaussian: sigma must be positive");
  const double r_max = detail::gaussian_radial_cut(sigma);
  return detail::integrate_refined(
      [&](int r, int a) { return fullspace_nodes(axis, r_max, r, a); },
      std::forward<F>(f), spec, "integrate_fullspace_gaussian");
}

//! Integral over the ball {|k| <= radius}.
template <class F>
double integrate_ball(F &&f, double radius, const QuadratureSpec &spec) {
  if (!(radius > 0.0))
    throw DomainError("integrate_ball: radius must be positive");
  return detail::integrate_refined(
      [&](int r, int a) { return ball_nodes(radius, r, a); },
      std::forward<F>(f), spec, "integrate_ball");
}

//! Least-squares slope of log(error) against log(h): the observed convergence
//! order of a refinement study. Requires >= 2 samples, all h and errors
//! positive.
double convergence_slope(const std::vector<double> &h,
                         const std::vector<double> &err);

} // namespace qbind
