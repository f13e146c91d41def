#pragma once

#include <functional>

#include "tubular/numerics.hpp"

namespace tubular {

// Scalar profiles on (-1, 1). All of them throw DomainError for |t| >= 1.

/// t / sqrt(1 - t^2), an odd increasing bijection (-1, 1) -> R.
[[nodiscard]] double phi_stereo(double t);

/// Even smooth cutoff: 0 on [-1/2, 1/2], 1 for |t| >= 3/4, strictly
/// increasing in |t| between. Built from S(x) = s(x) / (s(x) + s(1 - x)),
/// s(x) = exp(-1/x) for x > 0, as rho(t) = S(4 (|t| - 1/2)).
[[nodiscard]] double rho(double t);

/// rho(t) / sqrt(1 - t^2) + 1.
[[nodiscard]] double eta(double t);

/// eta(t) t = rho(t) phi_stereo(t) + t: a diffeomorphism (-1, 1) -> R equal
/// to the identity on [-1/2, 1/2].
[[nodiscard]] double sigma(double t);

/// Analytic derivative of sigma; even in t and at least 1.
[[nodiscard]] double sigma_derivative(double t);

/// Inverse of sigma on all of R: s itself for |s| <= 1/2, otherwise
/// bisection on the bracket followed by Newton polishing.
[[nodiscard]] double sigma_inverse(double s);

/// sigma_inverse(s) / s, and 1 on [-1/2, 1/2].
[[nodiscard]] double tau(double s);

/// A point of a rank-r vector bundle over an m-dimensional base, in a local
/// trivialization.
struct BundlePoint {
  Vector p;
  Vector v;
};

/// W = {|v| < delta(p)} or W' = {|v| < delta(p) / 2} for a bundle metric.
struct BundleRegion {
  enum class Which { W, WPrime };

  int base_dim = 0;
  int rank = 0;
  /// Gram matrix of the fiber inner product at p (rank x rank).
  std::function<Matrix(const Vector&)> bundle_metric;
  std::function<double(const Vector&)> delta;
  Which which = Which::W;

  [[nodiscard]] double fiber_norm(const Vector& p, const Vector& v) const;
  [[nodiscard]] bool contains(const BundlePoint& x) const;
  /// The same region with `which` replaced.
  [[nodiscard]] BundleRegion as(Which w) const;

  /// Flat bundle metric (identity Gram matrix) with constant radius.
  [[nodiscard]] static BundleRegion trivial(int base_dim, int rank, double delta, Which which = Which::W);
};

/// (p, v) -> (p, eta(|v| / delta(p)) v), a diffeomorphism W -> E that is the
/// identity on W'. Throws DomainError outside W.
[[nodiscard]] BundlePoint bundle_diffeo(const BundleRegion& region, const BundlePoint& x);

/// (p, v') -> (p, tau(|v'| / delta(p)) v'), defined on all of E.
[[nodiscard]] BundlePoint bundle_diffeo_inverse(const BundleRegion& region, const BundlePoint& x);

/// F o bundle_diffeo_inverse on the total space, read in concatenated
/// coordinates (p, v). Agrees with F exactly on W'.
[[nodiscard]] DifferentiableMap extend_map(const DifferentiableMap& F, const BundleRegion& region);

}  // namespace tubular
