#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tubular/numerics.hpp"
#include "tubular/riemannian.hpp"

namespace tubular {

/// An embedded submanifold N of dimension k < n given by one chart u -> p(u).
/// k = 0 describes a single point (the parametrization takes an empty vector).
struct ParametrizedSubmanifold {
  int param_dim = 0;
  int ambient_dim = 0;
  DifferentiableMap p;
  PointPredicate param_domain;
  std::string name;

  [[nodiscard]] Vector point(const Vector& u) const { return p(u); }
  /// n x k matrix whose columns span T_{p(u)} N.
  [[nodiscard]] Matrix tangent(const Vector& u) const;
  [[nodiscard]] bool contains(const Vector& u) const { return !param_domain || param_domain(u); }
  [[nodiscard]] int codim() const { return ambient_dim - param_dim; }
};

[[nodiscard]] ParametrizedSubmanifold point_submanifold(const Vector& at);
/// u -> origin + u * direction for u in (lo, hi).
[[nodiscard]] ParametrizedSubmanifold line_submanifold(const Vector& origin, const Vector& direction,
                                                       double lo, double hi);
/// Arc of the circle of the given radius about the origin of R^2, theta in (lo, hi).
[[nodiscard]] ParametrizedSubmanifold circle_submanifold(double radius, double lo, double hi);
/// u -> (cos u, sin u, pitch * u) in R^3 for u in (lo, hi).
[[nodiscard]] ParametrizedSubmanifold helix_submanifold(double pitch, double lo, double hi);
/// u -> (pi/2, u) in the (colatitude, longitude) chart, u in (lo, hi).
[[nodiscard]] ParametrizedSubmanifold equator_submanifold(double lo, double hi);

/// Spot-checks full rank of the tangent map (smallest singular value > 1e-8)
/// and injectivity over `grid`. Throws RankDeficient or DomainError.
void validate_submanifold(const ParametrizedSubmanifold& N, std::span<const Vector> grid,
                          double separation = 1e-6);

/// Uniform grid of `count` points strictly inside [lo, hi] along one
/// parameter, or a single empty point when the submanifold is a point.
[[nodiscard]] std::vector<Vector> parameter_grid(const ParametrizedSubmanifold& N, double lo, double hi,
                                                 int count);

/// A vector of T_{p(u)} M that is g-orthogonal to T_{p(u)} N.
struct NormalVector {
  Vector u;
  Vector w;
};

/// n x (n-k) matrix whose columns are a g-orthonormal basis of the normal
/// space at p(u). Standard basis vectors are projected onto the normal space
/// and orthonormalized in index order; projections with g-norm below 1e-8 are
/// skipped.
[[nodiscard]] Matrix normal_frame(const MetricField& g, const ParametrizedSubmanifold& N, const Vector& u);

[[nodiscard]] std::vector<NormalVector> normal_space_basis(const MetricField& g,
                                                           const ParametrizedSubmanifold& N,
                                                           const Vector& u);

/// g-orthogonal projection of an ambient vector onto the normal space at
/// p(u): the representative of its class in T_pM / T_pN.
[[nodiscard]] NormalVector normal_representative(const MetricField& g, const ParametrizedSubmanifold& N,
                                                 const Vector& u, const Vector& a);

/// Same projection as a matrix, P = I - T (T^t G T)^{-1} T^t G.
[[nodiscard]] Matrix normal_projector(const MetricField& g, const ParametrizedSubmanifold& N,
                                      const Vector& u);

/// E(u, w) = exp_{p(u)}(w).
[[nodiscard]] Vector normal_exponential(const MetricField& g, const ParametrizedSubmanifold& N,
                                        const NormalVector& nv, double tol = kGeodesicTol);

/// delta : N -> (0, inf), sampled on a parameter grid.
class RadiusFunction {
 public:
  RadiusFunction() = default;
  RadiusFunction(std::function<double(const Vector&)> delta, std::vector<Vector> grid)
      : delta_(std::move(delta)), grid_(std::move(grid)) {}

  static RadiusFunction constant(double value, std::vector<Vector> grid);

  [[nodiscard]] double operator()(const Vector& u) const { return delta_(u); }
  [[nodiscard]] const std::vector<Vector>& grid() const { return grid_; }
  /// Smallest value over the grid.
  [[nodiscard]] double min_on_grid() const;

 private:
  std::function<double(const Vector&)> delta_;
  std::vector<Vector> grid_;
};

struct RadiusSearchOptions {
  /// Radial fractions j / radial_samples for j = 1..radial_samples; the
  /// boundary |w| = delta is included so a focal point on it is caught.
  int radial_samples = 4;
  int max_halvings = 20;
  double max_condition = 1e6;
  double injectivity_tol = 1e-6;
  double tol = 1e-10;
};

/// Largest delta0 * 2^-m (m <= max_halvings) for which the normal exponential
/// map is well conditioned and injective on the sampled closed tube.
/// Throws NoValidRadius.
[[nodiscard]] RadiusFunction tubular_radius_estimate(const MetricField& g, const ParametrizedSubmanifold& N,
                                                     const std::vector<Vector>& grid, double delta0,
                                                     const RadiusSearchOptions& options = {});

/// Unit fiber directions in R^r used for sampling normal discs: +/- e_i,
/// and for r >= 2 also the normalized sign diagonals.
[[nodiscard]] std::vector<Vector> fiber_directions(int r);

}  // namespace tubular
