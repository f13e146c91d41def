#pragma once

#include <span>
#include <vector>

#include "tubular/embedding.hpp"
#include "tubular/numerics.hpp"
#include "tubular/riemannian.hpp"
#include "tubular/submanifold.hpp"

namespace tubular {

/// A smooth vector field on an open region of R^n.
struct VectorFieldOracle {
  DifferentiableMap X;

  [[nodiscard]] Vector operator()(const Vector& x) const { return X(x); }
  [[nodiscard]] bool contains(const Vector& x) const { return X.contains(x); }
  [[nodiscard]] int dim() const { return X.domain_dim; }
};

/// The Euler field of a vector space in linear coordinates: its fiber
/// component at x is x itself.
[[nodiscard]] inline Vector euler_field(const Vector& x) { return x; }

/// x -> scale * (x - center): the Euler field of R^n about `center` for
/// scale 1.
[[nodiscard]] VectorFieldOracle euler_vector_field(const Vector& center, double scale = 1.0);

/// Wraps an arbitrary evaluation function (jacobian by finite differences).
[[nodiscard]] VectorFieldOracle make_vector_field(int n, std::function<Vector(const Vector&)> fn,
                                                  PointPredicate domain = {});

struct FieldCheck {
  bool ok = false;
  double residual = 0.0;
};

/// ok iff max_u |X(p(u))| <= tol over the grid.
[[nodiscard]] FieldCheck vanishes_on_N(const VectorFieldOracle& X, const ParametrizedSubmanifold& N,
                                       std::span<const Vector> grid, double tol);

/// Matrix form of the linear approximation of X at p(u).
struct LinearApproximation {
  Vector u;
  /// Jacobian of X at p(u), n x n.
  Matrix A;
  /// Action on the normal space, (n-k) x (n-k), in the g_ref-orthonormal
  /// normal frame: induced = F^t G P A F.
  Matrix induced;
  /// max over tangent columns t of |P A t|: vanishes when X|_N = 0.
  double tangent_leak = 0.0;
};

/// Fields that do not vanish at p(u) (|X(p(u))| > tol) have no well-defined
/// linear approximation there: throws NotVanishing.
[[nodiscard]] LinearApproximation linear_approximation(const VectorFieldOracle& X, const MetricField& g_ref,
                                                       const ParametrizedSubmanifold& N, const Vector& u,
                                                       double tol = 1e-6);

/// ok iff X vanishes on N and max_u |induced(u) - I|_max <= tol. The residual
/// is the larger of the two defects.
[[nodiscard]] FieldCheck is_euler_like(const VectorFieldOracle& X, const MetricField& g_ref,
                                       const ParametrizedSubmanifold& N, std::span<const Vector> grid,
                                       double tol);

/// d psi_(u,w) applied to the Euler field (0, w) at (u, w). Throws
/// DomainMargin when u is outside the parameter domain.
[[nodiscard]] Vector pushforward_euler(const TubularEmbedding& psi, const Vector& uw);

/// psi_* of the Euler field as a field on the ambient chart: query points are
/// inverted through psi. Defined on the image of |w| < fraction * delta.
[[nodiscard]] VectorFieldOracle pushforward_euler_field(const TubularEmbedding& psi, double fraction = 1.0);

struct ReconstructionOptions {
  /// Decreasing positive parameters t at which the flow is sampled.
  std::vector<double> t_seq;
  /// Integration tolerance for each flow.
  double flow_tol = 1e-10;
  /// Bound on the difference of the last two extrapolated limits.
  double tol = 1e-5;

  /// t_seq = 2^-1, ..., 2^-12.
  [[nodiscard]] static std::vector<double> default_schedule();
};

/// Recovers psi(u, w) for the embedding psi with psi_* E = X from a
/// reference embedding psi0: for each t the point psi0(u, t w) is flowed
/// along X for time -ln t, and the iterates are extrapolated to t = 0 by
/// quadratic fits through consecutive triples.
///
/// Throws NoConvergence when the iterates are not Cauchy or the last two
/// extrapolations differ by more than options.tol, FlowExit when a flow
/// leaves the domain of X.
[[nodiscard]] Vector reconstruct_embedding(const VectorFieldOracle& X, const TubularEmbedding& psi0,
                                           const Vector& uw, const ReconstructionOptions& options = {});

}  // namespace tubular
