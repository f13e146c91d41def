#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tubular/embedding.hpp"
#include "tubular/numerics.hpp"
#include "tubular/riemannian.hpp"
#include "tubular/submanifold.hpp"

namespace tubular {

/// phi(u, w) = exp~_{p(u)}(F(u) w): the normal exponential of g_bg read in
/// the g_bg normal frame, trusted on |w| < delta(u).
[[nodiscard]] TubularEmbedding reference_embedding(const MetricField& g_bg, const ParametrizedSubmanifold& N,
                                                   const RadiusFunction& delta);

/// chi = phi o psi^{-1} on the image of the psi-tube |w| < fraction * delta.
/// The jacobian is D phi(q) D psi(q)^{-1} at q = psi^{-1}(x). Evaluation at
/// a point outside that image throws NotInDomain; a failed inversion throws
/// NoConvergence.
[[nodiscard]] DifferentiableMap build_chi(const TubularEmbedding& psi, const TubularEmbedding& phi,
                                          double fraction = 1.0);

/// d chi_p restricted to normal vectors, written as v + eta(v) with eta(v)
/// tangent to N.
struct CorrectionMap {
  Vector u;
  /// k x r: tangent coordinates (in the basis N.tangent(u)) of eta applied to
  /// each normal frame vector.
  Matrix eta;
  /// max over frame vectors of the normal part of d chi(v) - v.
  double normal_defect = 0.0;

  /// Ambient vector eta(v) for a normal vector with frame coordinates w.
  [[nodiscard]] Vector apply(const ParametrizedSubmanifold& N, const Vector& w) const;
};

/// Throws DecompositionFailure when the normal part of d chi(v) - v exceeds
/// `tol` for some frame vector v.
[[nodiscard]] CorrectionMap correction_eta(const DifferentiableMap& chi, const MetricField& g_bg,
                                           const ParametrizedSubmanifold& N, const Vector& u,
                                           double tol = 1e-6);

/// g = chi^* g_bg, g(x) = D chi(x)^t g_bg(chi(x)) D chi(x), on the domain of
/// chi. Throws SingularJacobian where D chi is numerically singular.
[[nodiscard]] MetricField pullback_metric(const DifferentiableMap& chi, const MetricField& g_bg,
                                          std::string name = "pullback");

struct DiagramReport {
  std::size_t samples = 0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
};

/// Integration tolerance for geodesics of metrics built from oracles.
inline constexpr double kPipelineGeodesicTol = 1e-10;

/// For each sample (u, w): |E(Psi(u, w)) - psi(u, w)| where Psi sends the
/// class of F(u) w to its g-orthogonal normal representative and E is the
/// normal exponential of g. Throws NotInDomain for samples outside the
/// certified tube.
[[nodiscard]] DiagramReport verify_main_diagram(const TubularEmbedding& psi, const MetricField& g,
                                                std::span<const Vector> samples,
                                                double tol = kPipelineGeodesicTol);

/// Psi(u, w): the g-orthogonal normal representative of the class of F(u) w.
[[nodiscard]] Vector canonical_normal(const TubularEmbedding& psi, const MetricField& g, const Vector& u,
                                      const Vector& w);

/// max over t of |exp~_p(t (v + eta(v))) - chi(exp_p(t v))| for p = p(u)
/// and v a g-normal vector at p. t = 0 contributes exactly zero.
[[nodiscard]] double isometry_geodesic_check(const DifferentiableMap& chi, const MetricField& g,
                                             const MetricField& g_bg, const ParametrizedSubmanifold& N,
                                             const Vector& u, const Vector& v_normal,
                                             std::span<const double> t_samples,
                                             double tol = kPipelineGeodesicTol);

/// A parametrized curve gamma : [0, 1] -> R^n.
using Curve = std::function<Vector(double)>;

/// Length of gamma under g by Gauss-Legendre quadrature, with gamma'
/// obtained by fourth-order central differences.
[[nodiscard]] double curve_length(const MetricField& g, const Curve& gamma);

/// |L_g(gamma) - L_bg(chi o gamma)| / L_g(gamma): chi is an isometry from g
/// to g_bg iff this vanishes for every curve.
[[nodiscard]] double length_defect(const DifferentiableMap& chi, const MetricField& g, const MetricField& g_bg,
                                   const Curve& gamma);

struct PointCaseResult {
  MetricField g;
  double residual = 0.0;
};

/// Push-forward of the flat metric through psi_p : R^n -> R^n with
/// psi_p(0) = p and d psi_p(0) = I: g(y) = Dpsi^{-t} Dpsi^{-1} at
/// psi_p^{-1}(y), defined where |psi_p^{-1}(y)| < radius. Throws
/// HypothesisFailure when d psi_p(0) differs from I by more than 1e-6.
[[nodiscard]] MetricField point_case_metric(const DifferentiableMap& psi_p, double radius);

/// Builds the point-case metric and checks that its geodesics are the
/// psi_p-images of rays, gamma_v(t) = psi_p(t v), at every t in t_samples
/// and at t = 1, for every sample v. The residual is the max deviation.
[[nodiscard]] PointCaseResult verify_point_case(const DifferentiableMap& psi_p, double radius,
                                                std::span<const Vector> samples,
                                                std::span<const double> t_samples,
                                                double tol = kGeodesicTol);

}  // namespace tubular
