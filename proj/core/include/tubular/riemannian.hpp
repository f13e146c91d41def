#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tubular/numerics.hpp"

namespace tubular {

/// Closed-form geodesic flow: returns exp_p(v), or throws NotInDomain when the
/// geodesic leaves the metric's domain before parameter 1.
using ExpFunction = std::function<Vector(const Vector& p, const Vector& v)>;

/// A field of symmetric positive-definite matrices on an open region of R^n.
///
/// Evaluating outside the region throws NotInDomain. Derivatives of the
/// field (for Christoffel symbols) are finite differences with fd_step and
/// fd_scheme.
class MetricField {
 public:
  MetricField() = default;
  MetricField(int dim, std::function<Matrix(const Vector&)> g, PointPredicate domain,
              std::string name);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] bool contains(const Vector& x) const { return !domain_ || domain_(x); }
  [[nodiscard]] const PointPredicate& domain() const { return domain_; }

  [[nodiscard]] Matrix operator()(const Vector& x) const;

  [[nodiscard]] double inner(const Vector& x, const Vector& a, const Vector& b) const;
  [[nodiscard]] double norm(const Vector& x, const Vector& v) const;

  double fd_step = 1e-5;
  FdScheme fd_scheme = FdScheme::Central2;

  /// Optional closed-form exponential map. exp_map() prefers it; geodesic()
  /// always integrates.
  ExpFunction closed_form_exp;

 private:
  int dim_ = 0;
  std::function<Matrix(const Vector&)> g_;
  PointPredicate domain_;
  std::string name_;
};

/// Identity matrix everywhere on R^n, with closed-form exp p + v.
[[nodiscard]] MetricField euclidean_metric(int n);
/// diag(1, r^2) in (r, theta) on r > 0.
[[nodiscard]] MetricField polar_metric();
/// Round unit sphere in (colatitude theta, longitude phi): diag(1, sin^2 theta)
/// on theta in (pole_margin, pi - pole_margin). Carries a closed-form exp that
/// rejects great-circle arcs entering the excluded polar caps.
[[nodiscard]] MetricField sphere_chart_metric(double pole_margin = 0.01);
/// A fixed non-Euclidean SPD field on R^n:
/// g_ij = (1 + 0.2 x_i^2) delta_ij + 0.25 (1 - delta_ij).
[[nodiscard]] MetricField warped_metric(int n);

/// Spot-checks symmetry (1e-12) and positive definiteness on `samples`.
/// Throws SingularMetric on the first failing sample.
void validate_metric(const MetricField& g, std::span<const Vector> samples);

/// Christoffel symbols of the second kind at one point, Gamma^k_ij.
class Christoffel {
 public:
  explicit Christoffel(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n), 0.0) {}

  [[nodiscard]] int dim() const { return n_; }
  [[nodiscard]] double operator()(int k, int i, int j) const { return data_[index(k, i, j)]; }
  double& operator()(int k, int i, int j) { return data_[index(k, i, j)]; }

  /// (Gamma^k_ij a^i b^j)_k
  [[nodiscard]] Vector contract(const Vector& a, const Vector& b) const;
  [[nodiscard]] double max_abs() const;

 private:
  [[nodiscard]] std::size_t index(int k, int i, int j) const {
    return static_cast<std::size_t>((k * n_ + i) * n_ + j);
  }
  int n_;
  std::vector<double> data_;
};

/// Levi-Civita symbols from finite differences of the metric.
/// Throws DomainMargin when the stencil leaves the domain, SingularMetric
/// when g(x) cannot be inverted.
[[nodiscard]] Christoffel christoffel(const MetricField& g, const Vector& x);

/// Default integration tolerance for geodesics.
inline constexpr double kGeodesicTol = 1e-11;

/// Integrates x'' + Gamma(x)[x', x'] = 0 from (p, v) up to t_end. The result
/// is truncated with exited_domain set when the curve leaves the chart.
[[nodiscard]] Trajectory geodesic(const MetricField& g, const Vector& p, const Vector& v, double t_end,
                                  double tol = kGeodesicTol, std::vector<double> checkpoints = {});

/// exp_p(v) = gamma_v(1). Throws NotInDomain if v is not in D_p.
[[nodiscard]] Vector exp_map(const MetricField& g, const Vector& p, const Vector& v,
                             double tol = kGeodesicTol);

/// Finite-difference jacobian of v -> exp_p(v) at v = 0.
[[nodiscard]] Matrix exp_differential_at_zero(const MetricField& g, const Vector& p,
                                              double tol = kGeodesicTol);

/// Operational membership test for D_p: integrate and watch for domain exit.
struct GeodesicDomainPolicy {
  double max_time = 1.0;
  double tol = kGeodesicTol;

  [[nodiscard]] bool accepts(const MetricField& g, const Vector& p, const Vector& v) const;
};

}  // namespace tubular
