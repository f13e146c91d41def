#include "tubular/riemannian.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace tubular {

MetricField::MetricField(int dim, std::function<Matrix(const Vector&)> g, PointPredicate domain,
                         std::string name)
    : dim_(dim), g_(std::move(g)), domain_(std::move(domain)), name_(std::move(name)) {}

Matrix MetricField::operator()(const Vector& x) const {
  if (!contains(x)) throw Error(ErrorCode::NotInDomain, "metric '" + name_ + "' evaluated outside its domain");
  return g_(x);
}

double MetricField::inner(const Vector& x, const Vector& a, const Vector& b) const {
  return a.dot((*this)(x) * b);
}

double MetricField::norm(const Vector& x, const Vector& v) const {
  return std::sqrt(std::max(0.0, inner(x, v, v)));
}

MetricField euclidean_metric(int n) {
  MetricField g(n, [n](const Vector&) -> Matrix { return Matrix::Identity(n, n); }, {},
                "euclidean" + std::to_string(n));
  g.closed_form_exp = [](const Vector& p, const Vector& v) -> Vector { return p + v; };
  return g;
}

MetricField polar_metric() {
  return MetricField(
      2,
      [](const Vector& x) -> Matrix {
        Matrix g = Matrix::Identity(2, 2);
        g(1, 1) = x[0] * x[0];
        return g;
      },
      [](const Vector& x) { return x[0] > 0.0; }, "polar");
}

namespace {

Eigen::Vector3d sphere_point(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

/// Max of |A cos t + B sin t| over [0, len].
double max_abs_harmonic(double a, double b, double len) {
  double best = std::max(std::abs(a), std::abs(a * std::cos(len) + b * std::sin(len)));
  const double t0 = std::atan2(b, a);
  for (int k = -1; k <= static_cast<int>(len / std::numbers::pi) + 1; ++k) {
    const double t = t0 + k * std::numbers::pi;
    if (t > 0.0 && t < len) best = std::max(best, std::abs(a * std::cos(t) + b * std::sin(t)));
  }
  return best;
}

}  // namespace

MetricField sphere_chart_metric(double pole_margin) {
  const double lo = pole_margin;
  const double hi = std::numbers::pi - pole_margin;
  MetricField g(
      2,
      [](const Vector& x) -> Matrix {
        Matrix g = Matrix::Identity(2, 2);
        const double s = std::sin(x[0]);
        g(1, 1) = s * s;
        return g;
      },
      [lo, hi](const Vector& x) { return x[0] > lo && x[0] < hi; }, "sphere-chart");

  const double zmax = std::cos(pole_margin);
  g.closed_form_exp = [zmax](const Vector& p, const Vector& v) -> Vector {
    const double theta = p[0];
    const double phi = p[1];
    const Eigen::Vector3d x0 = sphere_point(theta, phi);
    const Eigen::Vector3d e_theta(std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi),
                                  -std::sin(theta));
    const Eigen::Vector3d e_phi(-std::sin(phi), std::cos(phi), 0.0);
    const Eigen::Vector3d tangent = v[0] * e_theta + v[1] * std::sin(theta) * e_phi;
    const double len = tangent.norm();
    if (len == 0.0) return p;
    const Eigen::Vector3d dir = tangent / len;
    if (max_abs_harmonic(x0.z(), dir.z(), len) >= zmax) {
      throw Error(ErrorCode::NotInDomain, "great circle arc enters a polar cap of the sphere chart");
    }
    // Longitude is tracked continuously along the arc.
    const int pieces = static_cast<int>(std::ceil(len / 0.25)) + 1;
    double lon = phi;
    for (int i = 1; i <= pieces; ++i) {
      const double t = len * i / pieces;
      const Eigen::Vector3d x = std::cos(t) * x0 + std::sin(t) * dir;
      lon += std::remainder(std::atan2(x.y(), x.x()) - lon, 2.0 * std::numbers::pi);
    }
    const Eigen::Vector3d x1 = std::cos(len) * x0 + std::sin(len) * dir;
    Vector out(2);
    out << std::atan2(std::hypot(x1.x(), x1.y()), x1.z()), lon;
    return out;
  };
  return g;
}

MetricField warped_metric(int n) {
  return MetricField(
      n,
      [n](const Vector& x) -> Matrix {
        Matrix g = Matrix::Constant(n, n, 0.25);
        for (int i = 0; i < n; ++i) g(i, i) = 1.0 + 0.2 * x[i] * x[i];
        return g;
      },
      {}, "warped" + std::to_string(n));
}

void validate_metric(const MetricField& g, std::span<const Vector> samples) {
  for (const Vector& x : samples) {
    if (!g.contains(x)) continue;
    const Matrix m = g(x);
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw Error(ErrorCode::SingularMetric, "metric '" + g.name() + "' is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues()[0] > 0.0)) {
      throw Error(ErrorCode::SingularMetric, "metric '" + g.name() + "' is not positive definite");
    }
  }
}

Vector Christoffel::contract(const Vector& a, const Vector& b) const {
  Vector out = Vector::Zero(n_);
  for (int k = 0; k < n_; ++k) {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) s += (*this)(k, i, j) * a[i] * b[j];
    }
    out[k] = s;
  }
  return out;
}

double Christoffel::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Christoffel christoffel(const MetricField& g, const Vector& x) {
  const int n = g.dim();
  Matrix gx;
  try {
    gx = g(x);
  } catch (const Error& e) {
    if (is_domain_failure(e.code())) throw Error(ErrorCode::DomainMargin, e.what());
    throw;
  }
  Eigen::LDLT<Matrix> ldlt(gx);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 0.0) {
    throw Error(ErrorCode::SingularMetric, "metric '" + g.name() + "' is singular");
  }
  const Matrix ginv = ldlt.solve(Matrix::Identity(n, n));

  auto eval = [&g](const Vector& p) -> Matrix {
    try {
      return g(p);
    } catch (const Error& e) {
      if (is_domain_failure(e.code())) throw Error(ErrorCode::DomainMargin, e.what());
      throw;
    }
  };
  std::vector<Matrix> dg(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) dg[l] = partial_derivative(eval, x, l, g.fd_step, g.fd_scheme);

  // First kind: [ij, l] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
  Christoffel gamma(n);
  std::vector<double> first(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int l = 0; l < n; ++l) first[l] = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += ginv(k, l) * first[l];
        gamma(k, i, j) = s;
        gamma(k, j, i) = s;
      }
    }
  }
  return gamma;
}

namespace {

DifferentiableMap geodesic_field(const MetricField& g) {
  const int n = g.dim();
  DifferentiableMap field;
  field.domain_dim = 2 * n;
  field.codomain_dim = 2 * n;
  field.eval = [&g, n](const Vector& y) -> Vector {
    const Vector x = y.head(n);
    const Vector v = y.tail(n);
    Vector dy(2 * n);
    dy.head(n) = v;
    dy.tail(n) = -christoffel(g, x).contract(v, v);
    return dy;
  };
  return field;
}

}  // namespace

Trajectory geodesic(const MetricField& g, const Vector& p, const Vector& v, double t_end, double tol,
                    std::vector<double> checkpoints) {
  const int n = g.dim();
  if (!g.contains(p)) throw Error(ErrorCode::NotInDomain, "geodesic start point outside the metric domain");
  if (!v.allFinite()) throw Error(ErrorCode::DomainError, "geodesic initial velocity is not finite");

  Vector y0(2 * n);
  y0 << p, v;
  OdeOptions options;
  options.checkpoints = std::move(checkpoints);
  options.domain = [&g, n](const Vector& y) { return g.contains(y.head(n)); };

  Trajectory raw = ode_integrate(geodesic_field(g), y0, t_end, tol, options);
  Trajectory out;
  out.tolerance_used = raw.tolerance_used;
  out.exited_domain = raw.exited_domain;
  out.rejected_steps = raw.rejected_steps;
  out.times = std::move(raw.times);
  out.states.reserve(raw.states.size());
  for (const State& s : raw.states) out.states.push_back({s.point.head(n), s.point.tail(n)});
  return out;
}

Vector exp_map(const MetricField& g, const Vector& p, const Vector& v, double tol) {
  if (g.closed_form_exp) {
    if (!g.contains(p)) throw Error(ErrorCode::NotInDomain, "exp_p requested at a point outside the domain");
    Vector q = g.closed_form_exp(p, v);
    if (!g.contains(q)) throw Error(ErrorCode::NotInDomain, "geodesic leaves the domain before t = 1");
    return q;
  }
  Trajectory traj = geodesic(g, p, v, 1.0, tol);
  if (traj.exited_domain) throw Error(ErrorCode::NotInDomain, "geodesic leaves the domain before t = 1");
  return traj.back().point;
}

Matrix exp_differential_at_zero(const MetricField& g, const Vector& p, double tol) {
  DifferentiableMap expp;
  expp.domain_dim = g.dim();
  expp.codomain_dim = g.dim();
  expp.eval = [&](const Vector& v) { return exp_map(g, p, v, tol); };
  if (!g.contains(p)) throw Error(ErrorCode::DomainMargin, "exp differential requested outside the domain");
  return finite_difference_jacobian(expp, Vector::Zero(g.dim()));
}

bool GeodesicDomainPolicy::accepts(const MetricField& g, const Vector& p, const Vector& v) const {
  if (!g.contains(p)) return false;
  return !geodesic(g, p, v, max_time, tol).exited_domain;
}

}  // namespace tubular
