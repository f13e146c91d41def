#include "tubular/realization.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

namespace tubular {

namespace {

constexpr double kMaxCondition = 1e12;

void require_invertible(const Matrix& a, const char* what) {
  if (!(condition_number(a) <= kMaxCondition)) throw Error(ErrorCode::SingularJacobian, what);
}

std::vector<double> sorted_checkpoints(std::span<const double> t_samples, bool include_one) {
  std::vector<double> out;
  for (double t : t_samples) {
    if (t < 0.0 || t > 1.0) throw Error(ErrorCode::DomainError, "geodesic sample times must lie in [0, 1]");
    if (t > 0.0) out.push_back(t);
  }
  if (include_one) out.push_back(1.0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

TubularEmbedding reference_embedding(const MetricField& g_bg, const ParametrizedSubmanifold& N,
                                     const RadiusFunction& delta) {
  auto formula = [g_bg, N](const Vector& u, const Vector& w, const Matrix& frame) -> Vector {
    return exp_map(g_bg, N.point(u), frame * w);
  };
  return TubularEmbedding(N, g_bg, formula, delta, "reference");
}

DifferentiableMap build_chi(const TubularEmbedding& psi, const TubularEmbedding& phi, double fraction) {
  auto invert = [psi, fraction](const Vector& x) -> Vector {
    Vector uw;
    if (!psi.try_inverse(x, uw)) {
      throw Error(ErrorCode::NoConvergence, "point is not in the image of '" + psi.name() + "'");
    }
    if (!psi.in_tube(uw, fraction)) {
      throw Error(ErrorCode::NotInDomain, "point is outside the certified tube of '" + psi.name() + "'");
    }
    return uw;
  };

  DifferentiableMap chi;
  chi.domain_dim = psi.ambient_dim();
  chi.codomain_dim = phi.ambient_dim();
  chi.eval = [invert, phi](const Vector& x) -> Vector { return phi.map()(invert(x)); };
  chi.jacobian = [invert, psi, phi](const Vector& x) -> Matrix {
    const Vector q = invert(x);
    const Matrix dpsi = jacobian(psi.map(), q);
    require_invertible(dpsi, "jacobian of the tubular embedding is singular");
    const Matrix dphi = jacobian(phi.map(), q);
    // D chi = D phi D psi^{-1}
    return dpsi.transpose().partialPivLu().solve(dphi.transpose()).transpose();
  };
  chi.domain = [psi, fraction](const Vector& x) {
    Vector uw;
    return psi.try_inverse(x, uw) && psi.in_tube(uw, fraction);
  };
  return chi;
}

Vector CorrectionMap::apply(const ParametrizedSubmanifold& N, const Vector& w) const {
  if (eta.rows() == 0) return Vector::Zero(N.ambient_dim);
  return N.tangent(u) * (eta * w);
}

CorrectionMap correction_eta(const DifferentiableMap& chi, const MetricField& g_bg,
                             const ParametrizedSubmanifold& N, const Vector& u, double tol) {
  const Matrix dchi = jacobian(chi, N.point(u));
  const Matrix frame = normal_frame(g_bg, N, u);
  const Matrix defect = dchi * frame - frame;
  const Matrix t = N.tangent(u);

  CorrectionMap out;
  out.u = u;
  Matrix remainder = defect;
  if (t.cols() > 0) {
    out.eta = (t.transpose() * t).ldlt().solve(t.transpose() * defect);
    remainder -= t * out.eta;
  } else {
    out.eta = Matrix(0, frame.cols());
  }
  for (Eigen::Index j = 0; j < remainder.cols(); ++j) {
    out.normal_defect = std::max(out.normal_defect, remainder.col(j).norm());
  }
  if (!(out.normal_defect <= tol)) {
    throw Error(ErrorCode::DecompositionFailure, "d chi(v) - v is not tangent to the submanifold");
  }
  return out;
}

MetricField pullback_metric(const DifferentiableMap& chi, const MetricField& g_bg, std::string name) {
  MetricField g(
      chi.domain_dim,
      [chi, g_bg](const Vector& x) -> Matrix {
        const Matrix j = jacobian(chi, x);
        require_invertible(j, "jacobian of chi is singular");
        const Matrix m = j.transpose() * g_bg(chi(x)) * j;
        return 0.5 * (m + m.transpose());
      },
      chi.domain, std::move(name));
  g.fd_step = 1e-4;
  g.fd_scheme = FdScheme::Central2;
  return g;
}

Vector canonical_normal(const TubularEmbedding& psi, const MetricField& g, const Vector& u, const Vector& w) {
  return normal_projector(g, psi.submanifold(), u) * (psi.frame(u) * w);
}

DiagramReport verify_main_diagram(const TubularEmbedding& psi, const MetricField& g,
                                  std::span<const Vector> samples, double tol) {
  DiagramReport report;
  double sum = 0.0;
  for (const Vector& uw : samples) {
    if (!psi.in_tube(uw)) throw Error(ErrorCode::NotInDomain, "diagram sample lies outside the certified tube");
    const Vector u = psi.u_of(uw);
    const Vector w = psi.w_of(uw);
    const Vector image = exp_map(g, psi.submanifold().point(u), canonical_normal(psi, g, u, w), tol);
    const double residual = (image - psi(u, w)).norm();
    report.max_residual = std::max(report.max_residual, residual);
    sum += residual;
    ++report.samples;
  }
  if (report.samples > 0) report.mean_residual = sum / static_cast<double>(report.samples);
  return report;
}

double isometry_geodesic_check(const DifferentiableMap& chi, const MetricField& g, const MetricField& g_bg,
                               const ParametrizedSubmanifold& N, const Vector& u, const Vector& v_normal,
                               std::span<const double> t_samples, double tol) {
  const std::vector<double> times = sorted_checkpoints(t_samples, false);
  if (times.empty()) return 0.0;
  const Vector p = N.point(u);
  const Matrix frame = normal_frame(g_bg, N, u);
  const Vector w = frame.transpose() * g_bg(p) * normal_projector(g_bg, N, u) * v_normal;
  const CorrectionMap eta = correction_eta(chi, g_bg, N, u);
  const Vector lifted = v_normal + eta.apply(N, w);

  const Trajectory traj = geodesic(g, p, v_normal, times.back(), tol, times);
  if (traj.exited_domain) throw Error(ErrorCode::NotInDomain, "g-geodesic leaves the domain of chi");
  double worst = 0.0;
  for (double t : times) {
    const Vector lhs = exp_map(g_bg, p, t * lifted, tol);
    const Vector rhs = chi(traj.at(t).point);
    worst = std::max(worst, (lhs - rhs).norm());
  }
  return worst;
}

double curve_length(const MetricField& g, const Curve& gamma) {
  auto speed = [&](double t) {
    auto as_vector = [&](const Vector& s) -> Vector { return gamma(s[0]); };
    const Vector ts = Vector::Constant(1, t);
    const Vector x = gamma(t);
    const Vector dx = partial_derivative(as_vector, ts, 0, 1e-3, FdScheme::Central4);
    return g.norm(x, dx);
  };
  return boost::math::quadrature::gauss<double, 30>::integrate(speed, 0.0, 1.0);
}

double length_defect(const DifferentiableMap& chi, const MetricField& g, const MetricField& g_bg,
                     const Curve& gamma) {
  const double len = curve_length(g, gamma);
  const double image_len = curve_length(g_bg, [&](double t) { return chi(gamma(t)); });
  return std::abs(len - image_len) / len;
}

MetricField point_case_metric(const DifferentiableMap& psi_p, double radius) {
  const int n = psi_p.domain_dim;
  const Matrix d0 = jacobian(psi_p, Vector::Zero(n));
  if ((d0 - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-6) {
    throw Error(ErrorCode::HypothesisFailure, "the differential of the chart at 0 is not the identity");
  }

  auto invert = [psi_p, radius](const Vector& y, Vector& q) {
    try {
      q = solve_inverse(psi_p, y, y, 1e-13);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoConvergence || e.code() == ErrorCode::SingularJacobian) return false;
      throw;
    }
    return q.norm() < radius;
  };
  auto domain = [invert](const Vector& y) {
    Vector q;
    return invert(y, q);
  };
  MetricField g(
      n,
      [invert, psi_p](const Vector& y) -> Matrix {
        Vector q;
        if (!invert(y, q)) throw Error(ErrorCode::NotInDomain, "point outside the chart image");
        const Matrix j = jacobian(psi_p, q);
        require_invertible(j, "chart jacobian is singular");
        const Matrix jinv = j.inverse();
        const Matrix m = jinv.transpose() * jinv;
        return 0.5 * (m + m.transpose());
      },
      domain, "point-case");
  g.fd_step = 1e-4;
  g.fd_scheme = FdScheme::Central2;
  return g;
}

PointCaseResult verify_point_case(const DifferentiableMap& psi_p, double radius, std::span<const Vector> samples,
                                  std::span<const double> t_samples, double tol) {
  PointCaseResult out{point_case_metric(psi_p, radius), 0.0};
  const int n = psi_p.domain_dim;
  const Vector p = psi_p(Vector::Zero(n));
  const std::vector<double> times = sorted_checkpoints(t_samples, true);
  for (const Vector& v : samples) {
    const Trajectory traj = geodesic(out.g, p, v, 1.0, tol, times);
    if (traj.exited_domain) throw Error(ErrorCode::NotInDomain, "geodesic leaves the chart image");
    for (double t : times) {
      out.residual = std::max(out.residual, (traj.at(t).point - psi_p(t * v)).norm());
    }
  }
  return out;
}

}  // namespace tubular
