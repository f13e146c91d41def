#include "tubular/euler_like.hpp"

#include <cmath>
#include <limits>

namespace tubular {

VectorFieldOracle euler_vector_field(const Vector& center, double scale) {
  const int n = static_cast<int>(center.size());
  VectorFieldOracle out;
  out.X.domain_dim = n;
  out.X.codomain_dim = n;
  out.X.eval = [center, scale](const Vector& x) -> Vector { return scale * euler_field(x - center); };
  out.X.jacobian = [n, scale](const Vector&) -> Matrix { return scale * Matrix::Identity(n, n); };
  return out;
}

VectorFieldOracle make_vector_field(int n, std::function<Vector(const Vector&)> fn, PointPredicate domain) {
  VectorFieldOracle out;
  out.X.domain_dim = n;
  out.X.codomain_dim = n;
  out.X.eval = std::move(fn);
  out.X.domain = std::move(domain);
  out.X.fd_step = 1e-3;
  out.X.fd_scheme = FdScheme::Central4;
  return out;
}

FieldCheck vanishes_on_N(const VectorFieldOracle& X, const ParametrizedSubmanifold& N,
                         std::span<const Vector> grid, double tol) {
  FieldCheck check;
  for (const Vector& u : grid) check.residual = std::max(check.residual, X(N.point(u)).norm());
  check.ok = check.residual <= tol;
  return check;
}

LinearApproximation linear_approximation(const VectorFieldOracle& X, const MetricField& g_ref,
                                         const ParametrizedSubmanifold& N, const Vector& u, double tol) {
  const Vector p = N.point(u);
  if (X(p).norm() > tol) {
    throw Error(ErrorCode::NotVanishing, "vector field does not vanish on the submanifold");
  }
  LinearApproximation out;
  out.u = u;
  out.A = jacobian(X.X, p);
  const Matrix proj = normal_projector(g_ref, N, u);
  const Matrix frame = normal_frame(g_ref, N, u);
  out.induced = frame.transpose() * g_ref(p) * proj * out.A * frame;
  const Matrix t = N.tangent(u);
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    out.tangent_leak = std::max(out.tangent_leak, (proj * out.A * t.col(j)).norm());
  }
  return out;
}

FieldCheck is_euler_like(const VectorFieldOracle& X, const MetricField& g_ref, const ParametrizedSubmanifold& N,
                         std::span<const Vector> grid, double tol) {
  FieldCheck check = vanishes_on_N(X, N, grid, tol);
  if (!check.ok) return check;
  for (const Vector& u : grid) {
    const LinearApproximation lin = linear_approximation(X, g_ref, N, u, tol);
    const Eigen::Index r = lin.induced.rows();
    check.residual = std::max(check.residual, (lin.induced - Matrix::Identity(r, r)).cwiseAbs().maxCoeff());
  }
  check.ok = check.residual <= tol;
  return check;
}

Vector pushforward_euler(const TubularEmbedding& psi, const Vector& uw) {
  const Vector u = psi.u_of(uw);
  const Vector w = psi.w_of(uw);
  if (!psi.submanifold().contains(u)) {
    throw Error(ErrorCode::DomainMargin, "pushforward requested outside the parameter domain");
  }
  // Derivative of s -> psi(u, (1 + s) w) at s = 0, i.e. d psi applied to (0, w).
  auto along_fiber = [&](const Vector& s) -> Vector { return psi(u, (1.0 + s[0]) * w); };
  return partial_derivative(along_fiber, Vector::Zero(1), 0, 1e-3, FdScheme::Central4);
}

VectorFieldOracle pushforward_euler_field(const TubularEmbedding& psi, double fraction) {
  auto domain = [psi, fraction](const Vector& x) {
    Vector uw;
    return psi.try_inverse(x, uw) && psi.in_tube(uw, fraction);
  };
  auto fn = [psi, fraction](const Vector& x) -> Vector {
    Vector uw;
    if (!psi.try_inverse(x, uw) || !psi.in_tube(uw, fraction)) {
      throw Error(ErrorCode::NotInDomain, "point is outside the tube of '" + psi.name() + "'");
    }
    return pushforward_euler(psi, uw);
  };
  return make_vector_field(psi.ambient_dim(), fn, domain);
}

std::vector<double> ReconstructionOptions::default_schedule() {
  std::vector<double> t;
  for (int i = 1; i <= 12; ++i) t.push_back(std::ldexp(1.0, -i));
  return t;
}

namespace {

/// Value at 0 of the quadratic through (t[i], y[i]), i = a, a+1, a+2.
Vector extrapolate_to_zero(const std::vector<double>& t, const std::vector<Vector>& y, std::size_t a) {
  Vector out = Vector::Zero(y[a].size());
  for (std::size_t i = a; i < a + 3; ++i) {
    double weight = 1.0;
    for (std::size_t j = a; j < a + 3; ++j) {
      if (j != i) weight *= t[j] / (t[j] - t[i]);
    }
    out += weight * y[i];
  }
  return out;
}

}  // namespace

Vector reconstruct_embedding(const VectorFieldOracle& X, const TubularEmbedding& psi0, const Vector& uw,
                             const ReconstructionOptions& options) {
  const std::vector<double> t_seq =
      options.t_seq.empty() ? ReconstructionOptions::default_schedule() : options.t_seq;
  if (t_seq.size() < 4) throw Error(ErrorCode::DomainError, "reconstruction needs at least four values of t");
  for (std::size_t i = 0; i < t_seq.size(); ++i) {
    if (!(t_seq[i] > 0.0 && t_seq[i] < 1.0) || (i > 0 && !(t_seq[i] < t_seq[i - 1]))) {
      throw Error(ErrorCode::DomainError, "t_seq must be decreasing and inside (0, 1)");
    }
  }

  const Vector u = psi0.u_of(uw);
  const Vector w = psi0.w_of(uw);
  OdeOptions ode;
  ode.domain = X.X.domain;

  std::vector<Vector> iterates;
  iterates.reserve(t_seq.size());
  for (double t : t_seq) {
    const Vector start = psi0(u, t * w);
    const Trajectory flow = ode_integrate(X.X, start, -std::log(t), options.flow_tol, ode);
    if (flow.exited_domain) throw Error(ErrorCode::FlowExit, "flow left the domain of the vector field");
    iterates.push_back(flow.back().point);
  }

  // Flowing for time -ln t magnifies integration error by about 1/t, so the
  // level below which differences are noise grows along the schedule.
  const double floor = std::max(1e-9, 100.0 * options.flow_tol);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < iterates.size(); ++i) {
    const double step = (iterates[i] - iterates[i - 1]).norm();
    if (step > previous + floor / t_seq[i]) {
      throw Error(ErrorCode::NoConvergence, "flow iterates are not Cauchy as t decreases");
    }
    previous = step;
  }

  const std::size_t m = iterates.size();
  const Vector before = extrapolate_to_zero(t_seq, iterates, m - 4);
  const Vector last = extrapolate_to_zero(t_seq, iterates, m - 3);
  if (!((last - before).norm() <= options.tol)) {
    throw Error(ErrorCode::NoConvergence, "extrapolated limits disagree beyond the tolerance");
  }
  return last;
}

}  // namespace tubular
