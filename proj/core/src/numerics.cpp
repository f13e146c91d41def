#include "tubular/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace tubular {

namespace {

void check_stencil(const DifferentiableMap& f, const Vector& x) {
  if (!f.domain) return;
  const double reach = f.fd_step * stencil_reach(f.fd_scheme);
  if (!f.domain(x)) {
    throw Error(ErrorCode::DomainMargin, "jacobian requested outside the map's domain");
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    for (double sign : {-1.0, 1.0}) {
      Vector probe = x;
      probe[i] += sign * reach;
      if (!f.domain(probe)) {
        std::ostringstream os;
        os << "finite-difference stencil leaves the domain along coordinate " << i;
        throw Error(ErrorCode::DomainMargin, os.str());
      }
    }
  }
}

}  // namespace

Matrix finite_difference_jacobian(const DifferentiableMap& f, const Vector& x) {
  check_stencil(f, x);
  Matrix jac(f.codomain_dim, x.size());
  auto eval = [&f](const Vector& p) -> Vector {
    try {
      return f.eval(p);
    } catch (const Error& e) {
      if (is_domain_failure(e.code())) throw Error(ErrorCode::DomainMargin, e.what());
      throw;
    }
  };
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    jac.col(i) = partial_derivative(eval, x, i, f.fd_step, f.fd_scheme);
  }
  return jac;
}

Matrix jacobian(const DifferentiableMap& f, const Vector& x) {
  if (f.jacobian) {
    if (!f.contains(x)) throw Error(ErrorCode::DomainMargin, "jacobian requested outside the map's domain");
    return f.jacobian(x);
  }
  return finite_difference_jacobian(f, x);
}

double condition_number(const Matrix& a) {
  if (a.size() == 0) return 1.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  const double smin = s[s.size() - 1];
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return s[0] / smin;
}

const State& Trajectory::at(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] == t) return states[i];
  }
  throw Error(ErrorCode::DomainError, "no trajectory state at the requested time");
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)

namespace {

constexpr std::array<double, 7> kC = {0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0, kA53 = 64448.0 / 6561.0,
                 kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.1;
constexpr double kMaxFactor = 5.0;

struct StepResult {
  bool in_domain = true;
  Vector y;
  Vector k7;
  double error = 0.0;
};

StepResult try_step(const DifferentiableMap& field, const PointPredicate& domain, const Vector& y,
                    const Vector& k1, double h) {
  StepResult out;
  auto eval = [&](const Vector& state) -> Vector {
    if (domain && !domain(state)) throw Error(ErrorCode::NotInDomain, "stage state outside domain");
    Vector d = field.eval(state);
    if (!d.allFinite()) throw Error(ErrorCode::NotInDomain, "non-finite derivative");
    return d;
  };
  try {
    const Vector k2 = eval(y + h * kA21 * k1);
    const Vector k3 = eval(y + h * (kA31 * k1 + kA32 * k2));
    const Vector k4 = eval(y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3));
    const Vector k5 = eval(y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
    const Vector k6 = eval(y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
    out.y = y + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    out.k7 = eval(out.y);
    const Vector err = h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * out.k7);
    double e = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      const double scale = 1.0 + std::max(std::abs(y[i]), std::abs(out.y[i]));
      e = std::max(e, std::abs(err[i]) / scale);
    }
    out.error = e;
  } catch (const Error& e) {
    if (!is_domain_failure(e.code())) throw;
    out.in_domain = false;
  }
  return out;
}

}  // namespace

Trajectory ode_integrate(const DifferentiableMap& field, const Vector& y0, double t_end, double tol,
                         const OdeOptions& options) {
  if (!(tol > 0.0)) throw Error(ErrorCode::DomainError, "ode_integrate requires tol > 0");
  if (!(t_end >= 0.0)) throw Error(ErrorCode::DomainError, "ode_integrate requires t_end >= 0");

  Trajectory traj;
  traj.tolerance_used = tol;
  if (options.domain && !options.domain(y0)) {
    throw Error(ErrorCode::NotInDomain, "initial state outside the integration domain");
  }
  Vector k1 = field.eval(y0);
  traj.times.push_back(0.0);
  traj.states.push_back({y0, k1});
  if (t_end == 0.0) return traj;

  const double underflow = 1e-14 * t_end;
  // Boundary location stops once the step is this small.
  const double boundary_resolution = 1e-10 * t_end;

  std::vector<double> stops = options.checkpoints;
  std::erase_if(stops, [t_end](double c) { return !(c > 0.0 && c < t_end); });
  std::sort(stops.begin(), stops.end());
  stops.push_back(t_end);
  std::size_t next_stop = 0;

  double t = 0.0;
  Vector y = y0;
  double h = options.initial_step > 0.0 ? std::min(options.initial_step, t_end) : t_end;
  std::size_t steps = 0;

  while (t < t_end) {
    if (++steps > options.max_steps) {
      throw Error(ErrorCode::NoConvergence, "ode_integrate exceeded max_steps");
    }
    const double target = stops[next_stop];
    bool lands = false;
    if (t + h >= target) {
      h = target - t;
      lands = true;
    }

    StepResult step = try_step(field, options.domain, y, k1, h);
    if (!step.in_domain || (options.domain && !options.domain(step.y))) {
      if (h <= boundary_resolution) {
        traj.exited_domain = true;
        return traj;
      }
      ++traj.rejected_steps;
      h *= 0.5;
      continue;
    }
    if (!(step.error <= tol)) {
      ++traj.rejected_steps;
      const double factor =
          std::isfinite(step.error) ? std::max(kMinFactor, kSafety * std::pow(tol / step.error, 0.2))
                                    : kMinFactor;
      h *= std::min(factor, 0.5);
      if (h < underflow) throw Error(ErrorCode::StepUnderflow, "step size collapsed");
      continue;
    }

    t = lands ? target : t + h;
    if (lands) ++next_stop;
    y = std::move(step.y);
    k1 = std::move(step.k7);
    traj.times.push_back(t);
    traj.states.push_back({y, k1});

    const double factor = step.error == 0.0
                              ? kMaxFactor
                              : std::clamp(kSafety * std::pow(tol / step.error, 0.2), kMinFactor, kMaxFactor);
    h *= factor;
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Newton

Vector solve_inverse(const DifferentiableMap& f, const Vector& y, const Vector& x0, double tol,
                     const NewtonOptions& options) {
  auto residual_of = [&](const Vector& x, Vector& r) -> bool {
    if (!f.contains(x)) return false;
    try {
      r = f.eval(x) - y;
    } catch (const Error& e) {
      if (is_domain_failure(e.code())) return false;
      throw;
    }
    return r.allFinite();
  };

  Vector x = x0;
  Vector r;
  if (!residual_of(x, r)) throw Error(ErrorCode::NoConvergence, "Newton seed outside the map's domain");
  double rnorm = r.norm();
  int polish = 0;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (rnorm <= tol && polish >= 2) break;

    Matrix jac;
    try {
      jac = jacobian(f, x);
    } catch (const Error& e) {
      if (rnorm <= tol) break;
      if (e.code() == ErrorCode::DomainMargin) {
        throw Error(ErrorCode::NoConvergence, "Newton iterate reached the domain boundary");
      }
      throw;
    }
    Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || !(s[s.size() - 1] > 0.0) || s[0] / s[s.size() - 1] > options.max_condition) {
      if (rnorm <= tol) break;
      throw Error(ErrorCode::SingularJacobian, "jacobian condition estimate exceeds limit");
    }
    const Vector dx = svd.solve(-r);

    double lambda = 1.0;
    bool improved = false;
    Vector x_trial;
    Vector r_trial;
    for (int halving = 0; halving <= options.max_halvings; ++halving) {
      x_trial = x + lambda * dx;
      if (residual_of(x_trial, r_trial) && r_trial.norm() < rnorm) {
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) {
      if (rnorm <= tol) break;
      throw Error(ErrorCode::NoConvergence, "damped Newton step failed to reduce the residual");
    }
    x = std::move(x_trial);
    r = std::move(r_trial);
    rnorm = r.norm();
    if (rnorm <= tol) ++polish;
  }

  if (!(rnorm <= tol)) {
    throw Error(ErrorCode::NoConvergence, "Newton iteration did not reach the requested tolerance");
  }
  return x;
}

}  // namespace tubular
