#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <vector>

#include "tubular/error.hpp"

namespace tubular {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using PointPredicate = std::function<bool(const Vector&)>;

/// Stencil used for central finite differences.
///  - Central2: (f(x+h) - f(x-h)) / 2h
///  - Central4: (-f(x+2h) + 8f(x+h) - 8f(x-h) + f(x-2h)) / 12h
enum class FdScheme { Central2, Central4 };

[[nodiscard]] constexpr int stencil_reach(FdScheme scheme) {
  return scheme == FdScheme::Central4 ? 2 : 1;
}

/// A smooth map R^m -> R^k given as an evaluation oracle, with an optional
/// analytic jacobian and an optional domain predicate (empty means R^m).
struct DifferentiableMap {
  int domain_dim = 0;
  int codomain_dim = 0;
  std::function<Vector(const Vector&)> eval;
  std::function<Matrix(const Vector&)> jacobian;
  PointPredicate domain;
  double fd_step = 1e-5;
  FdScheme fd_scheme = FdScheme::Central2;

  Vector operator()(const Vector& x) const { return eval(x); }
  [[nodiscard]] bool contains(const Vector& x) const { return !domain || domain(x); }
  [[nodiscard]] bool has_analytic_jacobian() const { return static_cast<bool>(jacobian); }
};

/// Central difference of a vector- or matrix-valued function along
/// coordinate `i`. The actual step is snapped so that x +/- h is exactly
/// representable relative to x.
template <class Fn>
auto partial_derivative(Fn&& f, const Vector& x, Eigen::Index i, double h, FdScheme scheme) {
  const double step = (x[i] + h) - x[i];
  Vector xp = x;
  Vector xm = x;
  xp[i] = x[i] + step;
  xm[i] = x[i] - step;
  if (scheme == FdScheme::Central2) {
    auto fp = f(xp);
    auto fm = f(xm);
    return decltype(fp)((fp - fm) / (xp[i] - xm[i]));
  }
  Vector xpp = x;
  Vector xmm = x;
  xpp[i] = x[i] + 2.0 * step;
  xmm[i] = x[i] - 2.0 * step;
  auto fp = f(xp);
  auto fm = f(xm);
  auto fpp = f(xpp);
  auto fmm = f(xmm);
  return decltype(fp)((8.0 * (fp - fm) - (fpp - fmm)) / (12.0 * step));
}

/// Jacobian of `f` at `x`: the analytic one if supplied, else central finite
/// differences with f.fd_step. Throws DomainMargin if the stencil leaves the
/// domain of f.
[[nodiscard]] Matrix jacobian(const DifferentiableMap& f, const Vector& x);

/// Always the finite-difference jacobian, ignoring any analytic one.
[[nodiscard]] Matrix finite_difference_jacobian(const DifferentiableMap& f, const Vector& x);

/// Ratio of extreme singular values; +inf for a singular matrix.
[[nodiscard]] double condition_number(const Matrix& a);

// ---------------------------------------------------------------------------
// ODE integration

struct State {
  Vector point;
  Vector velocity;
};

/// Time-stamped states from an integration run. For a first-order system
/// y' = f(y) `point` is y and `velocity` is f(y); geodesic trajectories store
/// position and tangent vector.
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  double tolerance_used = 0.0;
  bool exited_domain = false;
  std::size_t rejected_steps = 0;

  [[nodiscard]] std::size_t size() const { return times.size(); }
  [[nodiscard]] const State& back() const { return states.back(); }
  [[nodiscard]] double final_time() const { return times.back(); }

  /// State recorded exactly at time t (requested as a checkpoint). Throws
  /// DomainError if no state carries that time stamp.
  [[nodiscard]] const State& at(double t) const;
};

struct OdeOptions {
  /// States for which the solution is admissible; leaving it ends the run
  /// with Trajectory::exited_domain set.
  PointPredicate domain;
  /// Times the integrator must land on exactly (sorted ascending, within
  /// (0, t_end]).
  std::vector<double> checkpoints;
  std::size_t max_steps = 200000;
  /// First trial step; 0 means the whole interval.
  double initial_step = 0.0;
};

/// Adaptive Dormand-Prince 5(4) integration of the autonomous system y' = f(y)
/// from t = 0 to t_end >= 0. The local error estimate of every accepted step
/// satisfies max_i |err_i| / (1 + |y_i|) <= tol.
///
/// Leaving the domain (predicate false, or f raising a domain failure) is
/// located by step halving and reported through the returned trajectory's
/// exit flag. Throws StepUnderflow if the step collapses below 1e-14 |t_end|
/// for accuracy reasons.
[[nodiscard]] Trajectory ode_integrate(const DifferentiableMap& field, const Vector& y0,
                                       double t_end, double tol, const OdeOptions& options = {});

// ---------------------------------------------------------------------------
// Newton inversion

struct NewtonOptions {
  int max_iterations = 50;
  int max_halvings = 10;
  double max_condition = 1e12;
};

/// Finds x with |f(x) - y| <= tol starting from x0, using damped Newton steps.
/// Once the tolerance is met, extra steps are taken while they still reduce
/// the residual. Throws NoConvergence or SingularJacobian.
[[nodiscard]] Vector solve_inverse(const DifferentiableMap& f, const Vector& y, const Vector& x0,
                                   double tol, const NewtonOptions& options = {});

}  // namespace tubular
