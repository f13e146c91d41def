#include "tubular/submanifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tubular {

Matrix ParametrizedSubmanifold::tangent(const Vector& u) const {
  if (param_dim == 0) return Matrix(ambient_dim, 0);
  return jacobian(p, u);
}

namespace {

PointPredicate interval(double lo, double hi) {
  return [lo, hi](const Vector& u) { return u.size() == 1 && u[0] > lo && u[0] < hi; };
}

}  // namespace

ParametrizedSubmanifold point_submanifold(const Vector& at) {
  ParametrizedSubmanifold N;
  N.param_dim = 0;
  N.ambient_dim = static_cast<int>(at.size());
  N.p.domain_dim = 0;
  N.p.codomain_dim = N.ambient_dim;
  N.p.eval = [at](const Vector&) { return at; };
  N.p.jacobian = [n = N.ambient_dim](const Vector&) { return Matrix(n, 0); };
  N.name = "point";
  return N;
}

ParametrizedSubmanifold line_submanifold(const Vector& origin, const Vector& direction, double lo, double hi) {
  ParametrizedSubmanifold N;
  N.param_dim = 1;
  N.ambient_dim = static_cast<int>(origin.size());
  N.p.domain_dim = 1;
  N.p.codomain_dim = N.ambient_dim;
  N.p.eval = [origin, direction](const Vector& u) -> Vector { return origin + u[0] * direction; };
  N.p.jacobian = [direction](const Vector&) -> Matrix { return direction; };
  N.p.domain = interval(lo, hi);
  N.param_domain = interval(lo, hi);
  N.name = "line";
  return N;
}

ParametrizedSubmanifold circle_submanifold(double radius, double lo, double hi) {
  ParametrizedSubmanifold N;
  N.param_dim = 1;
  N.ambient_dim = 2;
  N.p.domain_dim = 1;
  N.p.codomain_dim = 2;
  N.p.eval = [radius](const Vector& u) -> Vector {
    Vector x(2);
    x << radius * std::cos(u[0]), radius * std::sin(u[0]);
    return x;
  };
  N.p.jacobian = [radius](const Vector& u) -> Matrix {
    Matrix j(2, 1);
    j << -radius * std::sin(u[0]), radius * std::cos(u[0]);
    return j;
  };
  N.p.domain = interval(lo, hi);
  N.param_domain = interval(lo, hi);
  N.name = "circle";
  return N;
}

ParametrizedSubmanifold helix_submanifold(double pitch, double lo, double hi) {
  ParametrizedSubmanifold N;
  N.param_dim = 1;
  N.ambient_dim = 3;
  N.p.domain_dim = 1;
  N.p.codomain_dim = 3;
  N.p.eval = [pitch](const Vector& u) -> Vector {
    Vector x(3);
    x << std::cos(u[0]), std::sin(u[0]), pitch * u[0];
    return x;
  };
  N.p.jacobian = [pitch](const Vector& u) -> Matrix {
    Matrix j(3, 1);
    j << -std::sin(u[0]), std::cos(u[0]), pitch;
    return j;
  };
  N.p.domain = interval(lo, hi);
  N.param_domain = interval(lo, hi);
  N.name = "helix";
  return N;
}

ParametrizedSubmanifold equator_submanifold(double lo, double hi) {
  ParametrizedSubmanifold N;
  N.param_dim = 1;
  N.ambient_dim = 2;
  N.p.domain_dim = 1;
  N.p.codomain_dim = 2;
  N.p.eval = [](const Vector& u) -> Vector {
    Vector x(2);
    x << std::numbers::pi / 2.0, u[0];
    return x;
  };
  N.p.jacobian = [](const Vector&) -> Matrix {
    Matrix j(2, 1);
    j << 0.0, 1.0;
    return j;
  };
  N.p.domain = interval(lo, hi);
  N.param_domain = interval(lo, hi);
  N.name = "equator";
  return N;
}

void validate_submanifold(const ParametrizedSubmanifold& N, std::span<const Vector> grid, double separation) {
  if (N.param_dim >= N.ambient_dim) throw Error(ErrorCode::DomainError, "submanifold must have k < n");
  std::vector<Vector> images;
  images.reserve(grid.size());
  for (const Vector& u : grid) {
    if (N.param_dim > 0) {
      Eigen::JacobiSVD<Matrix> svd(N.tangent(u));
      const auto& s = svd.singularValues();
      if (!(s[s.size() - 1] > 1e-8)) {
        throw Error(ErrorCode::RankDeficient, "parametrization of '" + N.name + "' is not an immersion");
      }
    }
    images.push_back(N.point(u));
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      if ((grid[i] - grid[j]).norm() > separation && (images[i] - images[j]).norm() <= separation) {
        throw Error(ErrorCode::DomainError, "parametrization of '" + N.name + "' is not injective");
      }
    }
  }
}

std::vector<Vector> parameter_grid(const ParametrizedSubmanifold& N, double lo, double hi, int count) {
  if (N.param_dim == 0) return {Vector(0)};
  if (N.param_dim != 1) throw Error(ErrorCode::DomainError, "parameter grids are built for curves only");
  std::vector<Vector> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Vector u(1);
    u[0] = lo + (i + 0.5) * (hi - lo) / count;
    grid.push_back(u);
  }
  return grid;
}

namespace {

void require_full_rank(const ParametrizedSubmanifold& N, const Matrix& t) {
  if (t.cols() == 0) return;
  Eigen::JacobiSVD<Matrix> svd(t);
  const auto& s = svd.singularValues();
  if (!(s[s.size() - 1] > 1e-8)) {
    throw Error(ErrorCode::RankDeficient, "tangent map of '" + N.name + "' is rank deficient");
  }
}

}  // namespace

Matrix normal_projector(const MetricField& g, const ParametrizedSubmanifold& N, const Vector& u) {
  const int n = N.ambient_dim;
  const Matrix t = N.tangent(u);
  require_full_rank(N, t);
  if (t.cols() == 0) return Matrix::Identity(n, n);
  const Matrix gp = g(N.point(u));
  const Matrix gram = t.transpose() * gp * t;
  return Matrix::Identity(n, n) - t * gram.ldlt().solve(t.transpose() * gp);
}

Matrix normal_frame(const MetricField& g, const ParametrizedSubmanifold& N, const Vector& u) {
  const int n = N.ambient_dim;
  const int r = N.codim();
  const Matrix proj = normal_projector(g, N, u);
  const Matrix gp = g(N.point(u));
  Matrix frame(n, r);
  int found = 0;
  for (int i = 0; i < n && found < r; ++i) {
    Vector v = proj.col(i);
    for (int j = 0; j < found; ++j) v -= frame.col(j).dot(gp * v) * frame.col(j);
    const double len = std::sqrt(std::max(0.0, v.dot(gp * v)));
    if (len < 1e-8) continue;
    frame.col(found++) = v / len;
  }
  if (found < r) throw Error(ErrorCode::RankDeficient, "could not build a normal frame");
  return frame;
}

std::vector<NormalVector> normal_space_basis(const MetricField& g, const ParametrizedSubmanifold& N,
                                             const Vector& u) {
  const Matrix frame = normal_frame(g, N, u);
  std::vector<NormalVector> basis;
  basis.reserve(static_cast<std::size_t>(frame.cols()));
  for (Eigen::Index j = 0; j < frame.cols(); ++j) basis.push_back({u, frame.col(j)});
  return basis;
}

NormalVector normal_representative(const MetricField& g, const ParametrizedSubmanifold& N, const Vector& u,
                                   const Vector& a) {
  return {u, normal_projector(g, N, u) * a};
}

Vector normal_exponential(const MetricField& g, const ParametrizedSubmanifold& N, const NormalVector& nv,
                          double tol) {
  return exp_map(g, N.point(nv.u), nv.w, tol);
}

RadiusFunction RadiusFunction::constant(double value, std::vector<Vector> grid) {
  return RadiusFunction([value](const Vector&) { return value; }, std::move(grid));
}

double RadiusFunction::min_on_grid() const {
  double m = std::numeric_limits<double>::infinity();
  for (const Vector& u : grid_) m = std::min(m, (*this)(u));
  return m;
}

std::vector<Vector> fiber_directions(int r) {
  std::vector<Vector> dirs;
  for (int i = 0; i < r; ++i) {
    for (double s : {1.0, -1.0}) {
      Vector d = Vector::Zero(r);
      d[i] = s;
      dirs.push_back(d);
    }
  }
  if (r >= 2) {
    for (int mask = 0; mask < (1 << r); ++mask) {
      Vector d(r);
      for (int i = 0; i < r; ++i) d[i] = (mask >> i) & 1 ? -1.0 : 1.0;
      dirs.push_back(d / std::sqrt(static_cast<double>(r)));
    }
  }
  return dirs;
}

namespace {

struct TubeSample {
  Vector coords;  // (u, w)
  Vector image;
};

/// Checks one candidate radius; false on any failure.
bool radius_is_valid(const MetricField& g, const ParametrizedSubmanifold& N, const std::vector<Vector>& grid,
                     double delta, const RadiusSearchOptions& options) {
  const int k = N.param_dim;
  const int r = N.codim();
  const auto dirs = fiber_directions(r);

  DifferentiableMap e_map;
  e_map.domain_dim = k + r;
  e_map.codomain_dim = N.ambient_dim;
  e_map.fd_step = 1e-6;
  e_map.eval = [&](const Vector& uw) -> Vector {
    const Vector u = uw.head(k);
    const Matrix frame = normal_frame(g, N, u);
    return exp_map(g, N.point(u), frame * uw.tail(r), options.tol);
  };

  double u_mesh = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (i != j) nearest = std::min(nearest, (grid[i] - grid[j]).norm());
    }
    if (std::isfinite(nearest)) u_mesh = std::max(u_mesh, nearest);
  }
  const double mesh = std::max(u_mesh, delta / options.radial_samples);

  std::vector<TubeSample> samples;
  try {
    for (const Vector& u : grid) {
      std::vector<Vector> fibers{Vector::Zero(r)};
      for (const Vector& d : dirs) {
        for (int j = 1; j <= options.radial_samples; ++j) {
          fibers.push_back(delta * j / options.radial_samples * d);
        }
      }
      for (const Vector& w : fibers) {
        Vector uw(k + r);
        uw << u, w;
        const Vector image = e_map(uw);
        if (!(condition_number(finite_difference_jacobian(e_map, uw)) < options.max_condition)) return false;
        samples.push_back({std::move(uw), image});
      }
    }
  } catch (const Error& e) {
    if (is_domain_failure(e.code())) return false;
    throw;
  }

  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      if ((samples[i].coords - samples[j].coords).norm() > mesh &&
          (samples[i].image - samples[j].image).norm() <= options.injectivity_tol) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

RadiusFunction tubular_radius_estimate(const MetricField& g, const ParametrizedSubmanifold& N,
                                       const std::vector<Vector>& grid, double delta0,
                                       const RadiusSearchOptions& options) {
  if (!(delta0 > 0.0)) throw Error(ErrorCode::DomainError, "tubular_radius_estimate requires delta0 > 0");
  double delta = delta0;
  for (int m = 0; m <= options.max_halvings; ++m) {
    if (radius_is_valid(g, N, grid, delta, options)) return RadiusFunction::constant(delta, grid);
    delta *= 0.5;
  }
  throw Error(ErrorCode::NoValidRadius, "no valid tubular radius after halving delta0 the maximum number of times");
}

}  // namespace tubular
