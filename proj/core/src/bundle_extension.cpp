#include "tubular/bundle_extension.hpp"

#include <cmath>
#include <limits>

namespace tubular {

namespace {

void require_open_interval(double t, const char* fn) {
  if (!(std::abs(t) < 1.0)) throw Error(ErrorCode::DomainError, std::string(fn) + " requires |t| < 1");
}

// 1 - t^2 without cancellation near |t| = 1: 1 - |t| is exact there.
double one_minus_square(double t) {
  const double a = std::abs(t);
  return (1.0 - a) * (1.0 + a);
}

double flat_exp(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double flat_exp_derivative(double x) { return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0; }

double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = flat_exp(x);
  return a / (a + flat_exp(1.0 - x));
}

double smoothstep_derivative(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double a = flat_exp(x);
  const double b = flat_exp(1.0 - x);
  const double da = flat_exp_derivative(x);
  const double db = -flat_exp_derivative(1.0 - x);
  return (da * b - a * db) / ((a + b) * (a + b));
}

}  // namespace

double phi_stereo(double t) {
  require_open_interval(t, "phi_stereo");
  return t / std::sqrt(one_minus_square(t));
}

double rho(double t) {
  require_open_interval(t, "rho");
  return smoothstep(4.0 * (std::abs(t) - 0.5));
}

double eta(double t) {
  require_open_interval(t, "eta");
  return rho(t) / std::sqrt(one_minus_square(t)) + 1.0;
}

double sigma(double t) {
  require_open_interval(t, "sigma");
  return rho(t) * phi_stereo(t) + t;
}

double sigma_inverse(double s) {
  if (std::isnan(s)) throw Error(ErrorCode::DomainError, "sigma_inverse of NaN");
  if (std::abs(s) <= 0.5) return s;
  const double target = std::abs(s);
  double lo = 0.5;
  double hi = std::nextafter(1.0, 0.0);
  if (sigma(hi) <= target) return std::copysign(hi, s);

  // Bisection until the bracket is narrow, then safeguarded Newton.
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    (sigma(mid) < target ? lo : hi) = mid;
  }
  double t = 0.5 * (lo + hi);
  for (int iter = 0; iter < 100; ++iter) {
    const double f = sigma(t) - target;
    if (f == 0.0) break;
    (f < 0.0 ? lo : hi) = t;
    double next = t - f / sigma_derivative(t);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == t || std::nextafter(lo, hi) >= hi) break;
    t = next;
  }
  // Newton settles within a few ulps; keep the neighbour closest to the target.
  double best = t;
  double best_err = std::abs(sigma(t) - target);
  for (double toward : {0.0, 1.0}) {
    double c = t;
    for (int k = 0; k < 4; ++k) {
      c = std::nextafter(c, toward);
      if (c >= 1.0) break;
      const double e = std::abs(sigma(c) - target);
      if (e < best_err) {
        best = c;
        best_err = e;
      }
    }
  }
  t = best;
  return std::copysign(t, s);
}

double sigma_derivative(double t) {
  require_open_interval(t, "sigma_derivative");
  const double a = std::abs(t);
  const double one_minus = one_minus_square(a);
  const double drho = 4.0 * smoothstep_derivative(4.0 * (a - 0.5));
  return drho * phi_stereo(a) + rho(a) / (one_minus * std::sqrt(one_minus)) + 1.0;
}

double tau(double s) {
  if (std::abs(s) <= 0.5) return 1.0;
  return sigma_inverse(s) / s;
}

double BundleRegion::fiber_norm(const Vector& p, const Vector& v) const {
  if (!bundle_metric) return v.norm();
  return std::sqrt(std::max(0.0, v.dot(bundle_metric(p) * v)));
}

bool BundleRegion::contains(const BundlePoint& x) const {
  const double limit = which == Which::W ? delta(x.p) : 0.5 * delta(x.p);
  return fiber_norm(x.p, x.v) < limit;
}

BundleRegion BundleRegion::as(Which w) const {
  BundleRegion out = *this;
  out.which = w;
  return out;
}

BundleRegion BundleRegion::trivial(int base_dim, int rank, double delta, Which which) {
  BundleRegion region;
  region.base_dim = base_dim;
  region.rank = rank;
  region.bundle_metric = [rank](const Vector&) -> Matrix { return Matrix::Identity(rank, rank); };
  region.delta = [delta](const Vector&) { return delta; };
  region.which = which;
  return region;
}

BundlePoint bundle_diffeo(const BundleRegion& region, const BundlePoint& x) {
  const double d = region.delta(x.p);
  const double ratio = region.fiber_norm(x.p, x.v) / d;
  if (!(ratio < 1.0)) throw Error(ErrorCode::DomainError, "bundle point lies outside W");
  return {x.p, eta(ratio) * x.v};
}

BundlePoint bundle_diffeo_inverse(const BundleRegion& region, const BundlePoint& x) {
  const double d = region.delta(x.p);
  return {x.p, tau(region.fiber_norm(x.p, x.v) / d) * x.v};
}

DifferentiableMap extend_map(const DifferentiableMap& F, const BundleRegion& region) {
  const int m = region.base_dim;
  const int r = region.rank;
  DifferentiableMap out;
  out.domain_dim = m + r;
  out.codomain_dim = F.codomain_dim;
  out.fd_step = F.fd_step;
  out.fd_scheme = F.fd_scheme;
  out.eval = [F, region, m, r](const Vector& pv) -> Vector {
    const BundlePoint back = bundle_diffeo_inverse(region, {pv.head(m), pv.tail(r)});
    Vector x(m + r);
    x << back.p, back.v;
    return F(x);
  };
  return out;
}

}  // namespace tubular
