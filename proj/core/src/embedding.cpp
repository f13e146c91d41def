#include "tubular/embedding.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

namespace tubular {

struct TubularEmbedding::Impl {
  ParametrizedSubmanifold N;
  MetricField frame_metric;
  EmbeddingFormula formula;
  RadiusFunction delta;
  std::string name;
  DifferentiableMap map;
  DifferentiableMap newton_map;
  std::vector<Vector> table_coords;
  std::vector<Vector> table_images;
  std::uint64_t id = 0;

  [[nodiscard]] int k() const { return N.param_dim; }
  [[nodiscard]] int r() const { return N.codim(); }
};

namespace {

constexpr double kInverseTol = 1e-12;

/// One-entry memo of the last inversion per thread. psi^{-1} is a pure
/// function of x, so this never changes results.
struct InverseMemo {
  std::uint64_t owner = 0;
  Vector x;
  Vector uw;
};

std::atomic<std::uint64_t> next_embedding_id{1};

InverseMemo& inverse_memo() {
  thread_local InverseMemo memo;
  return memo;
}

}  // namespace

TubularEmbedding::TubularEmbedding(ParametrizedSubmanifold N, MetricField frame_metric, EmbeddingFormula formula,
                                   RadiusFunction delta, std::string name) {
  auto impl = std::make_shared<Impl>();
  impl->N = std::move(N);
  impl->frame_metric = std::move(frame_metric);
  impl->formula = std::move(formula);
  impl->delta = std::move(delta);
  impl->name = std::move(name);
  impl->id = next_embedding_id.fetch_add(1);

  const int k = impl->k();
  const int r = impl->r();
  const Impl* raw = impl.get();

  DifferentiableMap& m = impl->map;
  m.domain_dim = k + r;
  m.codomain_dim = impl->N.ambient_dim;
  m.eval = [raw, k, r](const Vector& uw) -> Vector {
    const Vector u = uw.head(k);
    return raw->formula(u, uw.tail(r), normal_frame(raw->frame_metric, raw->N, u));
  };
  m.domain = [raw, k](const Vector& uw) { return raw->N.contains(uw.head(k)); };
  m.fd_step = 1e-3;
  m.fd_scheme = FdScheme::Central4;

  impl->newton_map = m;
  impl->newton_map.fd_step = 1e-6;
  impl->newton_map.fd_scheme = FdScheme::Central2;

  // Forward table for Newton seeds: grid x fiber directions x radial levels.
  const auto dirs = fiber_directions(r);
  constexpr int kLevels = 4;
  for (const Vector& u : impl->delta.grid()) {
    const double d = impl->delta(u);
    std::vector<Vector> fibers{Vector::Zero(r)};
    for (const Vector& dir : dirs) {
      for (int j = 1; j <= kLevels; ++j) fibers.push_back(d * j / kLevels * dir);
    }
    for (const Vector& w : fibers) {
      Vector uw(k + r);
      uw << u, w;
      try {
        Vector image = m.eval(uw);
        if (!image.allFinite()) continue;
        impl->table_coords.push_back(std::move(uw));
        impl->table_images.push_back(std::move(image));
      } catch (const Error& e) {
        if (!is_domain_failure(e.code())) throw;
      }
    }
  }
  impl_ = std::move(impl);
}

const ParametrizedSubmanifold& TubularEmbedding::submanifold() const { return impl_->N; }
const MetricField& TubularEmbedding::frame_metric() const { return impl_->frame_metric; }
const RadiusFunction& TubularEmbedding::radius() const { return impl_->delta; }
const std::string& TubularEmbedding::name() const { return impl_->name; }
int TubularEmbedding::param_dim() const { return impl_->k(); }
int TubularEmbedding::codim() const { return impl_->r(); }
int TubularEmbedding::ambient_dim() const { return impl_->N.ambient_dim; }

Matrix TubularEmbedding::frame(const Vector& u) const {
  return normal_frame(impl_->frame_metric, impl_->N, u);
}

Vector TubularEmbedding::operator()(const Vector& u, const Vector& w) const {
  return impl_->formula(u, w, frame(u));
}

const DifferentiableMap& TubularEmbedding::map() const { return impl_->map; }

Vector TubularEmbedding::join(const Vector& u, const Vector& w) const {
  Vector uw(param_dim() + codim());
  uw << u, w;
  return uw;
}

bool TubularEmbedding::in_tube(const Vector& uw, double fraction) const {
  const Vector u = u_of(uw);
  if (!impl_->N.contains(u)) return false;
  return w_of(uw).norm() < fraction * impl_->delta(u);
}

bool TubularEmbedding::try_inverse(const Vector& x, Vector& uw) const {
  InverseMemo& memo = inverse_memo();
  if (memo.owner == impl_->id && memo.x.size() == x.size() && memo.x == x) {
    uw = memo.uw;
    return true;
  }
  const auto& images = impl_->table_images;
  if (images.empty()) return false;
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < images.size(); ++i) {
    const double d = (images[i] - x).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  Vector seed = impl_->table_coords[best];
  // Consecutive queries (flows, stencils) are usually close to the last one.
  if (memo.owner == impl_->id && memo.x.size() == x.size() && (memo.x - x).squaredNorm() < best_dist) {
    seed = memo.uw;
  }
  try {
    uw = solve_inverse(impl_->newton_map, x, seed, kInverseTol);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoConvergence || e.code() == ErrorCode::SingularJacobian ||
        is_domain_failure(e.code())) {
      return false;
    }
    throw;
  }
  memo.owner = impl_->id;
  memo.x = x;
  memo.uw = uw;
  return true;
}

Vector TubularEmbedding::inverse(const Vector& x) const {
  Vector uw;
  if (!try_inverse(x, uw)) {
    throw Error(ErrorCode::NoConvergence, "could not invert embedding '" + impl_->name + "' at the given point");
  }
  return uw;
}

double TubularEmbedding::zero_section_residual(std::span<const Vector> grid) const {
  double worst = 0.0;
  for (const Vector& u : grid) {
    worst = std::max(worst, ((*this)(u, Vector::Zero(codim())) - impl_->N.point(u)).norm());
  }
  return worst;
}

double TubularEmbedding::normal_block_residual(std::span<const Vector> grid) const {
  const int k = param_dim();
  const int r = codim();
  double worst = 0.0;
  for (const Vector& u : grid) {
    const Matrix jac = jacobian(map(), join(u, Vector::Zero(r)));
    const Matrix fiber_block = jac.rightCols(r);
    const Matrix f = frame(u);
    const Matrix g = impl_->frame_metric(impl_->N.point(u));
    // Coordinates of the g~-normal part of each fiber column.
    const Matrix induced = f.transpose() * g * normal_projector(impl_->frame_metric, impl_->N, u) * fiber_block;
    worst = std::max(worst, (induced - Matrix::Identity(r, r)).cwiseAbs().maxCoeff());
    (void)k;
  }
  return worst;
}

EmbeddingFormula linear_formula(const ParametrizedSubmanifold& N) {
  return [N](const Vector& u, const Vector& w, const Matrix& frame) -> Vector { return N.point(u) + frame * w; };
}

EmbeddingFormula bent_formula(const ParametrizedSubmanifold& N, double bend) {
  return [N, bend](const Vector& u, const Vector& w, const Matrix& frame) -> Vector {
    Vector x = N.point(u) + frame * w;
    if (N.param_dim == 0) {
      x[0] += bend * w[0] * w[0];
      return x;
    }
    const Vector t = N.tangent(u).col(0).normalized();
    return x + bend * w.squaredNorm() * t;
  };
}

std::vector<Vector> tube_samples(const TubularEmbedding& psi, double fraction, int levels) {
  std::vector<Vector> out;
  const auto dirs = fiber_directions(psi.codim());
  for (const Vector& u : psi.radius().grid()) {
    const double d = psi.radius()(u) * fraction;
    out.push_back(psi.join(u, Vector::Zero(psi.codim())));
    for (const Vector& dir : dirs) {
      for (int j = 1; j <= levels; ++j) out.push_back(psi.join(u, d * j / levels * dir));
    }
  }
  return out;
}

std::vector<Vector> random_tube_samples(const TubularEmbedding& psi, double lo, double hi, double fraction,
                                        std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // Explicit mapping of raw bits keeps the stream identical across standard libraries.
  auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto gaussian = [&]() {
    const double a = uniform();
    const double b = uniform();
    return std::sqrt(-2.0 * std::log1p(-a)) * std::cos(2.0 * std::numbers::pi * b);
  };
  const int k = psi.param_dim();
  const int r = psi.codim();
  std::vector<Vector> out;
  out.reserve(count);
  while (out.size() < count) {
    Vector u(k);
    for (int i = 0; i < k; ++i) u[i] = lo + (hi - lo) * uniform();
    if (!psi.submanifold().contains(u)) continue;
    Vector dir(r);
    for (int i = 0; i < r; ++i) dir[i] = gaussian();
    if (dir.norm() < 1e-12) continue;
    dir.normalize();
    const double radius = fraction * psi.radius()(u) * std::pow(uniform(), 1.0 / r);
    out.push_back(psi.join(u, radius * dir));
  }
  return out;
}

}  // namespace tubular
