#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tubular/numerics.hpp"
#include "tubular/riemannian.hpp"
#include "tubular/submanifold.hpp"

namespace tubular {

/// Formula psi(u, w) where w are coordinates in the normal frame at u.
using EmbeddingFormula = std::function<Vector(const Vector& u, const Vector& w, const Matrix& frame)>;

/// A map psi : nu_N -> M in normal-bundle coordinates (u, w), where w are
/// coordinates in the deterministic g~-orthonormal normal frame at p(u).
/// nu_N = TM|_N / TN is identified with the g~-orthogonal complement of TN.
///
/// The tube |w| < delta(u) is the region on which psi is trusted to be an
/// embedding; psi^{-1} is solved there by Newton from the nearest entry of a
/// precomputed forward table.
class TubularEmbedding {
 public:
  TubularEmbedding(ParametrizedSubmanifold N, MetricField frame_metric, EmbeddingFormula formula,
                   RadiusFunction delta, std::string name);

  [[nodiscard]] const ParametrizedSubmanifold& submanifold() const;
  [[nodiscard]] const MetricField& frame_metric() const;
  [[nodiscard]] const RadiusFunction& radius() const;
  [[nodiscard]] const std::string& name() const;
  [[nodiscard]] int param_dim() const;
  [[nodiscard]] int codim() const;
  [[nodiscard]] int ambient_dim() const;

  /// Normal frame (n x r) at u.
  [[nodiscard]] Matrix frame(const Vector& u) const;

  [[nodiscard]] Vector operator()(const Vector& u, const Vector& w) const;
  /// psi as a map of the concatenated coordinates (u, w).
  [[nodiscard]] const DifferentiableMap& map() const;

  [[nodiscard]] Vector join(const Vector& u, const Vector& w) const;
  [[nodiscard]] Vector u_of(const Vector& uw) const { return uw.head(param_dim()); }
  [[nodiscard]] Vector w_of(const Vector& uw) const { return uw.tail(codim()); }

  /// |w| < fraction * delta(u) with u inside the parameter domain.
  [[nodiscard]] bool in_tube(const Vector& uw, double fraction = 1.0) const;

  /// Newton solve of psi(u, w) = x. Throws NoConvergence / SingularJacobian.
  [[nodiscard]] Vector inverse(const Vector& x) const;
  /// Same, but returns false instead of throwing.
  [[nodiscard]] bool try_inverse(const Vector& x, Vector& uw) const;

  /// max |psi(u, 0) - p(u)| over the grid.
  [[nodiscard]] double zero_section_residual(std::span<const Vector> grid) const;
  /// max over the grid of | F^t G~ d_w psi(u, 0) - I |_max: the induced
  /// map on the normal bundle written in the frame.
  [[nodiscard]] double normal_block_residual(std::span<const Vector> grid) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// psi(u, w) = p(u) + F(u) w + bend |w|^2 t(u), with t the unit tangent
/// (first tangent column). For a point submanifold the bend is applied along
/// the first ambient axis as bend * w_0^2 e_0.
[[nodiscard]] EmbeddingFormula bent_formula(const ParametrizedSubmanifold& N, double bend);

/// psi(u, w) = p(u) + F(u) w.
[[nodiscard]] EmbeddingFormula linear_formula(const ParametrizedSubmanifold& N);

/// Deterministic tube samples (u, w) with |w| <= fraction * delta(u): the
/// parameter grid times fiber directions at radial levels j/levels.
[[nodiscard]] std::vector<Vector> tube_samples(const TubularEmbedding& psi, double fraction, int levels);

/// Deterministic pseudo-random tube samples: `count` points with u drawn
/// from the parameter interval [lo, hi] and |w| <= fraction * delta(u).
[[nodiscard]] std::vector<Vector> random_tube_samples(const TubularEmbedding& psi, double lo, double hi,
                                                      double fraction, std::size_t count,
                                                      std::uint64_t seed);

}  // namespace tubular
