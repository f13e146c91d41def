#include <gtest/gtest.h>

#include <cmath>

#include "tubular/euler_like.hpp"

using namespace tubular;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

ParametrizedSubmanifold origin2() { return point_submanifold(vec({0.0, 0.0})); }

std::vector<Vector> point_grid() { return {Vector(0)}; }

TubularEmbedding point_psi(EmbeddingFormula formula, double delta = 1.0) {
  const auto pt = origin2();
  return TubularEmbedding(pt, euclidean_metric(2), std::move(formula), RadiusFunction::constant(delta, point_grid()),
                          "psi");
}

}  // namespace

TEST(PushforwardEuler, QuadraticFiberStretch) {
  // psi(u, w) = (u, w + 0.1 w^2) over the x-axis; psi_* E at (0, 0.5) is
  // (0, w + 0.2 w^2) = (0, 0.55).
  const auto axis = line_submanifold(vec({0.0, 0.0}), vec({1.0, 0.0}), -1.0, 1.0);
  const auto grid = parameter_grid(axis, -0.9, 0.9, 4);
  const TubularEmbedding psi(
      axis, euclidean_metric(2),
      [](const Vector& u, const Vector& w, const Matrix&) { return vec({u[0], w[0] + 0.1 * w[0] * w[0]}); },
      RadiusFunction::constant(1.0, grid), "psi");
  const Vector v = pushforward_euler(psi, vec({0.0, 0.5}));
  EXPECT_NEAR(v[0], 0.0, 1e-13);
  EXPECT_NEAR(v[1], 0.55, 1e-12);
}

TEST(PushforwardEuler, OutsideParameterDomain) {
  const auto axis = line_submanifold(vec({0.0, 0.0}), vec({1.0, 0.0}), -1.0, 1.0);
  const TubularEmbedding psi(axis, euclidean_metric(2), linear_formula(axis),
                             RadiusFunction::constant(1.0, parameter_grid(axis, -0.9, 0.9, 4)), "psi");
  try {
    (void)pushforward_euler(psi, vec({2.0, 0.1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainMargin);
  }
}

TEST(PushforwardEuler, LinearEmbeddingGivesEulerField) {
  const auto psi = point_psi(linear_formula(origin2()));
  const Vector v = pushforward_euler(psi, vec({0.3, -0.7}));
  EXPECT_LT((v - vec({0.3, -0.7})).norm(), 1e-13);
}

TEST(EulerLike, EulerFieldPasses) {
  const FieldCheck c = is_euler_like(euler_vector_field(vec({0.0, 0.0})), euclidean_metric(2), origin2(),
                                     point_grid(), 1e-9);
  EXPECT_TRUE(c.ok);
  EXPECT_LT(c.residual, 1e-15);
}

TEST(EulerLike, DoubledEulerFieldResidualIsOne) {
  const FieldCheck c = is_euler_like(euler_vector_field(vec({0.0, 0.0}), 2.0), euclidean_metric(2), origin2(),
                                     point_grid(), 1e-5);
  EXPECT_FALSE(c.ok);
  EXPECT_NEAR(c.residual, 1.0, 1e-14);
}

TEST(EulerLike, ConstantFieldDoesNotVanish) {
  const auto X = make_vector_field(2, [](const Vector&) { return vec({1.0, 0.0}); });
  const FieldCheck c = is_euler_like(X, euclidean_metric(2), origin2(), point_grid(), 1e-5);
  EXPECT_FALSE(c.ok);
  EXPECT_NEAR(c.residual, 1.0, 1e-15);
  try {
    (void)linear_approximation(X, euclidean_metric(2), origin2(), Vector(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotVanishing);
  }
}

TEST(EulerLike, QuadraticPerturbationKeepsIdentity) {
  const auto X = make_vector_field(2, [](const Vector& x) { return vec({x[0] + x[0] * x[0], x[1] + x[0] * x[1]}); });
  const LinearApproximation lin = linear_approximation(X, euclidean_metric(2), origin2(), Vector(0));
  EXPECT_LT((lin.induced - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_TRUE(is_euler_like(X, euclidean_metric(2), origin2(), point_grid(), 1e-6).ok);
}

TEST(EulerLike, TangentialPartIsIgnoredAlongCurve) {
  // Along the x-axis, X = (y * 5, y) vanishes on N; its normal action is 1.
  const auto axis = line_submanifold(vec({0.0, 0.0}), vec({1.0, 0.0}), -1.0, 1.0);
  const auto grid = parameter_grid(axis, -0.9, 0.9, 5);
  const auto X = make_vector_field(2, [](const Vector& x) { return vec({5.0 * x[1], x[1]}); });
  const FieldCheck c = is_euler_like(X, euclidean_metric(2), axis, grid, 1e-9);
  EXPECT_TRUE(c.ok) << c.residual;
  const LinearApproximation lin = linear_approximation(X, euclidean_metric(2), axis, grid[0]);
  EXPECT_LT(lin.tangent_leak, 1e-12);
}

TEST(EulerLike, PushforwardFieldOfBentEmbedding) {
  const auto psi = point_psi(bent_formula(origin2(), 0.1));
  const auto X = pushforward_euler_field(psi);
  const FieldCheck c = is_euler_like(X, euclidean_metric(2), origin2(), point_grid(), 1e-5);
  EXPECT_TRUE(c.ok) << c.residual;
  EXPECT_FALSE(X.contains(vec({3.0, 0.0})));
  EXPECT_THROW((void)X(vec({3.0, 0.0})), Error);
}

TEST(Reconstruction, IdentityFromEulerField) {
  const auto psi0 = point_psi(linear_formula(origin2()));
  const Vector uw = vec({0.3, -0.2});
  ReconstructionOptions opts;
  opts.flow_tol = 1e-13;
  const Vector x = reconstruct_embedding(euler_vector_field(vec({0.0, 0.0})), psi0, uw, opts);
  EXPECT_LT((x - uw).norm(), 1e-9);
}

TEST(Reconstruction, RecoversBentEmbedding) {
  const auto psi = point_psi(bent_formula(origin2(), 0.1));
  const auto psi0 = point_psi(linear_formula(origin2()));
  const auto X = pushforward_euler_field(psi);
  for (const Vector& uw : {vec({0.2, 0.1}), vec({-0.3, 0.25}), vec({0.0, -0.4})}) {
    const Vector x = reconstruct_embedding(X, psi0, uw);
    EXPECT_LT((x - psi.map()(uw)).norm(), 1e-4);
  }
}

TEST(Reconstruction, DoubledFieldDiverges) {
  const auto psi0 = point_psi(linear_formula(origin2()));
  try {
    (void)reconstruct_embedding(euler_vector_field(vec({0.0, 0.0}), 2.0), psi0, vec({0.3, 0.1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoConvergence);
  }
}

TEST(Reconstruction, RejectsBadSchedule) {
  const auto psi0 = point_psi(linear_formula(origin2()));
  ReconstructionOptions opts;
  opts.t_seq = {0.5, 0.25, 0.3, 0.1};
  EXPECT_THROW((void)reconstruct_embedding(euler_vector_field(vec({0.0, 0.0})), psi0, vec({0.1, 0.1}), opts),
               Error);
}

TEST(Reconstruction, FlowLeavingDomain) {
  const auto psi0 = point_psi(linear_formula(origin2()));
  // Field with a wall at x = 0.3 that the outward flow crosses.
  const auto X = make_vector_field(
      2, [](const Vector& x) { return x; }, [](const Vector& x) { return x[0] < 0.3; });
  try {
    (void)reconstruct_embedding(X, psi0, vec({0.5, 0.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FlowExit);
  }
}
