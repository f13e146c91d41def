#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tubular/realization.hpp"

using namespace tubular;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

DifferentiableMap linear_map(const Matrix& a) {
  DifferentiableMap f;
  f.domain_dim = static_cast<int>(a.cols());
  f.codomain_dim = static_cast<int>(a.rows());
  f.eval = [a](const Vector& x) -> Vector { return a * x; };
  f.jacobian = [a](const Vector&) -> Matrix { return a; };
  return f;
}

struct CircleSetup {
  ParametrizedSubmanifold N = circle_submanifold(1.0, -1.3, 1.3);
  MetricField bg = euclidean_metric(2);
  std::vector<Vector> grid = parameter_grid(N, -1.17, 1.17, 16);
  RadiusFunction delta = RadiusFunction::constant(0.5, grid);
  TubularEmbedding psi{N, bg, bent_formula(N, 0.1), delta, "psi"};
  TubularEmbedding phi = reference_embedding(bg, N, delta);
  DifferentiableMap chi = build_chi(psi, phi);
  MetricField g = pullback_metric(chi, bg);
};

const CircleSetup& circle() {
  static const CircleSetup s;
  return s;
}

}  // namespace

TEST(ReferenceEmbedding, CircleRadialFormula) {
  const auto& s = circle();
  for (double th : {-1.0, 0.2}) {
    for (double r : {-0.4, 0.3}) {
      const Vector x = s.phi(vec({th}), vec({r}));
      EXPECT_NEAR(x[0], (1 + r) * std::cos(th), 1e-14);
      EXPECT_NEAR(x[1], (1 + r) * std::sin(th), 1e-14);
    }
  }
}

TEST(Chi, IdentityWhenEmbeddingsAgree) {
  const auto& s = circle();
  const DifferentiableMap chi = build_chi(s.phi, s.phi);
  const Vector x = vec({1.2 * std::cos(0.3), 1.2 * std::sin(0.3)});
  EXPECT_LT((chi(x) - x).norm(), 1e-12);
  EXPECT_LT((jacobian(chi, x) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Chi, ChainRuleMatchesFiniteDifferences) {
  const auto& s = circle();
  const Vector x = s.psi(vec({0.4}), vec({0.2}));
  DifferentiableMap fd = s.chi;
  fd.jacobian = nullptr;
  fd.fd_step = 1e-4;
  fd.fd_scheme = FdScheme::Central4;
  EXPECT_LT((jacobian(s.chi, x) - finite_difference_jacobian(fd, x)).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Chi, OutsideTubeIsNotInDomain) {
  const auto& s = circle();
  const Vector far = s.psi(vec({0.0}), vec({0.8}));
  EXPECT_FALSE(s.chi.contains(far));
  try {
    (void)s.chi(far);
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::NotInDomain || e.code() == ErrorCode::NoConvergence);
  }
}

TEST(CorrectionEta, ShearGivesTangentCorrection) {
  const double a = 0.7;
  Matrix shear(2, 2);
  shear << 1, a, 0, 1;
  const auto axis = line_submanifold(vec({0.0, 0.0}), vec({1.0, 0.0}), -1.0, 1.0);
  const CorrectionMap eta = correction_eta(linear_map(shear), euclidean_metric(2), axis, vec({0.2}));
  ASSERT_EQ(eta.eta.rows(), 1);
  EXPECT_NEAR(eta.eta(0, 0), a, 1e-14);
  EXPECT_LT(eta.normal_defect, 1e-15);
  const Vector v = eta.apply(axis, vec({2.0}));
  EXPECT_NEAR(v[0], 2 * a, 1e-14);
}

TEST(CorrectionEta, NormalStretchIsRejected) {
  Matrix stretch(2, 2);
  stretch << 1, 0, 0, 2;
  const auto axis = line_submanifold(vec({0.0, 0.0}), vec({1.0, 0.0}), -1.0, 1.0);
  try {
    (void)correction_eta(linear_map(stretch), euclidean_metric(2), axis, vec({0.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DecompositionFailure);
  }
}

TEST(PullbackMetric, LinearMapGivesGram) {
  Matrix a(2, 2);
  a << 2, 1, 0, 3;
  const MetricField g = pullback_metric(linear_map(a), euclidean_metric(2));
  EXPECT_LT((g(vec({0.3, 0.1})) - a.transpose() * a).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(PullbackMetric, SingularJacobianRejected) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1;
  const MetricField g = pullback_metric(linear_map(a), euclidean_metric(2));
  try {
    (void)g(vec({0.0, 0.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularJacobian);
  }
}

TEST(MainDiagram, CircleBentEmbedding) {
  const auto& s = circle();
  const auto samples = random_tube_samples(s.psi, -1.1, 1.1, 0.9, 6, 21);
  const DiagramReport r = verify_main_diagram(s.psi, s.g, samples);
  EXPECT_EQ(r.samples, 6u);
  EXPECT_LT(r.max_residual, 1e-5);
  EXPECT_LE(r.mean_residual, r.max_residual);
}

TEST(MainDiagram, RejectsSamplesOutsideTube) {
  const auto& s = circle();
  const std::vector<Vector> bad{vec({0.0, 0.7})};
  try {
    (void)verify_main_diagram(s.psi, s.g, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInDomain);
  }
}

TEST(CanonicalNormal, GOrthogonalToTangent) {
  const auto& s = circle();
  const Vector u = vec({0.5});
  const Vector n = canonical_normal(s.psi, s.g, u, vec({0.3}));
  const Vector p = s.N.point(u);
  EXPECT_LT(std::abs(s.g.inner(p, n, s.N.tangent(u).col(0))), 1e-10);
}

TEST(Isometry, GeodesicsCorrespond) {
  const auto& s = circle();
  const Vector u = vec({0.3});
  const Vector v = canonical_normal(s.psi, s.g, u, vec({0.3}));
  const std::vector<double> ts{0.0, 0.25, 0.5, 0.75, 1.0};
  EXPECT_LT(isometry_geodesic_check(s.chi, s.g, s.bg, s.N, u, v, ts), 1e-5);
}

TEST(CurveLength, StraightSegment) {
  const Curve seg = [](double t) { return vec({t, 2 * t}); };
  EXPECT_NEAR(curve_length(euclidean_metric(2), seg), std::sqrt(5.0), 1e-12);
}

TEST(CurveLength, QuarterCircleInPolarChart) {
  // Constant r = 2, theta from 0 to pi/2: length pi.
  const Curve arc = [](double t) { return vec({2.0, t * std::numbers::pi / 2}); };
  EXPECT_NEAR(curve_length(polar_metric(), arc), std::numbers::pi, 1e-10);
}

TEST(CurveLength, PreservedByChi) {
  const auto& s = circle();
  const Vector a = s.psi(vec({-0.3}), vec({0.1}));
  const Vector b = s.psi(vec({0.5}), vec({-0.2}));
  const Curve gamma = [a, b](double t) -> Vector {
    Vector x = (1 - t) * a + t * b;
    x *= 1.0 + 0.05 * std::sin(std::numbers::pi * t);
    return x;
  };
  EXPECT_LT(length_defect(s.chi, s.g, s.bg, gamma), 1e-6);
}

TEST(PointCase, IdentityGivesFlatMetric) {
  const DifferentiableMap id = linear_map(Matrix::Identity(2, 2));
  const std::vector<Vector> samples{vec({0.3, 0.2}), vec({-0.5, 0.1})};
  const std::vector<double> ts{0.25, 0.5, 0.75};
  const PointCaseResult r = verify_point_case(id, 1.0, samples, ts);
  EXPECT_LT(r.residual, 1e-10);
  EXPECT_LT((r.g(vec({0.1, 0.1})) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PointCase, BentMapRaysAreGeodesics) {
  DifferentiableMap bent;
  bent.domain_dim = 2;
  bent.codomain_dim = 2;
  bent.eval = [](const Vector& x) { return vec({x[0] + 0.1 * x[0] * x[0], x[1]}); };
  bent.jacobian = [](const Vector& x) {
    Matrix j = Matrix::Identity(2, 2);
    j(0, 0) += 0.2 * x[0];
    return j;
  };
  const std::vector<Vector> samples{vec({0.4, 0.3}), vec({-0.6, 0.2}), vec({0.1, -0.7})};
  const std::vector<double> ts{0.25, 0.5, 0.75};
  EXPECT_LT(verify_point_case(bent, 1.5, samples, ts).residual, 1e-6);
}

TEST(PointCase, DifferentialMustBeIdentity) {
  const DifferentiableMap twice = linear_map(2.0 * Matrix::Identity(2, 2));
  try {
    (void)point_case_metric(twice, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HypothesisFailure);
  }
}
