#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tubular/riemannian.hpp"

using namespace tubular;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::IoError;
}

}  // namespace

TEST(Christoffel, VanishForEuclidean) {
  const auto g = euclidean_metric(3);
  EXPECT_LT(christoffel(g, vec({0.3, -1.0, 2.0})).max_abs(), 1e-12);
}

TEST(Christoffel, PolarCoordinates) {
  const auto g = polar_metric();
  const double r = 1.7;
  const Christoffel gamma = christoffel(g, vec({r, 0.4}));
  EXPECT_NEAR(gamma(0, 1, 1), -r, 1e-8);
  EXPECT_NEAR(gamma(1, 0, 1), 1.0 / r, 1e-8);
  EXPECT_NEAR(gamma(1, 1, 0), 1.0 / r, 1e-8);
  EXPECT_NEAR(gamma(0, 0, 0), 0.0, 1e-8);
  EXPECT_NEAR(gamma(1, 1, 1), 0.0, 1e-8);
}

TEST(Christoffel, SphereChart) {
  const auto g = sphere_chart_metric();
  const double theta = 1.1;
  const Christoffel gamma = christoffel(g, vec({theta, 0.2}));
  EXPECT_NEAR(gamma(0, 1, 1), -std::sin(theta) * std::cos(theta), 1e-8);
  EXPECT_NEAR(gamma(1, 0, 1), std::cos(theta) / std::sin(theta), 1e-8);
}

TEST(Christoffel, StencilOutsideDomainIsDomainMargin) {
  const auto g = polar_metric();
  EXPECT_EQ(code_of([&] { (void)christoffel(g, vec({1e-7, 0.0})); }), ErrorCode::DomainMargin);
}

TEST(Metric, EvaluationOutsideDomainThrows) {
  const auto g = polar_metric();
  EXPECT_EQ(code_of([&] { (void)g(vec({-1.0, 0.0})); }), ErrorCode::NotInDomain);
}

TEST(Metric, ValidateRejectsIndefiniteField) {
  MetricField bad(2, [](const Vector&) -> Matrix { return Matrix::Identity(2, 2) * -1.0; }, {}, "bad");
  const Vector pts[] = {vec({0.0, 0.0})};
  EXPECT_EQ(code_of([&] { validate_metric(bad, pts); }), ErrorCode::SingularMetric);
  const auto good = warped_metric(3);
  const Vector pts3[] = {vec({1.0, -2.0, 0.5})};
  EXPECT_NO_THROW(validate_metric(good, pts3));
}

TEST(Geodesic, PolarStraightLine) {
  // In polar coordinates geodesics are straight lines of the plane.
  const auto g = polar_metric();
  const Vector p = vec({1.0, 0.0});
  const Vector v = vec({0.0, 1.0});  // unit speed upward at (1, 0)
  const Trajectory traj = geodesic(g, p, v, 1.0, 1e-12, {0.5, 1.0});
  for (double t : {0.5, 1.0}) {
    const Vector x = traj.at(t).point;
    EXPECT_NEAR(x[0] * std::cos(x[1]), 1.0, 1e-9);
    EXPECT_NEAR(x[0] * std::sin(x[1]), t, 1e-9);
  }
}

TEST(Geodesic, LeavingTheChartSetsExitFlag) {
  const auto g = polar_metric();
  const Trajectory traj = geodesic(g, vec({1.0, 0.0}), vec({-2.0, 0.0}), 1.0);
  EXPECT_TRUE(traj.exited_domain);
  EXPECT_LT(traj.final_time(), 0.5 + 1e-6);
  EXPECT_EQ(code_of([&] { (void)exp_map(g, vec({1.0, 0.0}), vec({-2.0, 0.0})); }), ErrorCode::NotInDomain);
}

TEST(Geodesic, SphereIntegrationMatchesGreatCircle) {
  const auto g = sphere_chart_metric();
  const Vector p = vec({1.2, 0.3});
  const Vector v = vec({0.4, -0.7});
  const Vector integrated = geodesic(g, p, v, 1.0).back().point;
  const Vector closed = exp_map(g, p, v);
  EXPECT_LT((integrated - closed).norm(), 1e-9);
}

TEST(Geodesic, SphereClosedFormRejectsPolarCaps) {
  const auto g = sphere_chart_metric(0.01);
  EXPECT_EQ(code_of([&] { (void)exp_map(g, vec({0.5, 0.0}), vec({-0.6, 0.0})); }), ErrorCode::NotInDomain);
}

TEST(Geodesic, SphereClosedFormTracksLongitude) {
  const auto g = sphere_chart_metric();
  // Along the equator the longitude advances without wrapping.
  const Vector q = exp_map(g, vec({std::numbers::pi / 2, 3.0}), vec({0.0, 1.0}));
  EXPECT_NEAR(q[0], std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(q[1], 4.0, 1e-12);
}

TEST(ExpMap, RescalingIdentity) {
  // exp_p(t v) = gamma_v(t)
  const auto g = warped_metric(2);
  const Vector p = vec({0.2, -0.4});
  const Vector v = vec({0.5, 0.3});
  const Trajectory traj = geodesic(g, p, v, 1.0, kGeodesicTol, {0.25, 0.5, 0.75});
  for (double t : {0.25, 0.5, 0.75}) {
    EXPECT_LT((exp_map(g, p, t * v) - traj.at(t).point).norm(), 1e-8) << "t = " << t;
  }
}

TEST(ExpMap, DifferentialAtZeroIsIdentity) {
  for (const auto& g : {warped_metric(2), polar_metric(), sphere_chart_metric()}) {
    const Vector p = vec({1.1, 0.4});
    EXPECT_LT((exp_differential_at_zero(g, p) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-5) << g.name();
  }
}

TEST(ExpMap, ZeroVectorIsBasePoint) {
  const auto g = warped_metric(3);
  const Vector p = vec({0.1, 0.2, 0.3});
  EXPECT_EQ(exp_map(g, p, Vector::Zero(3)), p);
}

TEST(GeodesicDomain, AcceptedVelocitiesAreStarShaped) {
  const auto g = polar_metric();
  const GeodesicDomainPolicy policy;
  const Vector p = vec({1.0, 0.0});
  for (double a : {0.0, 1.0, 2.0, 3.0, 4.0, 5.0}) {
    const Vector v = 1.8 * vec({std::cos(a), std::sin(a)});
    if (!policy.accepts(g, p, v)) continue;
    for (double s = 0.0; s <= 1.0; s += 0.125) EXPECT_TRUE(policy.accepts(g, p, s * v)) << a << " " << s;
  }
  EXPECT_FALSE(policy.accepts(g, p, vec({-1.5, 0.0})));
  EXPECT_TRUE(policy.accepts(g, p, vec({-0.5, 0.0})));
}
