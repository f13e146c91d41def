#include <benchmark/benchmark.h>

#include "tubular/bundle_extension.hpp"
#include "tubular/embedding.hpp"
#include "tubular/realization.hpp"
#include "tubular/riemannian.hpp"

using namespace tubular;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

struct CircleFixture {
  ParametrizedSubmanifold N = circle_submanifold(1.0, -1.3, 1.3);
  MetricField bg = euclidean_metric(2);
  std::vector<Vector> grid = parameter_grid(N, -1.17, 1.17, 16);
  RadiusFunction delta = RadiusFunction::constant(0.5, grid);
  TubularEmbedding psi{N, bg, bent_formula(N, 0.1), delta, "psi"};
  TubularEmbedding phi = reference_embedding(bg, N, delta);
  DifferentiableMap chi = build_chi(psi, phi);
  MetricField g = pullback_metric(chi, bg);
};

const CircleFixture& circle() {
  static const CircleFixture f;
  return f;
}

void BM_ExpMapWarped(benchmark::State& state) {
  const MetricField g = warped_metric(3);
  Vector p = Vector::Zero(3);
  Vector v(3);
  v << 0.4, -0.2, 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(exp_map(g, p, v));
}
BENCHMARK(BM_ExpMapWarped);

void BM_ExpMapSphereIntegrated(benchmark::State& state) {
  MetricField g = sphere_chart_metric();
  g.closed_form_exp = nullptr;
  const Vector p = vec2(1.2, 0.3);
  const Vector v = vec2(0.5, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(exp_map(g, p, v));
}
BENCHMARK(BM_ExpMapSphereIntegrated);

void BM_Christoffel(benchmark::State& state) {
  const MetricField g = warped_metric(static_cast<int>(state.range(0)));
  const Vector x = Vector::Constant(state.range(0), 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(christoffel(g, x));
}
BENCHMARK(BM_Christoffel)->Arg(2)->Arg(3)->Arg(6);

void BM_TubeInverse(benchmark::State& state) {
  const auto& f = circle();
  const Vector a = f.psi(Vector::Constant(1, 0.4), Vector::Constant(1, 0.2));
  const Vector b = f.psi(Vector::Constant(1, -0.7), Vector::Constant(1, -0.3));
  bool flip = false;
  // Alternate targets so the last-inverse memo does not short-circuit.
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.psi.inverse(flip ? a : b));
    flip = !flip;
  }
}
BENCHMARK(BM_TubeInverse);

void BM_PullbackMetricEval(benchmark::State& state) {
  const auto& f = circle();
  const Vector x = f.psi(Vector::Constant(1, 0.4), Vector::Constant(1, 0.2));
  for (auto _ : state) benchmark::DoNotOptimize(f.g(x));
}
BENCHMARK(BM_PullbackMetricEval);

void BM_SigmaInverse(benchmark::State& state) {
  const double s = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sigma_inverse(s));
}
BENCHMARK(BM_SigmaInverse)->Arg(1)->Arg(10)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
