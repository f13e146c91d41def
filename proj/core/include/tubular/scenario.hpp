#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tubular/embedding.hpp"
#include "tubular/realization.hpp"
#include "tubular/report.hpp"

namespace tubular {

struct MetricSpec {
  /// euclidean | sphere-chart | polar | warped
  std::string kind = "euclidean";
  double pole_margin = 0.01;

  bool operator==(const MetricSpec&) const = default;
};

struct SubmanifoldSpec {
  /// point | line | circle | helix | equator
  std::string kind = "point";
  std::vector<double> at;         // point
  std::vector<double> origin;     // line
  std::vector<double> direction;  // line
  double radius = 1.0;            // circle
  double pitch = 0.5;             // helix
  double lo = -1.0;
  double hi = 1.0;

  bool operator==(const SubmanifoldSpec&) const = default;
};

struct EmbeddingSpec {
  /// bent | linear
  std::string kind = "bent";
  double bend = 0.1;

  bool operator==(const EmbeddingSpec&) const = default;
};

struct SampleCounts {
  int grid = 16;
  int diagram = 200;
  int reconstruction = 8;
  int point_case = 100;
  int appendix = 64;

  bool operator==(const SampleCounts&) const = default;
};

struct Tolerances {
  double diagram = 1e-5;
  double euler_like = 1e-5;
  double reconstruction = 1e-4;
  double point_case = 1e-6;
  double appendix = 1e-12;
  /// Integration tolerance for the reconstruction flows.
  double flow = 1e-10;

  bool operator==(const Tolerances&) const = default;
};

struct Scenario {
  std::string name;
  int ambient_dim = 2;
  MetricSpec metric;
  SubmanifoldSpec submanifold;
  EmbeddingSpec embedding;
  /// Initial guess handed to the tubular radius search.
  double delta0 = 1.0;
  std::uint64_t seed = 1;
  SampleCounts samples;
  Tolerances tolerances;

  bool operator==(const Scenario&) const = default;

  /// Parameter interval the grid and samples are drawn from: the domain
  /// shrunk by 5% of its length at both ends.
  [[nodiscard]] double sample_lo() const;
  [[nodiscard]] double sample_hi() const;
};

/// Resolves names and checks ranges. Throws ConfigError naming the field.
void validate(const Scenario& s);

/// point-2d, flat-slice, circle, helix, sphere-equator.
[[nodiscard]] const std::vector<Scenario>& builtin_scenarios();
[[nodiscard]] std::vector<std::string> builtin_names();
/// Throws ConfigError for an unknown name.
[[nodiscard]] const Scenario& builtin_scenario(std::string_view name);

/// Parses a YAML scenario description. Unknown keys, wrong types and
/// unresolvable names throw ConfigError with a line number and field path.
[[nodiscard]] Scenario parse_scenario(std::string_view yaml_text);
/// Throws IoError if the file cannot be read.
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);
/// A builtin name, or else a path to a YAML file.
[[nodiscard]] Scenario resolve_scenario(const std::string& name_or_path);

[[nodiscard]] MetricField make_metric(const MetricSpec& spec, int ambient_dim);
[[nodiscard]] ParametrizedSubmanifold make_submanifold(const SubmanifoldSpec& spec, int ambient_dim);

/// Everything the pipeline derives from a scenario before verification.
struct ScenarioSetup {
  Scenario scenario;
  MetricField background;
  ParametrizedSubmanifold N;
  std::vector<Vector> grid;
  RadiusFunction delta;
  TubularEmbedding psi;
  TubularEmbedding phi;
  DifferentiableMap chi;
  MetricField g;

  /// Seeded samples (u, w) with |w| <= fraction * delta.
  [[nodiscard]] std::vector<Vector> samples(double fraction, std::size_t count, std::uint64_t stream) const;
};

/// Certifies the radius, then builds psi, the reference embedding phi,
/// chi = phi o psi^{-1} and the pullback metric g.
[[nodiscard]] ScenarioSetup setup_scenario(const Scenario& s);

struct RunOptions {
  std::optional<double> tolerance;
  std::optional<int> samples;
  /// Record wall-clock time per stage; off by default so reports are
  /// reproducible bit for bit.
  bool timing = false;
  std::function<void(const std::string&)> log;
};

/// Stages run_scenario emits for this scenario, in order.
[[nodiscard]] std::vector<Stage> planned_stages(const Scenario& s);

/// Runs every planned stage. Stage errors become failed reports.
[[nodiscard]] std::vector<ResidualReport> run_scenario(const Scenario& s, const RunOptions& options = {});

/// One formula of the construction and the stage that exercises it.
struct CoverageEntry {
  std::string formula;
  Stage stage;
};

[[nodiscard]] const std::vector<CoverageEntry>& coverage_manifest();

}  // namespace tubular
