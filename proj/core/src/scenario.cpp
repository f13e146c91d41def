#include "tubular/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "tubular/bundle_extension.hpp"
#include "tubular/euler_like.hpp"

namespace tubular {

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ConfigError, field + ": " + what);
}

bool is_one_of(const std::string& s, std::initializer_list<const char*> names) {
  return std::any_of(names.begin(), names.end(), [&](const char* n) { return s == n; });
}

int submanifold_param_dim(const std::string& kind) { return kind == "point" ? 0 : 1; }

}  // namespace

double Scenario::sample_lo() const {
  const double len = submanifold.hi - submanifold.lo;
  return submanifold.lo + 0.05 * len;
}

double Scenario::sample_hi() const {
  const double len = submanifold.hi - submanifold.lo;
  return submanifold.hi - 0.05 * len;
}

void validate(const Scenario& s) {
  if (s.name.empty()) config_error("name", "must not be empty");
  for (char c : s.name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) {
      config_error("name", "only letters, digits, '-', '_' and '.' are allowed");
    }
  }
  const int n = s.ambient_dim;
  if (n < 1 || n > 16) config_error("ambient_dim", "must be between 1 and 16");

  const std::string& mk = s.metric.kind;
  if (!is_one_of(mk, {"euclidean", "sphere-chart", "polar", "warped"})) {
    config_error("metric.kind", "unknown metric '" + mk + "'");
  }
  if ((mk == "sphere-chart" || mk == "polar") && n != 2) config_error("metric.kind", "'" + mk + "' needs ambient_dim 2");
  if (!(s.metric.pole_margin > 0.0 && s.metric.pole_margin < 0.5)) {
    config_error("metric.pole_margin", "must lie in (0, 0.5)");
  }

  const SubmanifoldSpec& sm = s.submanifold;
  if (!is_one_of(sm.kind, {"point", "line", "circle", "helix", "equator"})) {
    config_error("submanifold.kind", "unknown submanifold '" + sm.kind + "'");
  }
  if (sm.kind == "point" && static_cast<int>(sm.at.size()) != n) {
    config_error("submanifold.at", "needs ambient_dim coordinates");
  }
  if (sm.kind == "line") {
    if (static_cast<int>(sm.origin.size()) != n) config_error("submanifold.origin", "needs ambient_dim coordinates");
    if (static_cast<int>(sm.direction.size()) != n) {
      config_error("submanifold.direction", "needs ambient_dim coordinates");
    }
    double len = 0.0;
    for (double d : sm.direction) len += d * d;
    if (!(len > 0.0)) config_error("submanifold.direction", "must be nonzero");
  }
  if ((sm.kind == "circle" || sm.kind == "equator") && n != 2) {
    config_error("submanifold.kind", "'" + sm.kind + "' needs ambient_dim 2");
  }
  if (sm.kind == "helix" && n != 3) config_error("submanifold.kind", "'helix' needs ambient_dim 3");
  if (sm.kind == "equator" && mk != "sphere-chart") {
    config_error("submanifold.kind", "'equator' lives in the sphere-chart metric");
  }
  if (sm.kind == "circle" && !(sm.radius > 0.0)) config_error("submanifold.radius", "must be positive");
  if (sm.kind == "circle" && !(sm.hi - sm.lo < 2.0 * std::numbers::pi)) {
    config_error("submanifold.hi", "circle arcs must be shorter than a full turn");
  }
  if (sm.kind != "point" && !(sm.lo < sm.hi)) config_error("submanifold.lo", "must be smaller than hi");
  if (!(submanifold_param_dim(sm.kind) < n)) config_error("ambient_dim", "must exceed the submanifold dimension");

  if (!is_one_of(s.embedding.kind, {"bent", "linear"})) {
    config_error("embedding.kind", "unknown embedding '" + s.embedding.kind + "'");
  }
  if (!std::isfinite(s.embedding.bend)) config_error("embedding.bend", "must be finite");
  if (!(s.delta0 > 0.0) || !std::isfinite(s.delta0)) config_error("delta0", "must be positive");

  const SampleCounts& c = s.samples;
  if (c.grid < (submanifold_param_dim(sm.kind) == 0 ? 1 : 2)) config_error("samples.grid", "too small");
  if (c.diagram < 1) config_error("samples.diagram", "must be positive");
  if (c.reconstruction < 1) config_error("samples.reconstruction", "must be positive");
  if (c.point_case < 1) config_error("samples.point_case", "must be positive");
  if (c.appendix < 1) config_error("samples.appendix", "must be positive");

  const Tolerances& t = s.tolerances;
  const std::pair<const char*, double> tols[] = {
      {"tolerances.diagram", t.diagram},       {"tolerances.euler_like", t.euler_like},
      {"tolerances.reconstruction", t.reconstruction}, {"tolerances.point_case", t.point_case},
      {"tolerances.appendix", t.appendix},     {"tolerances.flow", t.flow}};
  for (const auto& [field, value] : tols) {
    if (!(value > 0.0) || !std::isfinite(value)) config_error(field, "must be positive");
  }
}

// ---------------------------------------------------------------------------
// Builtins

namespace {

std::vector<Scenario> make_builtins() {
  std::vector<Scenario> out;

  Scenario point;
  point.name = "point-2d";
  point.ambient_dim = 2;
  point.submanifold.kind = "point";
  point.submanifold.at = {0.0, 0.0};
  point.embedding = {"bent", 0.1};
  point.delta0 = 1.0;
  point.seed = 11;
  out.push_back(point);

  Scenario flat;
  flat.name = "flat-slice";
  flat.ambient_dim = 3;
  flat.submanifold.kind = "line";
  flat.submanifold.origin = {0.0, 0.0, 0.0};
  flat.submanifold.direction = {1.0, 0.0, 0.0};
  flat.submanifold.lo = -1.0;
  flat.submanifold.hi = 1.0;
  flat.embedding.kind = "linear";
  flat.delta0 = 1.0;
  flat.seed = 12;
  flat.tolerances.diagram = 1e-9;
  flat.tolerances.euler_like = 1e-9;
  flat.tolerances.reconstruction = 1e-9;
  flat.tolerances.flow = 1e-13;
  out.push_back(flat);

  Scenario circle;
  circle.name = "circle";
  circle.ambient_dim = 2;
  circle.submanifold.kind = "circle";
  circle.submanifold.radius = 1.0;
  circle.submanifold.lo = -1.3;
  circle.submanifold.hi = 1.3;
  circle.embedding = {"bent", 0.1};
  circle.delta0 = 2.0;
  circle.seed = 13;
  out.push_back(circle);

  Scenario helix;
  helix.name = "helix";
  helix.ambient_dim = 3;
  helix.submanifold.kind = "helix";
  helix.submanifold.pitch = 0.5;
  helix.submanifold.lo = -2.0;
  helix.submanifold.hi = 2.0;
  helix.embedding = {"bent", 0.1};
  helix.delta0 = 0.5;
  helix.seed = 14;
  out.push_back(helix);

  Scenario sphere;
  sphere.name = "sphere-equator";
  sphere.ambient_dim = 2;
  sphere.metric.kind = "sphere-chart";
  sphere.submanifold.kind = "equator";
  sphere.submanifold.lo = -1.0;
  sphere.submanifold.hi = 1.0;
  sphere.embedding = {"bent", 0.1};
  sphere.delta0 = 3.0;
  sphere.seed = 15;
  out.push_back(sphere);

  return out;
}

}  // namespace

const std::vector<Scenario>& builtin_scenarios() {
  static const std::vector<Scenario> builtins = make_builtins();
  return builtins;
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> names;
  for (const Scenario& s : builtin_scenarios()) names.push_back(s.name);
  return names;
}

const Scenario& builtin_scenario(std::string_view name) {
  for (const Scenario& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  throw Error(ErrorCode::ConfigError, "unknown scenario '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// YAML

namespace {

class YamlReader {
 public:
  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& what) const {
    std::string where = node.Mark().line >= 0 ? "line " + std::to_string(node.Mark().line + 1) + ": " : "";
    throw Error(ErrorCode::ConfigError, where + field + ": " + what);
  }

  void expect_map(const YAML::Node& node, const std::string& field) const {
    if (!node.IsMap()) fail(node, field.empty() ? "document" : field, "expected a mapping");
  }

  void check_keys(const YAML::Node& node, const std::string& prefix, std::initializer_list<const char*> allowed) {
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      const std::string field = prefix.empty() ? key : prefix + "." + key;
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
        fail(kv.first, field, "unknown key");
      }
      lines_[field] = kv.first.Mark().line + 1;
    }
  }

  template <class T>
  void read(const YAML::Node& parent, const char* key, const std::string& prefix, T& target, bool required = false) {
    const std::string field = prefix.empty() ? key : prefix + "." + key;
    const YAML::Node node = parent[key];
    if (!node) {
      if (required) fail(parent, field, "missing required key");
      return;
    }
    try {
      if constexpr (std::is_same_v<T, std::vector<double>>) {
        if (!node.IsSequence()) fail(node, field, "expected a list of numbers");
        target.clear();
        for (const auto& item : node) target.push_back(item.as<double>());
      } else {
        if (!node.IsScalar()) fail(node, field, "expected a scalar");
        target = node.as<T>();
      }
    } catch (const YAML::BadConversion&) {
      fail(node, field, std::is_same_v<T, std::string> ? "expected a string" : "expected a number");
    }
  }

  /// Line of a field recorded while reading, or 0.
  [[nodiscard]] int line_of(const std::string& field) const {
    for (std::string f = field;;) {
      auto it = lines_.find(f);
      if (it != lines_.end()) return it->second;
      const auto dot = f.rfind('.');
      if (dot == std::string::npos) return 0;
      f.resize(dot);
    }
  }

 private:
  std::map<std::string, int> lines_;
};

}  // namespace

Scenario parse_scenario(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::ConfigError, "line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  YamlReader r;
  r.expect_map(root, "");
  r.check_keys(root, "", {"name", "ambient_dim", "metric", "submanifold", "embedding", "delta0", "seed", "samples",
                          "tolerances"});

  Scenario s;
  r.read(root, "name", "", s.name, true);
  r.read(root, "ambient_dim", "", s.ambient_dim, true);
  r.read(root, "delta0", "", s.delta0, true);
  r.read(root, "seed", "", s.seed);

  const std::string section_required[] = {"metric", "submanifold", "embedding"};
  for (const std::string& sec : section_required) {
    if (!root[sec]) r.fail(root, sec, "missing required section");
  }

  const YAML::Node metric = root["metric"];
  r.expect_map(metric, "metric");
  r.check_keys(metric, "metric", {"kind", "pole_margin"});
  r.read(metric, "kind", "metric", s.metric.kind, true);
  r.read(metric, "pole_margin", "metric", s.metric.pole_margin);

  const YAML::Node sub = root["submanifold"];
  r.expect_map(sub, "submanifold");
  r.check_keys(sub, "submanifold", {"kind", "at", "origin", "direction", "radius", "pitch", "lo", "hi"});
  r.read(sub, "kind", "submanifold", s.submanifold.kind, true);
  r.read(sub, "at", "submanifold", s.submanifold.at);
  r.read(sub, "origin", "submanifold", s.submanifold.origin);
  r.read(sub, "direction", "submanifold", s.submanifold.direction);
  r.read(sub, "radius", "submanifold", s.submanifold.radius);
  r.read(sub, "pitch", "submanifold", s.submanifold.pitch);
  r.read(sub, "lo", "submanifold", s.submanifold.lo);
  r.read(sub, "hi", "submanifold", s.submanifold.hi);

  const YAML::Node emb = root["embedding"];
  r.expect_map(emb, "embedding");
  r.check_keys(emb, "embedding", {"kind", "bend"});
  r.read(emb, "kind", "embedding", s.embedding.kind, true);
  r.read(emb, "bend", "embedding", s.embedding.bend);

  if (const YAML::Node samples = root["samples"]) {
    r.expect_map(samples, "samples");
    r.check_keys(samples, "samples", {"grid", "diagram", "reconstruction", "point_case", "appendix"});
    r.read(samples, "grid", "samples", s.samples.grid);
    r.read(samples, "diagram", "samples", s.samples.diagram);
    r.read(samples, "reconstruction", "samples", s.samples.reconstruction);
    r.read(samples, "point_case", "samples", s.samples.point_case);
    r.read(samples, "appendix", "samples", s.samples.appendix);
  }
  if (const YAML::Node tols = root["tolerances"]) {
    r.expect_map(tols, "tolerances");
    r.check_keys(tols, "tolerances", {"diagram", "euler_like", "reconstruction", "point_case", "appendix", "flow"});
    r.read(tols, "diagram", "tolerances", s.tolerances.diagram);
    r.read(tols, "euler_like", "tolerances", s.tolerances.euler_like);
    r.read(tols, "reconstruction", "tolerances", s.tolerances.reconstruction);
    r.read(tols, "point_case", "tolerances", s.tolerances.point_case);
    r.read(tols, "appendix", "tolerances", s.tolerances.appendix);
    r.read(tols, "flow", "tolerances", s.tolerances.flow);
  }

  try {
    validate(s);
  } catch (const Error& e) {
    const std::string msg = e.what();
    // Messages read "ConfigError: <field>: <what>"; prefix the field's line.
    const std::string body = msg.substr(msg.find(": ") + 2);
    const int line = r.line_of(body.substr(0, body.find(':')));
    if (line > 0) throw Error(ErrorCode::ConfigError, "line " + std::to_string(line) + ": " + body);
    throw;
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

Scenario resolve_scenario(const std::string& name_or_path) {
  for (const Scenario& s : builtin_scenarios()) {
    if (s.name == name_or_path) return s;
  }
  if (std::filesystem::exists(name_or_path)) return load_scenario(name_or_path);
  throw Error(ErrorCode::ConfigError, "'" + name_or_path + "' is neither a builtin scenario nor a readable file");
}

// ---------------------------------------------------------------------------
// Construction

namespace {

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

}  // namespace

MetricField make_metric(const MetricSpec& spec, int ambient_dim) {
  if (spec.kind == "euclidean") return euclidean_metric(ambient_dim);
  if (spec.kind == "sphere-chart") return sphere_chart_metric(spec.pole_margin);
  if (spec.kind == "polar") return polar_metric();
  if (spec.kind == "warped") return warped_metric(ambient_dim);
  config_error("metric.kind", "unknown metric '" + spec.kind + "'");
}

ParametrizedSubmanifold make_submanifold(const SubmanifoldSpec& spec, int ambient_dim) {
  (void)ambient_dim;
  if (spec.kind == "point") return point_submanifold(to_vector(spec.at));
  if (spec.kind == "line") {
    return line_submanifold(to_vector(spec.origin), to_vector(spec.direction), spec.lo, spec.hi);
  }
  if (spec.kind == "circle") return circle_submanifold(spec.radius, spec.lo, spec.hi);
  if (spec.kind == "helix") return helix_submanifold(spec.pitch, spec.lo, spec.hi);
  if (spec.kind == "equator") return equator_submanifold(spec.lo, spec.hi);
  config_error("submanifold.kind", "unknown submanifold '" + spec.kind + "'");
}

std::vector<Vector> ScenarioSetup::samples(double fraction, std::size_t count, std::uint64_t stream) const {
  const std::uint64_t seed = scenario.seed * 0x9E3779B97F4A7C15ULL + stream;
  return random_tube_samples(psi, scenario.sample_lo(), scenario.sample_hi(), fraction, count, seed);
}

ScenarioSetup setup_scenario(const Scenario& s) {
  validate(s);
  MetricField background = make_metric(s.metric, s.ambient_dim);
  ParametrizedSubmanifold N = make_submanifold(s.submanifold, s.ambient_dim);
  std::vector<Vector> grid = parameter_grid(N, s.sample_lo(), s.sample_hi(), s.samples.grid);
  validate_submanifold(N, grid);
  std::vector<Vector> points;
  for (const Vector& u : grid) points.push_back(N.point(u));
  validate_metric(background, points);

  RadiusFunction delta = tubular_radius_estimate(background, N, grid, s.delta0);
  EmbeddingFormula formula = s.embedding.kind == "linear" ? linear_formula(N) : bent_formula(N, s.embedding.bend);
  TubularEmbedding psi(N, background, formula, delta, s.name);
  TubularEmbedding phi = reference_embedding(background, N, delta);
  DifferentiableMap chi = build_chi(psi, phi);
  MetricField g = pullback_metric(chi, background, s.name + "-pullback");
  return ScenarioSetup{s, background, N, grid, delta, psi, phi, chi, g};
}

// ---------------------------------------------------------------------------
// Pipeline

std::vector<Stage> planned_stages(const Scenario& s) {
  const bool point = submanifold_param_dim(s.submanifold.kind) == 0;
  return {point ? Stage::PointCase : Stage::Diagram, Stage::EulerLike, Stage::Reconstruction, Stage::Appendix};
}

namespace {

struct Residuals {
  std::size_t samples = 0;
  double max = 0.0;
  double sum = 0.0;

  void add(double r) {
    ++samples;
    max = std::max(max, std::isnan(r) ? std::numeric_limits<double>::infinity() : r);
    sum += r;
  }
  [[nodiscard]] double mean() const { return samples ? sum / static_cast<double>(samples) : 0.0; }
};

constexpr double kIsometryTimes[] = {0.25, 0.5, 0.75, 1.0};
constexpr std::size_t kIsometrySamples = 8;

Residuals diagram_stage(const ScenarioSetup& setup) {
  const Scenario& s = setup.scenario;
  // nu(chi) = id along N is the precondition of the construction.
  for (const Vector& u : setup.grid) (void)correction_eta(setup.chi, setup.background, setup.N, u);

  const auto samples = setup.samples(0.9, static_cast<std::size_t>(s.samples.diagram), 1);
  const DiagramReport report = verify_main_diagram(setup.psi, setup.g, samples);
  Residuals out{report.samples, report.max_residual, report.mean_residual * static_cast<double>(report.samples)};

  double iso = 0.0;
  for (std::size_t i = 0; i < std::min(kIsometrySamples, samples.size()); ++i) {
    const Vector u = setup.psi.u_of(samples[i]);
    const Vector v = canonical_normal(setup.psi, setup.g, u, setup.psi.w_of(samples[i]));
    iso = std::max(iso, isometry_geodesic_check(setup.chi, setup.g, setup.background, setup.N, u, v, kIsometryTimes));
  }
  out.max = std::max(out.max, iso);
  return out;
}

Residuals point_case_stage(const ScenarioSetup& setup) {
  const Scenario& s = setup.scenario;
  const double radius = setup.delta.min_on_grid();
  const auto samples = setup.samples(1.0, static_cast<std::size_t>(s.samples.point_case), 2);
  const double times[] = {0.25, 0.5, 0.75};
  Residuals out;
  for (const Vector& v : samples) {
    const Vector one[] = {v};
    out.add(verify_point_case(setup.psi.map(), 1.5 * radius, one, times).residual);
  }
  return out;
}

Residuals euler_like_stage(const ScenarioSetup& setup, double tol) {
  const VectorFieldOracle X = pushforward_euler_field(setup.psi);
  Residuals out;
  for (const Vector& u : setup.grid) {
    const Vector one[] = {u};
    out.add(is_euler_like(X, setup.background, setup.N, one, tol).residual);
  }
  return out;
}

Residuals reconstruction_stage(const ScenarioSetup& setup, double tol) {
  const Scenario& s = setup.scenario;
  const VectorFieldOracle X = pushforward_euler_field(setup.psi);
  ReconstructionOptions options;
  options.flow_tol = s.tolerances.flow;
  options.tol = tol;
  Residuals out;
  for (const Vector& uw : setup.samples(0.5, static_cast<std::size_t>(s.samples.reconstruction), 3)) {
    out.add((reconstruct_embedding(X, setup.phi, uw, options) - setup.psi.map()(uw)).norm());
  }
  return out;
}

Residuals appendix_stage(const ScenarioSetup& setup) {
  const Scenario& s = setup.scenario;
  const TubularEmbedding& psi = setup.psi;
  const int k = psi.param_dim();
  const int r = psi.codim();

  BundleRegion region;
  region.base_dim = k;
  region.rank = r;
  region.bundle_metric = [r](const Vector&) -> Matrix { return Matrix::Identity(r, r); };
  region.delta = [delta = setup.delta](const Vector& u) { return delta(u); };
  const DifferentiableMap F = psi.map();
  const DifferentiableMap extended = extend_map(F, region);
  const std::size_t count = static_cast<std::size_t>(s.samples.appendix);
  const double inf = std::numeric_limits<double>::infinity();

  Residuals out;
  // Exact agreement on W'.
  for (const Vector& uw : setup.samples(0.5, count, 4)) {
    const Vector a = extended(uw);
    const Vector b = F(uw);
    out.add(a == b ? 0.0 : std::max((a - b).norm(), std::numeric_limits<double>::min()));
  }
  // Round trip near the rim of W and the extension far outside it.
  for (const Vector& uw : setup.samples(1.0, count, 5)) {
    const Vector u = psi.u_of(uw);
    const Vector w = psi.w_of(uw);
    if (w.norm() == 0.0) continue;
    const double d = setup.delta(u);
    const BundlePoint rim{u, 0.95 * d * w.normalized()};
    const BundlePoint back = bundle_diffeo_inverse(region, bundle_diffeo(region, rim));
    out.add((back.v - rim.v).norm() + (back.p - rim.p).norm());

    const BundlePoint far{u, 10.0 * d * w.normalized()};
    const BundlePoint pulled = bundle_diffeo_inverse(region, far);
    const Vector value = extended(psi.join(far.p, far.v));
    const bool ok = value.allFinite() && region.fiber_norm(u, pulled.v) < d && value == F(psi.join(u, pulled.v));
    out.add(ok ? 0.0 : inf);
  }
  return out;
}

}  // namespace

std::vector<ResidualReport> run_scenario(const Scenario& s_in, const RunOptions& options) {
  Scenario s = s_in;
  if (options.samples) {
    s.samples.diagram = *options.samples;
    s.samples.point_case = *options.samples;
  }
  auto tolerance_of = [&](Stage stage) {
    if (options.tolerance) return *options.tolerance;
    switch (stage) {
      case Stage::Diagram: return s.tolerances.diagram;
      case Stage::EulerLike: return s.tolerances.euler_like;
      case Stage::Reconstruction: return s.tolerances.reconstruction;
      case Stage::PointCase: return s.tolerances.point_case;
      case Stage::Appendix: return s.tolerances.appendix;
    }
    return 0.0;
  };
  auto log = [&](const std::string& msg) {
    if (options.log) options.log(msg);
  };

  const std::vector<Stage> stages = planned_stages(s);
  std::vector<ResidualReport> reports;

  std::optional<ScenarioSetup> setup;
  try {
    setup.emplace(setup_scenario(s));
  } catch (const Error& e) {
    log(s.name + ": setup failed: " + e.what());
    for (Stage stage : stages) reports.push_back(failed_report(s.name, stage, tolerance_of(stage)));
    return reports;
  }
  log(s.name + ": certified tubular radius " + std::to_string(setup->delta.min_on_grid()));

  for (Stage stage : stages) {
    const double tol = tolerance_of(stage);
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
      if (!options.timing) return 0.0;
      return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    };
    try {
      Residuals res;
      switch (stage) {
        case Stage::Diagram: res = diagram_stage(*setup); break;
        case Stage::PointCase: res = point_case_stage(*setup); break;
        case Stage::EulerLike: res = euler_like_stage(*setup, tol); break;
        case Stage::Reconstruction: res = reconstruction_stage(*setup, tol); break;
        case Stage::Appendix: res = appendix_stage(*setup); break;
      }
      reports.push_back(make_report(s.name, stage, res.samples, res.max, res.mean(), tol, elapsed()));
    } catch (const Error& e) {
      log(s.name + ": stage " + std::string(to_string(stage)) + " failed: " + e.what());
      reports.push_back(failed_report(s.name, stage, tol, elapsed()));
    }
  }
  return reports;
}

const std::vector<CoverageEntry>& coverage_manifest() {
  static const std::vector<CoverageEntry> manifest{
      {"euler vector field of a vector bundle", Stage::EulerLike},
      {"linear approximation of a field vanishing on N", Stage::EulerLike},
      {"pushforward of the euler field by a tubular embedding", Stage::EulerLike},
      {"flow reconstruction of the embedding from an euler-like field", Stage::Reconstruction},
      {"zero-section and induced normal map of a tubular embedding", Stage::Diagram},
      {"exponential map on its geodesic domain", Stage::Diagram},
      {"normal exponential map", Stage::Diagram},
      {"canonical isomorphism from the normal bundle to the metric normal bundle", Stage::Diagram},
      {"reference embedding as normal exponential composed with the canonical isomorphism", Stage::Diagram},
      {"chi as reference embedding composed with the inverse of psi", Stage::Diagram},
      {"pullback metric under chi", Stage::Diagram},
      {"differential of chi as identity plus a tangent correction", Stage::Diagram},
      {"geodesic correspondence under chi", Stage::Diagram},
      {"commutative diagram of normal exponential and embedding", Stage::Diagram},
      {"single point chart as exponential map of the pushed-forward flat metric", Stage::PointCase},
      {"stereographic profile t / sqrt(1 - t^2)", Stage::Appendix},
      {"smooth cutoff rho and scaling eta", Stage::Appendix},
      {"interval diffeomorphism sigma and its inverse via tau", Stage::Appendix},
      {"fiberwise diffeomorphism from W onto the bundle and its inverse", Stage::Appendix},
      {"extension of a map defined on W to the whole bundle", Stage::Appendix},
  };
  return manifest;
}

}  // namespace tubular
