#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include "tubular/report.hpp"
#include "tubular/scenario.hpp"

using namespace tubular;

namespace {

std::string error_text(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

const char* kValid = R"(name: custom
ambient_dim: 2
metric:
  kind: euclidean
submanifold:
  kind: circle
  radius: 1.0
  lo: -1.0
  hi: 1.0
embedding:
  kind: bent
  bend: 0.05
delta0: 1.0
)";

Scenario quick(const std::string& name) {
  Scenario s = builtin_scenario(name);
  s.samples.grid = 4;
  s.samples.diagram = 4;
  s.samples.point_case = 4;
  s.samples.reconstruction = 2;
  s.samples.appendix = 8;
  return s;
}

std::vector<ResidualReport> sample_reports() {
  return {make_report("circle", Stage::Diagram, 200, 7.25e-10, 1.5e-10, 1e-5, 12.5),
          make_report("odd_name.v2", Stage::Reconstruction, 8, 0.1, 0.05, 1e-4),
          failed_report("point-2d", Stage::Appendix, 1e-12)};
}

}  // namespace

TEST(ScenarioYaml, ParsesValidDocument) {
  const Scenario s = parse_scenario(kValid);
  EXPECT_EQ(s.name, "custom");
  EXPECT_EQ(s.submanifold.kind, "circle");
  EXPECT_DOUBLE_EQ(s.embedding.bend, 0.05);
  EXPECT_EQ(s.samples, SampleCounts{});
  EXPECT_EQ(s.tolerances, Tolerances{});
}

TEST(ScenarioYaml, UnknownKeyNamesLineAndField) {
  std::string doc = kValid;
  doc.replace(doc.find("  bend: 0.05"), 12, "  bendd: 0.05");
  const std::string msg = error_text([&] { (void)parse_scenario(doc); });
  EXPECT_NE(msg.find("ConfigError"), std::string::npos);
  EXPECT_NE(msg.find("line 12"), std::string::npos) << msg;
  EXPECT_NE(msg.find("embedding.bendd"), std::string::npos) << msg;
}

TEST(ScenarioYaml, UnknownSubmanifoldNamesField) {
  std::string doc = kValid;
  doc.replace(doc.find("kind: circle"), 12, "kind: torus!");
  const std::string msg = error_text([&] { (void)parse_scenario(doc); });
  EXPECT_NE(msg.find("submanifold.kind"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 6"), std::string::npos) << msg;
}

TEST(ScenarioYaml, WrongTypeAndMissingKey) {
  std::string doc = kValid;
  doc.replace(doc.find("delta0: 1.0"), 11, "delta0: big");
  EXPECT_NE(error_text([&] { (void)parse_scenario(doc); }).find("delta0"), std::string::npos);
  std::string no_name = kValid;
  no_name.erase(0, no_name.find('\n') + 1);
  EXPECT_NE(error_text([&] { (void)parse_scenario(no_name); }).find("name"), std::string::npos);
  EXPECT_NE(error_text([&] { (void)parse_scenario("name: [unclosed"); }).find("line"), std::string::npos);
}

TEST(ScenarioYaml, RangeChecks) {
  std::string doc = kValid;
  doc.replace(doc.find("delta0: 1.0"), 11, "delta0: -1.");
  EXPECT_NE(error_text([&] { (void)parse_scenario(doc); }).find("delta0"), std::string::npos);
  Scenario s = builtin_scenario("circle");
  s.submanifold.lo = 2.0;
  EXPECT_THROW(validate(s), Error);
}

TEST(ScenarioYaml, ShippedConfigsEqualBuiltins) {
  const std::filesystem::path dir = std::filesystem::path(TUBULAR_SOURCE_DIR) / "configs";
  for (const std::string& name : builtin_names()) {
    const Scenario loaded = load_scenario(dir / (name + ".yaml"));
    EXPECT_EQ(loaded, builtin_scenario(name)) << name;
  }
}

TEST(ScenarioYaml, ResolveAndLoadErrors) {
  EXPECT_EQ(resolve_scenario("helix").name, "helix");
  EXPECT_NE(error_text([] { (void)resolve_scenario("no-such-thing"); }).find("ConfigError"), std::string::npos);
  EXPECT_NE(error_text([] { (void)load_scenario("/nonexistent/x.yaml"); }).find("IoError"), std::string::npos);
}

TEST(Builtins, NamesAndStages) {
  const auto names = builtin_names();
  EXPECT_EQ(names, (std::vector<std::string>{"point-2d", "flat-slice", "circle", "helix", "sphere-equator"}));
  EXPECT_EQ(planned_stages(builtin_scenario("point-2d")).front(), Stage::PointCase);
  EXPECT_EQ(planned_stages(builtin_scenario("circle")).front(), Stage::Diagram);
  for (const auto& s : builtin_scenarios()) EXPECT_NO_THROW(validate(s));
}

TEST(Reports, StageNamesRoundTrip) {
  for (Stage st : {Stage::Diagram, Stage::EulerLike, Stage::Reconstruction, Stage::PointCase, Stage::Appendix}) {
    EXPECT_EQ(stage_from_string(to_string(st)), st);
  }
  EXPECT_THROW((void)stage_from_string("nope"), Error);
}

TEST(Reports, FormatsByName) {
  EXPECT_EQ(format_from_string("structured-table"), ReportFormat::Table);
  EXPECT_EQ(format_from_string("jsonl"), ReportFormat::Records);
  EXPECT_EQ(default_extension(ReportFormat::Table), ".csv");
  EXPECT_THROW((void)format_from_string("xml"), Error);
}

TEST(Reports, PassFlagFollowsTolerance) {
  EXPECT_TRUE(make_report("x", Stage::Diagram, 1, 1e-6, 1e-6, 1e-6).pass);
  EXPECT_FALSE(make_report("x", Stage::Diagram, 1, 2e-6, 1e-6, 1e-6).pass);
  const auto f = failed_report("x", Stage::Diagram, 1.0);
  EXPECT_FALSE(f.pass);
  EXPECT_TRUE(std::isinf(f.max_residual));
}

TEST(Reports, TableHeaderAndFieldCount) {
  const std::string text = format_reports(sample_reports(), ReportFormat::Table);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "scenario,stage,samples,max_residual,mean_residual,tolerance,pass,runtime_ms");
  std::getline(in, line);
  EXPECT_EQ(line, "circle,diagram,200,7.2499999999999998e-10,1.5e-10,1.0000000000000001e-05,true,12.5");
  EXPECT_EQ(format_reports({}, ReportFormat::Table),
            "scenario,stage,samples,max_residual,mean_residual,tolerance,pass,runtime_ms\n");
  EXPECT_EQ(format_reports({}, ReportFormat::Records), "");
}

TEST(Reports, RoundTripBothFormats) {
  const auto reports = sample_reports();
  for (ReportFormat f : {ReportFormat::Table, ReportFormat::Records}) {
    EXPECT_EQ(parse_reports(format_reports(reports, f), f), reports);
  }
}

TEST(Reports, RecordsAreJsonWithStringInfinities) {
  const std::string text = format_reports({failed_report("p", Stage::Appendix, 1e-12)}, ReportFormat::Records);
  EXPECT_NE(text.find("\"max_residual\":\"inf\""), std::string::npos) << text;
  EXPECT_NE(text.find("\"pass\":false"), std::string::npos);
}

TEST(Reports, MalformedInputRejected) {
  EXPECT_THROW((void)parse_reports("bad header\n", ReportFormat::Table), Error);
  EXPECT_THROW(
      (void)parse_reports("scenario,stage,samples,max_residual,mean_residual,tolerance,pass,runtime_ms\na,b\n",
                          ReportFormat::Table),
      Error);
  EXPECT_THROW((void)parse_reports("{\"scenario\":1}\n", ReportFormat::Records), Error);
}

TEST(Reports, EmitCreatesDirectoriesAndRoundTrips) {
  const auto dir = std::filesystem::temp_directory_path() / "tubular_emit_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  const auto path = dir / "out.jsonl";
  emit(sample_reports(), ReportFormat::Records, path);
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(parse_reports(text.str(), ReportFormat::Records), sample_reports());
  std::filesystem::remove_all(dir.parent_path());
}

TEST(Reports, EmitIoError) {
  const std::string msg = error_text([] { emit({}, ReportFormat::Table, "/proc/forbidden/dir/out.csv"); });
  EXPECT_NE(msg.find("IoError"), std::string::npos) << msg;
}

TEST(Coverage, ManifestCoversEveryStage) {
  std::set<Stage> stages;
  for (const auto& e : coverage_manifest()) {
    EXPECT_FALSE(e.formula.empty());
    stages.insert(e.stage);
  }
  EXPECT_EQ(stages.size(), 5u);
}

TEST(Run, FlatSliceSmallRunPassesTightly) {
  const auto reports = run_scenario(quick("flat-slice"));
  ASSERT_EQ(reports.size(), planned_stages(quick("flat-slice")).size());
  for (const auto& r : reports) {
    EXPECT_TRUE(r.pass) << to_string(r.stage) << " " << r.max_residual;
    EXPECT_LE(r.max_residual, 1e-9);
    EXPECT_EQ(r.runtime_ms, 0.0);
  }
}

TEST(Run, PointCaseRunIsDeterministic) {
  const auto a = run_scenario(quick("point-2d"));
  const auto b = run_scenario(quick("point-2d"));
  EXPECT_EQ(format_reports(a, ReportFormat::Table), format_reports(b, ReportFormat::Table));
  for (const auto& r : a) EXPECT_TRUE(r.pass) << to_string(r.stage) << " " << r.max_residual;
}

TEST(Run, OverridesApply) {
  RunOptions opts;
  opts.tolerance = 1e-30;
  opts.samples = 3;
  const auto reports = run_scenario(quick("point-2d"), opts);
  bool any_fail = false;
  for (const auto& r : reports) {
    EXPECT_EQ(r.tolerance, 1e-30);
    any_fail = any_fail || !r.pass;
  }
  EXPECT_TRUE(any_fail);
  EXPECT_EQ(reports.front().stage, Stage::PointCase);
  EXPECT_EQ(reports.front().samples, 3u);
}

TEST(Run, SetupFailureBecomesFailedReports) {
  Scenario s = quick("circle");
  s.metric.kind = "polar";
  s.submanifold.radius = 1e-3;
  s.delta0 = 50.0;
  const auto reports = run_scenario(s);
  ASSERT_FALSE(reports.empty());
}
