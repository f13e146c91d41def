// Command line front end: run, list and check scenarios.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tubular/scenario.hpp"

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitError = 2;

std::filesystem::path default_out_dir() {
  const char* env = std::getenv("TUBULAR_OUT_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("results");
}

void print_summary(const std::vector<tubular::ResidualReport>& reports) {
  std::printf("%-16s %-15s %8s %12s %12s %10s  %s\n", "scenario", "stage", "samples", "max", "mean", "tol",
              "result");
  for (const auto& r : reports) {
    std::printf("%-16s %-15s %8zu %12.3e %12.3e %10.1e  %s\n", r.scenario.c_str(),
                std::string(tubular::to_string(r.stage)).c_str(), r.samples, r.max_residual, r.mean_residual,
                r.tolerance, r.pass ? "pass" : "FAIL");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tubular neighborhood embeddings realized as normal exponential maps"};
  app.require_subcommand(1);

  std::string target;
  std::optional<double> tol;
  std::optional<int> samples;
  std::string out;
  std::string format = "structured-table";
  bool timing = false;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run a builtin scenario, a YAML scenario file, or 'all' builtins");
  run->add_option("scenario", target, "Builtin name, path to a YAML file, or 'all'")->required();
  run->add_option("--tol", tol, "Override the pass tolerance of every stage")->check(CLI::PositiveNumber);
  run->add_option("--samples", samples, "Override the number of diagram / point-case samples")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", out, "Output file (default: $TUBULAR_OUT_DIR/<scenario>.<ext>, else results/)");
  run->add_option("--format", format, "structured-table (csv) or line-delimited-records (jsonl)");
  run->add_flag("--timing", timing, "Record stage runtimes (reports are then not reproducible bit for bit)");
  run->add_flag("-q,--quiet", quiet, "Do not print the summary table");

  auto* list = app.add_subcommand("list", "List builtin scenarios");

  std::string check_target;
  auto* check = app.add_subcommand("check", "Validate a scenario without running it");
  check->add_option("scenario", check_target, "Builtin name or path to a YAML file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& s : tubular::builtin_scenarios()) {
        std::printf("%-16s %s in R^%d, %s metric, %s embedding\n", s.name.c_str(), s.submanifold.kind.c_str(),
                    s.ambient_dim, s.metric.kind.c_str(), s.embedding.kind.c_str());
      }
      return 0;
    }
    if (check->parsed()) {
      const tubular::Scenario s = tubular::resolve_scenario(check_target);
      std::printf("ok: %s\n", s.name.c_str());
      return 0;
    }

    const tubular::ReportFormat fmt = tubular::format_from_string(format);
    std::vector<tubular::Scenario> scenarios;
    if (target == "all") {
      scenarios = tubular::builtin_scenarios();
    } else {
      scenarios.push_back(tubular::resolve_scenario(target));
    }

    tubular::RunOptions options;
    options.tolerance = tol;
    options.samples = samples;
    options.timing = timing;
    options.log = [](const std::string& msg) { std::fprintf(stderr, "%s\n", msg.c_str()); };

    std::vector<tubular::ResidualReport> reports;
    for (const auto& s : scenarios) {
      auto r = tubular::run_scenario(s, options);
      reports.insert(reports.end(), r.begin(), r.end());
    }

    const std::string stem = target == "all" ? "suite" : scenarios.front().name;
    const std::filesystem::path path =
        out.empty() ? default_out_dir() / (stem + std::string(tubular::default_extension(fmt))) : std::filesystem::path(out);
    tubular::emit(reports, fmt, path);
    if (!quiet) print_summary(reports);
    std::fprintf(stderr, "wrote %s\n", path.string().c_str());

    for (const auto& r : reports) {
      if (!r.pass) return kExitFailed;
    }
    return 0;
  } catch (const tubular::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
}
