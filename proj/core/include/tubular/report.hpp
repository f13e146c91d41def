#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tubular {

enum class Stage { Diagram, EulerLike, Reconstruction, PointCase, Appendix };

[[nodiscard]] std::string_view to_string(Stage stage);
/// Throws ConfigError for an unknown name.
[[nodiscard]] Stage stage_from_string(std::string_view name);

/// Outcome of one pipeline stage for one scenario.
struct ResidualReport {
  std::string scenario;
  Stage stage = Stage::Diagram;
  std::size_t samples = 0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double runtime_ms = 0.0;

  bool operator==(const ResidualReport&) const = default;
};

/// Builds a report with pass = (max_residual <= tolerance).
[[nodiscard]] ResidualReport make_report(std::string scenario, Stage stage, std::size_t samples,
                                         double max_residual, double mean_residual, double tolerance,
                                         double runtime_ms = 0.0);

/// A stage that raised an error: infinite residuals, pass = false.
[[nodiscard]] ResidualReport failed_report(std::string scenario, Stage stage, double tolerance,
                                           double runtime_ms = 0.0);

enum class ReportFormat {
  /// Comma-separated table with a header row.
  Table,
  /// One JSON object per line.
  Records,
};

/// Accepts "structured-table" / "csv" and "line-delimited-records" / "jsonl".
/// Throws ConfigError otherwise.
[[nodiscard]] ReportFormat format_from_string(std::string_view name);
[[nodiscard]] std::string_view default_extension(ReportFormat format);

/// Field order is fixed; reals are written with 17 significant digits, and
/// non-finite residuals as inf / -inf / nan.
void write_reports(std::ostream& out, const std::vector<ResidualReport>& reports, ReportFormat format);
[[nodiscard]] std::string format_reports(const std::vector<ResidualReport>& reports, ReportFormat format);

/// Writes to `path`, creating parent directories. Throws IoError.
void emit(const std::vector<ResidualReport>& reports, ReportFormat format, const std::filesystem::path& path);

/// Inverse of format_reports. Throws ConfigError on malformed input.
[[nodiscard]] std::vector<ResidualReport> parse_reports(std::string_view text, ReportFormat format);

}  // namespace tubular
