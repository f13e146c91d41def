#include "tubular/report.hpp"

#include <array>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tubular/error.hpp"

namespace tubular {

namespace {

constexpr std::array kStageNames{"diagram", "euler-like", "reconstruction", "point-case", "appendix"};
constexpr std::array kFields{"scenario", "stage",     "samples", "max_residual",
                             "mean_residual", "tolerance", "pass", "runtime_ms"};

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_real(const std::string& text, std::size_t line) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
    throw Error(ErrorCode::ConfigError, "line " + std::to_string(line) + ": bad number '" + text + "'");
  }
  return x;
}

std::size_t parse_count(const std::string& text, std::size_t line) {
  char* end = nullptr;
  const unsigned long long n = std::strtoull(text.c_str(), &end, 10);
  if (text.empty() || text[0] == '-' || end != text.c_str() + text.size()) {
    throw Error(ErrorCode::ConfigError, "line " + std::to_string(line) + ": bad sample count '" + text + "'");
  }
  return static_cast<std::size_t>(n);
}

bool parse_bool(const std::string& text, std::size_t line) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw Error(ErrorCode::ConfigError, "line " + std::to_string(line) + ": bad pass flag '" + text + "'");
}

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace

std::string_view to_string(Stage stage) { return kStageNames[static_cast<std::size_t>(stage)]; }

Stage stage_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kStageNames.size(); ++i) {
    if (name == kStageNames[i]) return static_cast<Stage>(i);
  }
  throw Error(ErrorCode::ConfigError, "unknown stage '" + std::string(name) + "'");
}

ResidualReport make_report(std::string scenario, Stage stage, std::size_t samples, double max_residual,
                           double mean_residual, double tolerance, double runtime_ms) {
  return {std::move(scenario), stage, samples, max_residual, mean_residual, tolerance,
          max_residual <= tolerance, runtime_ms};
}

ResidualReport failed_report(std::string scenario, Stage stage, double tolerance, double runtime_ms) {
  const double inf = std::numeric_limits<double>::infinity();
  return {std::move(scenario), stage, 0, inf, inf, tolerance, false, runtime_ms};
}

ReportFormat format_from_string(std::string_view name) {
  if (name == "structured-table" || name == "csv") return ReportFormat::Table;
  if (name == "line-delimited-records" || name == "jsonl") return ReportFormat::Records;
  throw Error(ErrorCode::ConfigError, "unknown output format '" + std::string(name) + "'");
}

std::string_view default_extension(ReportFormat format) {
  return format == ReportFormat::Table ? ".csv" : ".jsonl";
}

void write_reports(std::ostream& out, const std::vector<ResidualReport>& reports, ReportFormat format) {
  if (format == ReportFormat::Table) {
    for (std::size_t i = 0; i < kFields.size(); ++i) out << (i ? "," : "") << kFields[i];
    out << '\n';
    for (const ResidualReport& r : reports) {
      out << r.scenario << ',' << to_string(r.stage) << ',' << r.samples << ',' << format_real(r.max_residual)
          << ',' << format_real(r.mean_residual) << ',' << format_real(r.tolerance) << ','
          << (r.pass ? "true" : "false") << ',' << format_real(r.runtime_ms) << '\n';
    }
    return;
  }
  // Non-finite reals are not JSON numbers, so they are written as strings.
  auto real = [](double x) { return std::isfinite(x) ? format_real(x) : json_string(format_real(x)); };
  for (const ResidualReport& r : reports) {
    out << "{\"scenario\":" << json_string(r.scenario) << ",\"stage\":" << json_string(std::string(to_string(r.stage)))
        << ",\"samples\":" << r.samples << ",\"max_residual\":" << real(r.max_residual)
        << ",\"mean_residual\":" << real(r.mean_residual) << ",\"tolerance\":" << real(r.tolerance)
        << ",\"pass\":" << (r.pass ? "true" : "false") << ",\"runtime_ms\":" << real(r.runtime_ms) << "}\n";
  }
}

std::string format_reports(const std::vector<ResidualReport>& reports, ReportFormat format) {
  std::ostringstream out;
  write_reports(out, reports, format);
  return out.str();
}

void emit(const std::vector<ResidualReport>& reports, ReportFormat format, const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create directory " + path.parent_path().string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  write_reports(out, reports, format);
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

std::vector<ResidualReport> parse_reports(std::string_view text, ReportFormat format) {
  std::vector<ResidualReport> reports;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;

  if (format == ReportFormat::Table) {
    std::string expected;
    for (std::size_t i = 0; i < kFields.size(); ++i) expected += std::string(i ? "," : "") + kFields[i];
    if (!std::getline(in, line) || line != expected) {
      throw Error(ErrorCode::ConfigError, "line 1: missing or unexpected table header");
    }
    line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::stringstream row(line);
      std::string cell;
      while (std::getline(row, cell, ',')) cells.push_back(cell);
      if (cells.size() != kFields.size()) {
        throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected 8 fields");
      }
      ResidualReport r;
      r.scenario = cells[0];
      r.stage = stage_from_string(cells[1]);
      r.samples = parse_count(cells[2], line_no);
      r.max_residual = parse_real(cells[3], line_no);
      r.mean_residual = parse_real(cells[4], line_no);
      r.tolerance = parse_real(cells[5], line_no);
      r.pass = parse_bool(cells[6], line_no);
      r.runtime_ms = parse_real(cells[7], line_no);
      reports.push_back(std::move(r));
    }
    return reports;
  }

  auto real = [](const nlohmann::json& v, std::size_t ln) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_real(v.get<std::string>(), ln);
    throw Error(ErrorCode::ConfigError, "line " + std::to_string(ln) + ": expected a number");
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.size() != kFields.size()) {
        throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected 8 fields");
      }
      ResidualReport r;
      r.scenario = j.at("scenario").get<std::string>();
      r.stage = stage_from_string(j.at("stage").get<std::string>());
      r.samples = j.at("samples").get<std::size_t>();
      r.max_residual = real(j.at("max_residual"), line_no);
      r.mean_residual = real(j.at("mean_residual"), line_no);
      r.tolerance = real(j.at("tolerance"), line_no);
      r.pass = j.at("pass").get<bool>();
      r.runtime_ms = real(j.at("runtime_ms"), line_no);
      reports.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return reports;
}

}  // namespace tubular
