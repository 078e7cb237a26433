#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace berglab::harness {

/// Unwritable output location (exit code 2).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Verdict { Pass, Fail, Flagged };
std::string to_string(Verdict v);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;

  void add_row(std::vector<nlohmann::json> row);
  nlohmann::json to_json() const;
};

struct CheckResult {
  std::string id;
  std::string title;
  Verdict verdict = Verdict::Fail;
  std::string detail;
  std::vector<Table> tables;
  double seconds = 0.0;
};

struct ExperimentReport {
  std::string subcommand;
  nlohmann::json config = nlohmann::json::object();
  std::vector<CheckResult> checks;
  double wall_clock = 0.0;

  Verdict overall() const;
  /// Timing lives only under "wall_clock", so reruns differ in that field alone.
  nlohmann::json to_json() const;
};

inline constexpr const char* kToolVersion = "berglab 1.0.0";
inline constexpr const char* kCsvSchemaVersion = "1";

/// 0 pass, 1 any fail, 3 flagged without failures.
int exit_code(Verdict v);

/// Header row then one line per row; numbers use the JSON text form, null is an empty field.
void write_table_csv(std::ostream& out, const Table& t);

/// report.json plus <check id>_<table>.csv per table under dir.
void emit_report(const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace berglab::harness
