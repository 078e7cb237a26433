#include "berglab/harness/report.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace berglab::harness {

namespace {

std::string csv_field(const nlohmann::json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return v.dump();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Flagged:
      return "flagged";
  }
  return "fail";
}

void Table::add_row(std::vector<nlohmann::json> row) {
  if (row.size() != columns.size()) throw std::invalid_argument("table " + name + ": row width does not match header");
  rows.push_back(std::move(row));
}

nlohmann::json Table::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["columns"] = columns;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) j["rows"].push_back(r);
  return j;
}

Verdict ExperimentReport::overall() const {
  bool flagged = false;
  for (const auto& c : checks) {
    if (c.verdict == Verdict::Fail) return Verdict::Fail;
    flagged = flagged || c.verdict == Verdict::Flagged;
  }
  return flagged ? Verdict::Flagged : Verdict::Pass;
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j;
  j["tool_version"] = kToolVersion;
  j["csv_schema_version"] = kCsvSchemaVersion;
  j["subcommand"] = subcommand;
  j["config"] = config;
  j["verdict"] = to_string(overall());
  j["checks"] = nlohmann::json::array();
  nlohmann::json timing = nlohmann::json::object();
  for (const auto& c : checks) {
    nlohmann::json cj;
    cj["id"] = c.id;
    cj["title"] = c.title;
    cj["verdict"] = to_string(c.verdict);
    cj["detail"] = c.detail;
    cj["tables"] = nlohmann::json::array();
    for (const auto& t : c.tables) cj["tables"].push_back(t.to_json());
    j["checks"].push_back(cj);
    timing[c.id] = c.seconds;
  }
  j["wall_clock"] = {{"total_seconds", wall_clock}, {"checks", timing}};
  return j;
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return 0;
    case Verdict::Fail:
      return 1;
    case Verdict::Flagged:
      return 3;
  }
  return 1;
}

void write_table_csv(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << csv_field(t.columns[i]);
  out << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_field(r[i]);
    out << "\n";
  }
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  write_file(dir / "report.json", report.to_json().dump(2) + "\n");
  for (const auto& c : report.checks)
    for (const auto& t : c.tables) {
      std::ostringstream s;
      write_table_csv(s, t);
      write_file(dir / (c.id + "_" + t.name + ".csv"), s.str());
    }
}

}  // namespace berglab::harness
