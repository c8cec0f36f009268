#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "leafcausal/catalog.hpp"

namespace leafcausal {

std::string_view version();

/// Tasks a scenario may request, in a fixed order.
const std::vector<std::string>& scenario_tasks();

/// Line-oriented "key = value" scenario; "#" starts a comment.
struct Scenario {
  std::string example;
  std::string task;
  std::uint64_t seed = 0;
  std::map<std::string, double> example_params;  // "param.<name> = v"
  std::map<std::string, double> values;          // numeric task parameters
  std::vector<double> resolutions;
  std::string report;  // report file name; empty: derived from the scenario name
  bool tables = true;
  /// Assignments in file order, for the report echo.
  std::vector<std::pair<std::string, std::string>> echo;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  double get(const std::string& key, double fallback) const;
};

/// Throws ParseError (with line number), UnknownKey or MissingKey.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& file);

struct ReportSection {
  std::string name;
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<ReportSection> children;

  void set(const std::string& key, double value);
  void set(const std::string& key, const std::string& value);
  ReportSection& child(const std::string& name);
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ClaimOutcome {
  ExpectedClaim claim;
  std::optional<double> value;  // none: the task did not produce the key
  bool passed = false;
};

struct Report {
  Scenario scenario;
  std::string description;
  std::map<std::string, double> params;
  std::map<std::string, double> metrics;
  ReportSection results{"results", {}, {}};
  std::vector<Table> tables;
  std::vector<ClaimOutcome> claims;

  std::size_t evaluated() const;
  std::size_t failed() const;
  bool all_passed() const { return failed() == 0; }
  /// Structured text; identical for identical scenarios.
  std::string render() const;
};

/// Runs the task on the catalog entry and checks its expected claims. Module
/// errors are rethrown with the scenario prefixed to the message.
Report run(const Scenario& scenario);

/// Writes <stem>.report (or the scenario's report name) and, when enabled,
/// <stem>-<table>.csv into dir. Returns the written paths. Throws IoError.
std::vector<std::filesystem::path> emit(const Report& report, const std::filesystem::path& dir,
                                        const std::string& stem);

std::string format_number(double v);

}  // namespace leafcausal
