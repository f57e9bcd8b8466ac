#pragma once

// Verification reports: flat named cases with a signed margin, serialized as
// JSON or CSV.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace hup {

inline constexpr int kReportVersion = 1;

/// One checked statement. margin >= -tolerance means it holds; for
/// inequalities margin is the normalized slack, for identities minus the
/// normalized error.
struct Case {
  std::string name;
  int n = 0;
  int k = 0;
  std::string backend;
  std::vector<std::pair<std::string, double>> values;
  double margin = 0.0;
  bool pass = true;
  std::string note;  // error message or witness description

  Case& set(const std::string& key, double v);
  /// NaN when absent.
  double get(const std::string& key) const;
};

struct Summary {
  std::size_t total = 0;
  std::size_t failed = 0;
  double worst_margin = 0.0;
  std::string worst_case;
};

struct Report {
  std::string suite;
  nlohmann::json config_echo = nlohmann::json::object();
  std::vector<Case> cases;

  void add(Case c) { cases.push_back(std::move(c)); }
  void append(const Report& other);
  /// Stable sort by case name.
  void sort_cases();
  bool passed() const;
  Summary summary() const;
  std::vector<const Case*> failures() const;

  nlohmann::json to_json() const;
  /// Header row plus one row per case; value columns are the union of all
  /// value keys in first-seen order.
  std::string to_csv() const;
  /// Human-readable pass/fail table.
  std::string to_table() const;
};

/// %.17g.
std::string format_number(double x);

}  // namespace hup
