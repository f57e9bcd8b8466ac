#include "hup/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace hup {

Case& Case::set(const std::string& key, double v) {
  for (auto& kv : values) {
    if (kv.first == key) {
      kv.second = v;
      return *this;
    }
  }
  values.emplace_back(key, v);
  return *this;
}

double Case::get(const std::string& key) const {
  for (const auto& kv : values)
    if (kv.first == key) return kv.second;
  return std::numeric_limits<double>::quiet_NaN();
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void Report::append(const Report& other) { cases.insert(cases.end(), other.cases.begin(), other.cases.end()); }

void Report::sort_cases() {
  std::stable_sort(cases.begin(), cases.end(), [](const Case& a, const Case& b) { return a.name < b.name; });
}

bool Report::passed() const {
  return std::all_of(cases.begin(), cases.end(), [](const Case& c) { return c.pass; });
}

Summary Report::summary() const {
  Summary s;
  s.total = cases.size();
  s.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& c : cases) {
    if (!c.pass) ++s.failed;
    if (c.margin < s.worst_margin || (std::isnan(c.margin) && !std::isnan(s.worst_margin))) {
      s.worst_margin = c.margin;
      s.worst_case = c.name;
    }
  }
  if (cases.empty()) s.worst_margin = 0.0;
  return s;
}

std::vector<const Case*> Report::failures() const {
  std::vector<const Case*> out;
  for (const auto& c : cases)
    if (!c.pass) out.push_back(&c);
  return out;
}

namespace {

nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

}  // namespace

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["version"] = kReportVersion;
  j["config_echo"] = config_echo;
  j["suite"] = suite;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cases) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["nk"] = {c.n, c.k};
    jc["backend"] = c.backend;
    nlohmann::json vals = nlohmann::json::object();
    for (const auto& [key, v] : c.values) vals[key] = number(v);
    jc["values"] = vals;
    jc["margin"] = number(c.margin);
    jc["pass"] = c.pass;
    if (!c.note.empty()) jc["note"] = c.note;
    arr.push_back(std::move(jc));
  }
  j["cases"] = std::move(arr);
  const Summary s = summary();
  j["summary"] = {{"total", s.total},
                  {"failed", s.failed},
                  {"passed", s.failed == 0},
                  {"worst_margin", number(s.worst_margin)},
                  {"worst_case", s.worst_case}};
  return j;
}

std::string Report::to_csv() const {
  std::vector<std::string> keys;
  for (const auto& c : cases)
    for (const auto& kv : c.values)
      if (std::find(keys.begin(), keys.end(), kv.first) == keys.end()) keys.push_back(kv.first);
  std::ostringstream os;
  os << "suite,name,n,k,backend,margin,pass";
  for (const auto& key : keys) os << ',' << key;
  os << '\n';
  for (const auto& c : cases) {
    os << suite << ',' << c.name << ',' << c.n << ',' << c.k << ',' << c.backend << ',' << format_number(c.margin)
       << ',' << (c.pass ? 1 : 0);
    for (const auto& key : keys) {
      os << ',';
      const double v = c.get(key);
      if (!std::isnan(v) || std::any_of(c.values.begin(), c.values.end(),
                                        [&](const auto& kv) { return kv.first == key; }))
        os << format_number(v);
    }
    os << '\n';
  }
  return os.str();
}

std::string Report::to_table() const {
  std::size_t width = 4;
  for (const auto& c : cases) width = std::max(width, c.name.size());
  std::ostringstream os;
  char buf[64];
  for (const auto& c : cases) {
    std::snprintf(buf, sizeof buf, "%.3e", c.margin);
    os << (c.pass ? "PASS  " : "FAIL  ") << c.name << std::string(width - c.name.size() + 2, ' ') << "margin "
       << buf;
    if (!c.note.empty()) os << "  " << c.note;
    os << '\n';
  }
  const Summary s = summary();
  os << suite << ": " << (s.total - s.failed) << "/" << s.total << " passed";
  if (!s.worst_case.empty()) os << ", worst margin " << format_number(s.worst_margin) << " (" << s.worst_case << ")";
  os << '\n';
  return os.str();
}

}  // namespace hup
