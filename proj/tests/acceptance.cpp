// Acceptance checks. `acceptance <id>` runs one criterion, `acceptance all`
// runs every one; each prints a single PASS/FAIL line.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "hup/catalog.hpp"
#include "hup/deficits.hpp"
#include "hup/exact_oracle.hpp"
#include "hup/functionals.hpp"
#include "hup/projection.hpp"
#include "hup/suites.hpp"

using namespace hup;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

const std::vector<OrthantSpec> kOrthants = {{1, 1}, {2, 1}, {2, 2}, {3, 1}, {3, 2}};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Outcome from_report(const Report& r) {
  const Summary s = r.summary();
  Outcome o;
  o.pass = s.failed == 0 && s.total > 0;
  o.detail = std::to_string(s.total - s.failed) + "/" + std::to_string(s.total) + " cases, worst margin " +
             fmt("%.2e", s.worst_margin) + " (" + s.worst_case + ")";
  return o;
}

Outcome sharp_constant() {
  double worst_oracle = 0.0, worst_quad = 0.0;
  for (const auto& s : kOrthants)
    for (double beta : {0.25, 0.5, 2.0}) {
      const TestField u = make_extremal(s, 1.0, beta);
      const double sharp = std::pow(s.effective_dim(), 2) / 4.0;
      worst_oracle = std::max(worst_oracle, rel(hup_ratio(u, Backend::Oracle), sharp));
      worst_quad = std::max(worst_quad, rel(hup_ratio(u, Backend::Quadrature), sharp));
    }
  return {worst_oracle <= 1e-9 && worst_quad <= 1e-8,
          fmt("max rel error oracle %.2e, quadrature %.2e", worst_oracle, worst_quad)};
}

Outcome sharpness_probe() {
  double worst_hup = INFINITY, worst_hardy = INFINITY;
  int fields = 0;
  for (const auto& s : kOrthants)
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      CatalogParams p;
      p.n = s.n();
      p.k = s.k();
      p.seed = seed;
      const TestField u = catalog_get("polygauss_random", p);
      const int D = s.effective_dim();
      worst_hup = std::min(worst_hup, hup_ratio(u, Backend::Oracle) - D * D / 4.0);
      worst_hardy = std::min(worst_hardy, hardy_ratio(u, Backend::Oracle) - (D - 2) * (D - 2) / 4.0);
      ++fields;
    }
  return {fields == 250 && worst_hup >= -1e-8 && worst_hardy >= -1e-8,
          std::to_string(fields) + " fields, min slack HUP " + fmt("%.3e", worst_hup) + ", Hardy " +
              fmt("%.3e", worst_hardy)};
}

// u = x_1 w e^{-|x|^2/2} against pi^{(n+2k)/2} / (2 (4 pi)^k), the latter
// written through Gamma functions.
Outcome sharp_example(int n, int k) {
  const TestField u = catalog_get("sharp_example", CatalogParams{n, k});
  const double D = n + 2 * k;
  const double g = std::tgamma(0.5);
  // |S^2| = 2 Gamma(1/2)^3 / Gamma(3/2)
  const double reference = std::pow(g, D) / (2.0 * std::pow(2.0 * g * g * g / std::tgamma(1.5), k));
  const double r1 = rho1(u, Backend::Oracle);
  const ProjectionResult c = dist_to_E_norm_constrained(u, Backend::Oracle);
  const double e_rho = rel(r1, reference);
  const double e_dist = rel(c.dist_sq, 2.0 * reference);
  const double e_half = std::abs(r1 - 0.5 * c.dist_sq) / r1;
  const bool pass = e_rho <= 1e-10 && e_dist <= 1e-8 && e_half <= 1e-9;
  return {pass, "rho1 " + fmt("%.15g", r1) + ", constrained dist_sq " + fmt("%.15g", c.dist_sq) + ", formula " +
                    fmt("%.15g", reference) + fmt(" (rel errors %.1e, %.1e", e_rho, e_dist) +
                    fmt(", half-distance gap %.1e)", e_half)};
}

Outcome timed_report(Report (*run)(const SuiteConfig&), double budget) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o = from_report(run(SuiteConfig{}));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget > 0.0 && secs >= budget) {
    o.pass = false;
    o.detail += fmt(", over the %.0f s budget", budget);
  }
  return o;
}

struct Criterion {
  std::string title;
  double budget;  // seconds, 0 for none
  std::function<Outcome()> run;
};

const std::map<std::string, Criterion>& criteria() {
  static const std::map<std::string, Criterion> c = {
      {"1", {"sharp constant attained by extremals", 10.0, sharp_constant}},
      {"2", {"HUP and Hardy lower bounds on 250 random fields", 60.0, sharpness_probe}},
      {"3", {"additive deficit identity and optimal alpha envelope", 0.0,
             [] { return timed_report(verify_identity, 0.0); }}},
      {"4a", {"sharp example values, n=2 k=1", 0.0, [] { return sharp_example(2, 1); }}},
      {"4b", {"sharp example values, n=1 k=1", 0.0, [] { return sharp_example(1, 1); }}},
      {"4c", {"sharp example values, n=3 k=1", 0.0, [] { return sharp_example(3, 1); }}},
      {"5", {"stability inequalities and equality cases", 300.0,
             [] { return timed_report(verify_stability, 300.0); }}},
      {"6", {"lifting formulas", 0.0, [] { return timed_report(verify_lifting, 0.0); }}},
      {"7", {"weighted Gaussian Poincare inequality", 0.0, [] { return timed_report(verify_poincare, 0.0); }}},
      {"8", {"oracle and quadrature backends agree", 0.0, [] { return timed_report(verify_backends, 0.0); }}},
  };
  return c;
}

bool run_one(const std::string& id) {
  const Criterion& c = criteria().at(id);
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (c.budget > 0.0 && secs >= c.budget && o.pass) {
    o.pass = false;
    o.detail += fmt(", over the %.0f s budget", c.budget);
  }
  std::printf("criterion %-2s %s  %s: %s [%.1f s]\n", id.c_str(), o.pass ? "PASS" : "FAIL", c.title.c_str(),
              o.detail.c_str(), secs);
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <all|1|2|3|4a|4b|4c|5|6|7|8>\n");
    return 2;
  }
  const std::string id = argv[1];
  if (id == "all") {
    bool ok = true;
    for (const auto& [key, c] : criteria()) ok = run_one(key) && ok;
    return ok ? 0 : 1;
  }
  if (!criteria().count(id)) {
    std::fprintf(stderr, "unknown criterion '%s'\n", id.c_str());
    return 2;
  }
  return run_one(id) ? 0 : 1;
}
