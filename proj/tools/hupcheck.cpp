// hupcheck: run the verification suites, deficit reports and sweeps.
//
//   hupcheck verify stability --nk 2,1 --field sharp_example
//   hupcheck deficit polygauss_random --seed 7
//   hupcheck sweep --base extremal --nk 2,1 --count 11
//   hupcheck rule half_range --order 20 --a 2

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hup/catalog.hpp"
#include "hup/errors.hpp"
#include "hup/quadrature.hpp"
#include "hup/report.hpp"
#include "hup/suites.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::vector<std::string> nk;
  std::optional<double> beta;
  std::vector<double> alpha;
  std::vector<double> lambda;
  std::optional<int> order;
  std::optional<int> panel_order;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  std::optional<double> tol;
  std::string field;
  std::vector<int> l;
  std::string backend;
  std::optional<int> count;
  std::optional<double> c;
  std::optional<double> B;
  std::optional<double> b0;
  std::vector<double> b;
  std::optional<int> wall_power;
  int threads = 0;
  std::string config;
};

void add_common(CLI::App* app, Options& o) {
  app->add_option("--nk", o.nk, "orthant as n,k (repeatable)");
  app->add_option("--beta", o.beta, "extremal rate beta");
  app->add_option("--alpha", o.alpha, "alpha values");
  app->add_option("--lambda", o.lambda, "Poincare scales lambda");
  app->add_option("--order", o.order, "quadrature order per Gaussian axis");
  app->add_option("--panel-order", o.panel_order, "Gauss-Legendre order per panel");
  app->add_option("--seed", o.seed, "base seed of the random fields");
  app->add_option("--out", o.out, "write the report to this path");
  app->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--tol", o.tol, "override every tolerance");
  app->add_option("--field", o.field, "catalog field");
  app->add_option("--l", o.l, "lift exponents");
  app->add_option("--backend", o.backend, "oracle or quadrature")->check(CLI::IsMember({"oracle", "quadrature"}));
  app->add_option("--count", o.count, "random fields per orthant / sweep rows");
  app->add_option("--c", o.c, "extremal amplitude");
  app->add_option("--B", o.B, "affine Gaussian rate");
  app->add_option("--b0", o.b0, "affine constant");
  app->add_option("--b", o.b, "affine slopes");
  app->add_option("--wall-power", o.wall_power, "bump wall exponent");
  app->add_option("--threads", o.threads, "worker threads (0: all cores)");
  app->add_option("--config", o.config, "JSON file mirroring the flags");
}

template <class T>
void take(const nlohmann::json& j, T& dst) {
  dst = j.get<T>();
}

template <class T>
void take(const nlohmann::json& j, std::optional<T>& dst) {
  dst = j.get<T>();
}

template <class T>
void take(const nlohmann::json& j, std::vector<T>& dst) {
  if (j.is_array()) {
    dst = j.get<std::vector<T>>();
  } else {
    dst = {j.get<T>()};
  }
}

// Flags given on the command line win over the config file.
void apply_config(CLI::App* app, Options& o) {
  if (o.config.empty()) return;
  std::ifstream in(o.config);
  if (!in) throw UsageError("cannot open config file " + o.config);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    CLI::Option* opt = nullptr;
    try {
      opt = app->get_option(flag);
    } catch (const CLI::OptionNotFound&) {
      throw UsageError("unknown config key '" + key + "'");
    }
    if (opt->count() > 0) continue;
    try {
      if (key == "nk") {
        o.nk.clear();
        for (const auto& e : value.is_array() ? value : nlohmann::json::array({value})) {
          if (e.is_array()) {
            o.nk.push_back(std::to_string(e.at(0).get<int>()) + "," + std::to_string(e.at(1).get<int>()));
          } else {
            o.nk.push_back(e.get<std::string>());
          }
        }
      } else if (key == "beta") take(value, o.beta);
      else if (key == "alpha") take(value, o.alpha);
      else if (key == "lambda") take(value, o.lambda);
      else if (key == "order") take(value, o.order);
      else if (key == "panel-order") take(value, o.panel_order);
      else if (key == "seed") take(value, o.seed);
      else if (key == "out") take(value, o.out);
      else if (key == "format") take(value, o.format);
      else if (key == "tol") take(value, o.tol);
      else if (key == "field") take(value, o.field);
      else if (key == "l") take(value, o.l);
      else if (key == "backend") take(value, o.backend);
      else if (key == "count") take(value, o.count);
      else if (key == "c") take(value, o.c);
      else if (key == "B") take(value, o.B);
      else if (key == "b0") take(value, o.b0);
      else if (key == "b") take(value, o.b);
      else if (key == "wall-power") take(value, o.wall_power);
      else if (key == "threads") take(value, o.threads);
      else throw UsageError("config key '" + key + "' is not supported");
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("config key '" + key + "': " + e.what());
    }
  }
  if (!o.format.empty() && o.format != "json" && o.format != "csv") throw UsageError("format must be json or csv");
  if (!o.backend.empty() && o.backend != "oracle" && o.backend != "quadrature")
    throw UsageError("backend must be oracle or quadrature");
}

hup::OrthantSpec parse_nk(const std::string& s) {
  int n = 0, k = 0;
  char extra = 0;
  if (std::sscanf(s.c_str(), "%d,%d%c", &n, &k, &extra) != 2) throw UsageError("--nk expects n,k, got '" + s + "'");
  try {
    return hup::OrthantSpec(n, k);
  } catch (const hup::Error& e) {
    throw UsageError(e.what());
  }
}

hup::CatalogParams catalog_params(const Options& o, const hup::OrthantSpec& spec) {
  hup::CatalogParams p;
  p.n = spec.n();
  p.k = spec.k();
  if (o.beta) p.beta = *o.beta;
  if (o.c) p.c = *o.c;
  if (o.B) p.B = *o.B;
  if (o.b0) p.b0 = *o.b0;
  p.b = o.b;
  p.seed = o.seed;
  if (o.wall_power) p.wall_power = *o.wall_power;
  return p;
}

hup::QuadratureConfig quad_config(const Options& o) {
  hup::QuadratureConfig q;
  if (o.order) q.gauss_order = *o.order;
  if (o.panel_order) q.panel_order = *o.panel_order;
  return q;
}

std::optional<hup::Backend> backend_of(const Options& o) {
  if (o.backend.empty()) return std::nullopt;
  return hup::backend_from_string(o.backend);
}

std::string format_of(const Options& o, const std::string& fallback) {
  if (!o.format.empty()) return o.format;
  if (o.out.size() > 4 && o.out.substr(o.out.size() - 4) == ".csv") return "csv";
  return fallback;
}

std::string serialize(const hup::Report& r, const std::string& format) {
  if (format == "csv") return r.to_csv();
  return r.to_json().dump(2) + "\n";
}

void write_out(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw UsageError("cannot write " + o.out);
  f << text;
}

int run_verify(const std::string& suite, const Options& o) {
  hup::SuiteConfig cfg;
  for (const auto& s : o.nk) cfg.orthants.push_back(parse_nk(s));
  if (o.count) cfg.count = *o.count;
  cfg.seed = o.seed;
  if (!o.alpha.empty()) cfg.alphas = o.alpha;
  if (!o.lambda.empty()) cfg.lambdas = o.lambda;
  if (!o.l.empty()) cfg.lift_l = o.l;
  if (!o.field.empty()) {
    const auto& names = hup::catalog_names();
    if (std::find(names.begin(), names.end(), o.field) == names.end())
      throw UsageError("unknown catalog field '" + o.field + "'");
    cfg.field = o.field;
    cfg.params = catalog_params(o, hup::OrthantSpec(1, 0));
  }
  cfg.backend = backend_of(o);
  cfg.quad = quad_config(o);
  cfg.tol = o.tol;
  cfg.threads = o.threads;
  const hup::Report r = hup::run_suite(suite, cfg);
  const std::string table = r.to_table();
  if (o.out.empty()) {
    std::cerr << table;
  } else {
    std::cout << table;
  }
  write_out(o, serialize(r, format_of(o, "json")));
  return r.passed() ? kExitPass : kExitViolation;
}

int run_deficit(const std::string& field, const Options& o) {
  if (o.nk.size() > 1) throw UsageError("deficit takes a single --nk");
  const hup::OrthantSpec spec = o.nk.empty() ? hup::OrthantSpec(2, 1) : parse_nk(o.nk.front());
  const hup::TestField u = hup::catalog_get(field, catalog_params(o, spec));
  const double alpha = o.alpha.empty() ? 1.0 : o.alpha.front();
  if (o.alpha.size() > 1) throw UsageError("deficit takes a single --alpha");
  hup::Report r = hup::deficit_report_for(u, alpha, backend_of(o), quad_config(o));
  r.config_echo = {{"field", field}, {"nk", {spec.n(), spec.k()}}, {"alpha", alpha}, {"seed", o.seed}};
  if (o.beta) r.config_echo["beta"] = *o.beta;
  write_out(o, serialize(r, format_of(o, "json")));
  return r.passed() ? kExitPass : kExitViolation;
}

int run_sweep(const std::string& base, const std::string& perturbation, double eps_min, double eps_max,
              const Options& o) {
  if (o.nk.size() > 1) throw UsageError("sweep takes a single --nk");
  hup::SweepConfig cfg;
  const hup::OrthantSpec spec = o.nk.empty() ? hup::OrthantSpec(2, 1) : parse_nk(o.nk.front());
  cfg.base = base;
  cfg.perturbation = perturbation;
  cfg.params = catalog_params(o, spec);
  cfg.eps_min = eps_min;
  cfg.eps_max = eps_max;
  if (o.count) cfg.count = *o.count;
  cfg.backend = backend_of(o);
  cfg.quad = quad_config(o);
  if (o.tol) cfg.tol = *o.tol;
  if (cfg.count < 1 || eps_min > eps_max) throw UsageError("invalid sweep range");
  const hup::Report r = hup::sweep(cfg);
  write_out(o, serialize(r, format_of(o, "csv")));
  return r.passed() ? kExitPass : kExitViolation;
}

int run_rule(const std::string& kind, int order, double a, double lo, double hi, const Options& o) {
  hup::AxisRule rule;
  if (kind == "hermite") rule = hup::hermite_rule(order);
  else if (kind == "laguerre") rule = hup::laguerre_rule(order, a);
  else if (kind == "half_monomial") rule = hup::half_monomial_rule(order, a);
  else if (kind == "half_range") rule = hup::half_range_rule(order, a);
  else if (kind == "legendre") rule = hup::legendre_panel_rule(order, lo, hi);
  else throw UsageError("unknown rule '" + kind + "'");
  std::ostringstream os;
  hup::write_rule_csv(os, rule);
  write_out(o, os.str());
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of the Heisenberg uncertainty principle on orthants"};
  app.require_subcommand(1);

  Options o;
  std::string suite;
  auto* verify = app.add_subcommand("verify", "run an invariant suite");
  verify->add_option("suite", suite, "identity | lifting | poincare | stability | backends | all")
      ->required()
      ->check(CLI::IsMember({"identity", "lifting", "poincare", "stability", "backends", "all"}));
  add_common(verify, o);

  std::string field;
  auto* deficit = app.add_subcommand("deficit", "deficits and projections of one catalog field");
  deficit->add_option("name", field, "catalog field")->required();
  add_common(deficit, o);

  std::string base = "extremal", perturbation = "x1";
  double eps_min = 0.0, eps_max = 1.0;
  auto* sw = app.add_subcommand("sweep", "deficits along base + eps * perturbation");
  sw->add_option("--base", base, "catalog field");
  sw->add_option("--perturbation", perturbation, "x1 | x1sq | radial")->check(CLI::IsMember({"x1", "x1sq", "radial"}));
  sw->add_option("--eps-min", eps_min);
  sw->add_option("--eps-max", eps_max);
  add_common(sw, o);

  std::string kind;
  int rule_order = 20;
  double a = 0.0, lo = -1.0, hi = 1.0;
  auto* rule = app.add_subcommand("rule", "dump a quadrature rule as CSV");
  rule->add_option("kind", kind, "hermite | laguerre | half_monomial | half_range | legendre")->required();
  rule->add_option("--order", rule_order);
  rule->add_option("--a", a, "weight exponent");
  rule->add_option("--lo", lo);
  rule->add_option("--hi", hi);
  rule->add_option("--out", o.out);

  auto* list = app.add_subcommand("list", "catalog fields and suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*verify) {
      apply_config(verify, o);
      return run_verify(suite, o);
    }
    if (*deficit) {
      apply_config(deficit, o);
      return run_deficit(field, o);
    }
    if (*sw) {
      apply_config(sw, o);
      return run_sweep(base, perturbation, eps_min, eps_max, o);
    }
    if (*rule) return run_rule(kind, rule_order, a, lo, hi, o);
    if (*list) {
      for (const auto& n : hup::catalog_names()) std::cout << "field " << n << '\n';
      for (const auto& n : hup::suite_names()) std::cout << "suite " << n << '\n';
      return kExitPass;
    }
  } catch (const UsageError& e) {
    std::cerr << "hupcheck: " << e.what() << '\n';
    return kExitUsage;
  } catch (const hup::Error& e) {
    std::cerr << "hupcheck: " << e.what() << '\n';
    switch (e.kind()) {
      case hup::ErrorKind::Parameter:
      case hup::ErrorKind::Catalog:
      case hup::ErrorKind::Capability:
      case hup::ErrorKind::Domain:
        return kExitUsage;
      default:
        return kExitViolation;
    }
  } catch (const std::exception& e) {
    std::cerr << "hupcheck: " << e.what() << '\n';
    return kExitViolation;
  }
  return kExitUsage;
}
