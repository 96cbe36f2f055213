#include "cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "cohesive/acceptance.hpp"
#include "cohesive/catalog.hpp"
#include "cohesive/config.hpp"
#include "cohesive/expr.hpp"
#include "cohesive/forward.hpp"
#include "cohesive/oracle.hpp"
#include "cohesive/reconstruct.hpp"

#ifndef COHESIVE_VERSION
#define COHESIVE_VERSION "0.0.0"
#endif

namespace cohesive::cli {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

std::vector<double> parse_grid(const std::string& spec) {
  auto bad = [&] { throw Error(ErrorKind::BadParameters, "grid '" + spec + "' must be lo:hi:step with step > 0"); };
  std::vector<double> v;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ':')) {
    try {
      std::size_t pos = 0;
      v.push_back(std::stod(part, &pos));
      if (pos != part.size()) bad();
    } catch (const std::logic_error&) {
      bad();
    }
  }
  if (v.size() != 3 || !(v[2] > 0) || !(v[1] >= v[0]) || !std::isfinite(v[1])) bad();
  const long n = std::lround(std::floor((v[1] - v[0]) / v[2] * (1 + 1e-12)));
  if (n > 10000000) bad();
  std::vector<double> g;
  for (long i = 0; i <= n; ++i) g.push_back(v[0] + static_cast<double>(i) * v[2]);
  if (std::abs(g.back() - v[1]) <= 1e-9 * v[2]) g.back() = v[1];
  return g;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

using Clock = std::chrono::steady_clock;

/// JSON config files: a flat object of option names (either "s_grid" or "s-grid")
/// for the subcommand being run; nested objects such as "params" are flattened;
/// a run manifest is accepted and its "resolved_config" is used.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(std::shared_ptr<const std::string> section) : section_(std::move(section)) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    Json j;
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (j.contains("resolved_config")) j = j["resolved_config"];
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    flatten(j, items);
    if (!section_->empty())
      for (auto& item : items) item.parents = {*section_};
    return items;
  }

 private:
  std::shared_ptr<const std::string> section_;

  static std::string scalar(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

  static void flatten(const Json& j, std::vector<CLI::ConfigItem>& items) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.value().is_object()) {
        flatten(it.value(), items);
        continue;
      }
      if (it.value().is_null()) continue;
      CLI::ConfigItem item;
      item.name = it.key();
      std::replace(item.name.begin(), item.name.end(), '_', '-');
      if (it.value().is_array()) {
        for (const auto& e : it.value()) item.inputs.push_back(scalar(e));
      } else {
        item.inputs.push_back(scalar(it.value()));
      }
      items.push_back(std::move(item));
    }
  }
};

struct Common {
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string manifest;
  std::string gnuplot;
};

struct CatalogFlags {
  std::optional<double> k, k1, k2, a, b, delta;
  std::string pair;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--threads,-j", c.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--manifest", c.manifest, "run manifest path (default: next to the outputs)");
  sub->add_option("--gnuplot-script", c.gnuplot, "also write a gnuplot script for the outputs");
}

void add_catalog_flags(CLI::App* sub, CatalogFlags& f, bool with_pair) {
  sub->add_option("--k", f.k, "catalog parameter k");
  sub->add_option("--k1", f.k1, "bilinear slope k1");
  sub->add_option("--k2", f.k2, "bilinear slope k2");
  sub->add_option("--a", f.a, "bilinear breakpoint a");
  sub->add_option("--b", f.b, "bilinear end point b");
  sub->add_option("--delta", f.delta, "exponential regularization delta");
  if (with_pair) sub->add_option("--pair", f.pair, "closed-form model of the catalog entry (index or label)");
}

/// Source JSON for a catalog reference or file, with flag overrides applied.
Json resolve_source(const std::string& arg, const CatalogFlags& f) {
  Json j = source_from_argument(arg);
  const bool any = f.k || f.k1 || f.k2 || f.a || f.b || f.delta;
  if (j.contains("catalog")) {
    Json& p = j["params"];
    if (p.is_null()) p = Json::object();
    if (f.k) p["k"] = *f.k;
    if (f.k1) p["k1"] = *f.k1;
    if (f.k2) p["k2"] = *f.k2;
    if (f.a) p["a"] = *f.a;
    if (f.b) p["b"] = *f.b;
    if (f.delta) p["delta"] = *f.delta;
    if (!f.pair.empty()) {
      bool digits = std::all_of(f.pair.begin(), f.pair.end(), [](char c) { return std::isdigit(c); });
      j["pair"] = digits ? Json(std::stoul(f.pair)) : Json(f.pair);
    }
  } else if (any || !f.pair.empty()) {
    throw Error(ErrorKind::BadParameters, "catalog parameters apply to catalog sources only");
  }
  return j;
}

/// Hash of an input: the file bytes, or the canonical catalog reference.
Json input_record(const std::string& role, const std::string& arg, const Json& resolved) {
  std::string bytes;
  if (arg.rfind("catalog:", 0) == 0) {
    bytes = resolved.dump();
  } else {
    std::ifstream in(arg, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    bytes = os.str();
  }
  return {{"role", role}, {"source", arg}, {"resolved", resolved}, {"sha256", sha256_hex(bytes)}};
}

class Outputs {
 public:
  void write(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::BadParameters, "cannot write '" + path.string() + "'");
    f << content;
    files_.push_back({{"path", path.string()}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
  }
  const Json& files() const { return files_; }

 private:
  Json files_ = Json::array();
};

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << "\n";
  }
  void row(const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os_ << (i ? "," : "") << csv_number(v[i]);
    os_ << "\n";
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

/// Option strings typed back into JSON numbers and booleans where they parse as such.
Json typed(const std::string& v) {
  if (v == "true" || v == "false") return v == "true";
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos == v.size() && std::isfinite(d)) {
      if (d == std::trunc(d) && std::abs(d) < 1e15 && v.find_first_of(".eE") == std::string::npos)
        return static_cast<long long>(d);
      return d;
    }
  } catch (const std::logic_error&) {
  }
  return v;
}

Json resolved_config(const CLI::App* sub) {
  Json j = Json::object();
  for (const CLI::Option* o : sub->get_options()) {
    std::string name = o->get_lnames().empty() ? "" : o->get_lnames().front();
    if (name.empty() || name == "help" || name == "config") continue;
    std::replace(name.begin(), name.end(), '-', '_');
    if (o->count() > 0) {
      auto r = o->results();
      if (o->get_expected_max() > 1 || r.size() > 1) {
        Json a = Json::array();
        for (const auto& x : r) a.push_back(typed(x));
        j[name] = a;
      } else if (o->get_expected_min() == 0 && o->get_type_size() == 0) {
        j[name] = true;
      } else {
        j[name] = r.empty() ? Json("") : typed(r.front());
      }
    } else if (!o->get_default_str().empty()) {
      j[name] = typed(o->get_default_str());
    }
  }
  return j;
}

Json report_json(const HypothesisReport& rep) {
  Json a = Json::array();
  for (const auto& c : rep.checks) {
    Json e = {{"name", c.name}, {"pass", c.pass}, {"mandatory", c.mandatory}};
    if (!c.pass) {
      e["worst"] = std::isfinite(c.worst) ? Json(c.worst) : Json(csv_number(c.worst));
      e["location"] = std::isfinite(c.location) ? Json(c.location) : Json(csv_number(c.location));
      e["note"] = c.note;
    }
    a.push_back(e);
  }
  return a;
}

Json finite_or_string(double v) { return std::isfinite(v) ? Json(v) : Json(csv_number(v)); }

struct Run {
  std::string command;
  std::vector<std::string> argv;
  const CLI::App* sub = nullptr;
  Clock::time_point t0 = Clock::now();
  Json inputs = Json::array();
  Json diagnostics = Json::object();
  Outputs outputs;

  void write_manifest(const fs::path& path) {
    Json m;
    m["command"] = command;
    m["argv"] = argv;
    m["tool_version"] = COHESIVE_VERSION;
    m["resolved_config"] = resolved_config(sub);
    m["inputs"] = inputs;
    m["outputs"] = outputs.files();
    m["timing_seconds"] = std::chrono::duration<double>(Clock::now() - t0).count();
    m["diagnostics"] = diagnostics;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream(path) << m.dump(2) << "\n";
  }
};

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  fs::path out = p;
  out.replace_filename(p.stem().string() + suffix);
  return out;
}

std::string quote(const fs::path& p) { return "'" + p.filename().string() + "'"; }

// ---------------------------------------------------------------------------

struct ForwardArgs {
  std::string model;
  std::string s_grid = "0:2:0.05";
  std::string out;
  std::vector<std::string> profiles;
  bool phi = false;
  bool no_check = false;
  int nodes = 512;
};

int do_forward(const ForwardArgs& a, const CatalogFlags& cf, const Common& c, Run& run, std::ostream& out) {
  Json src = resolve_source(a.model, cf);
  run.inputs.push_back(input_record("model", a.model, src));
  PhaseFieldModel model = load_model(src, !a.no_check);
  ForwardSolver solver(model, a.nodes, c.threads);
  auto grid = parse_grid(a.s_grid);
  auto curve = solver.cohesive_curve(grid, c.threads);

  Csv csv({"s", "g", "g_prime", "m_star"});
  for (std::size_t i = 0; i < grid.size(); ++i)
    csv.row({grid[i], curve.g_values[i], curve.g_prime_values[i], curve.m_star_values[i]});

  run.diagnostics = {{"model", model.name},
                     {"sigma", finite_or_string(model.sigma)},
                     {"two_psi1", model.two_psi1()},
                     {"s_frac", finite_or_string(curve.s_frac)},
                     {"phi_classification", to_string(solver.phi().classification)},
                     {"phi0plus", finite_or_string(solver.phi().phi0plus)},
                     {"phi1minus", finite_or_string(solver.phi().phi1minus)},
                     {"best_effort", curve.best_effort},
                     {"hypotheses", report_json(model.report)}};
  if (curve.best_effort) std::cerr << "warning: Phi is not monotone; g computed by a best-effort scan\n";

  if (a.out.empty()) {
    out << csv.str();
  } else {
    run.outputs.write(a.out, csv.str());
  }
  const fs::path base = a.out.empty() ? fs::path("forward.csv") : fs::path(a.out);

  if (a.phi) {
    Csv p({"m", "Phi"});
    const auto& t = solver.phi().table;
    for (std::size_t i = 0; i < t.grid().size(); ++i) p.row({t.grid()[i], t.values()[i]});
    run.outputs.write(with_suffix(base, "_phi.csv"), p.str());
  }
  if (!a.profiles.empty()) {
    Csv p({"m", "s", "lambda", "jump", "t", "w"});
    for (const auto& spec : a.profiles) {
      double m = kNaN, s = kNaN;
      char extra = 0;
      if (std::sscanf(spec.c_str(), "%lf,%lf%c", &m, &s, &extra) != 2)
        throw Error(ErrorKind::BadParameters, "profile '" + spec + "' must be 'm,s'");
      auto prof = optimal_profile(model, m, s);
      for (std::size_t i = 0; i < prof.t_samples.size(); ++i)
        p.row({m, s, prof.lambda, prof.jump, prof.t_samples[i], prof.w_samples[i]});
    }
    run.outputs.write(with_suffix(base, "_profiles.csv"), p.str());
  }
  if (!c.gnuplot.empty()) {
    std::ostringstream g;
    g << "set datafile separator ','\nset key autotitle columnhead\nset xlabel 's'\n"
      << "plot " << quote(base) << " using 1:2 with lines title 'g', " << quote(base)
      << " using 1:3 with lines title \"g'\"\n";
    run.outputs.write(c.gnuplot, g.str());
  }
  if (!a.out.empty() || !c.manifest.empty())
    run.write_manifest(c.manifest.empty() ? with_suffix(base, "_manifest.json") : fs::path(c.manifest));
  return kOk;
}

// ---------------------------------------------------------------------------

struct ReconstructArgs {
  std::string target;
  std::string fix;
  std::string regime;
  std::string out = ".";
  int nodes = 512;
  std::optional<double> sigma;
  std::string s_grid;
  bool no_check = false;
};

int do_reconstruct(const ReconstructArgs& a, const CatalogFlags& cf, const Common& c, Run& run, std::ostream& out) {
  Json src = resolve_source(a.target, cf);
  run.inputs.push_back(input_record("target", a.target, src));
  TargetCohesiveLaw target = load_target(src);

  if (!a.regime.empty()) {
    Regime want = a.regime == "superlinear" ? Regime::Superlinear : Regime::Linear;
    if (want != target.regime)
      throw Error(ErrorKind::WrongRegime, std::string("target '") + target.name + "' is " + to_string(target.regime) +
                                              ", not " + a.regime);
  }
  auto eq = a.fix.find('=');
  if (eq == std::string::npos) throw Error(ErrorKind::BadParameters, "--fix must be khat=<expr> or omega=<expr>");
  std::string kind = a.fix.substr(0, eq);
  ScalarFn fixed = Expression::parse(a.fix.substr(eq + 1)).fn();

  ReconstructOptions opt;
  opt.n_nodes = a.nodes;
  opt.threads = c.threads;
  opt.check_model = !a.no_check;
  ReconstructionResult res;
  if (kind == "khat") res = omega_from_khat(target, fixed, std::nullopt, opt);
  else if (kind == "omega") res = khat_from_omega(target, fixed, opt);
  else throw Error(ErrorKind::BadParameters, "--fix must start with khat= or omega=");
  if (a.sigma) res = rescale_sigma(res, *a.sigma);

  const fs::path dir(a.out);
  static const std::map<std::string, std::pair<std::string, std::string>> files{
      {"omega0(1-t)", {"omega.csv", "omega0_1mt"}},
      {"fhat0_inverse", {"fhat_inverse.csv", "fhat0_inverse"}},
      {"khat0_inverse", {"khat_inverse.csv", "khat0_inverse"}}};
  auto f = files.count(res.produced_name) ? files.at(res.produced_name)
                                          : std::pair<std::string, std::string>{"produced.csv", "value"};
  Csv prod({"t", f.second});
  for (std::size_t i = 0; i < res.produced.grid().size(); ++i)
    prod.row({res.produced.grid()[i], res.produced.values()[i]});
  run.outputs.write(dir / f.first, prod.str());

  if (res.produced_direct) {
    Csv d({"t", kind == "khat" ? "omega0" : (res.regime == Regime::Linear ? "fhat0" : "khat0")});
    for (std::size_t i = 0; i < res.produced_direct->grid().size(); ++i)
      d.row({res.produced_direct->grid()[i], res.produced_direct->values()[i]});
    run.outputs.write(dir / (f.first.substr(0, f.first.find('.')) + "_direct.csv"), d.str());
  }

  Csv phi({"tau", "phi"});
  const auto& tab = res.phi.table;
  for (std::size_t i = 0; i < tab.grid().size(); ++i) phi.row({tab.grid()[i] * tab.grid()[i], tab.values()[i]});
  run.outputs.write(dir / "phi.csv", phi.str());

  const auto& d = res.diagnostics;
  run.diagnostics = {{"target", target.name},
                     {"fixed", kind},
                     {"produced", res.produced_name},
                     {"regime", to_string(res.regime)},
                     {"sigma_scaling", res.sigma_scaling},
                     {"abel_roundtrip_err", finite_or_string(d.abel_roundtrip_err)},
                     {"s_frac0", finite_or_string(d.s_frac0)},
                     {"compatibility_gap", finite_or_string(d.compatibility_gap)},
                     {"blowup_exponent", finite_or_string(d.blowup_exponent)},
                     {"phi_truncated", d.phi_truncated},
                     {"phi0_times_pi", finite_or_string(d.phi0_times_pi)},
                     {"target_hypotheses", report_json(d.hypothesis_report)},
                     {"model_hypotheses", report_json(res.model.report)}};

  if (!a.s_grid.empty()) {
    auto rt = round_trip(target, res, parse_grid(a.s_grid), c.threads);
    Csv r({"s", "g_target", "g_model"});
    for (std::size_t i = 0; i < rt.s.size(); ++i) r.row({rt.s[i], rt.g_target[i], rt.g_model[i]});
    run.outputs.write(dir / "roundtrip.csv", r.str());
    run.diagnostics["roundtrip_sup_rel_err"] = finite_or_string(rt.sup_rel_err);
    run.diagnostics["roundtrip_mean_rel_err"] = finite_or_string(rt.mean_rel_err);
  }
  if (!c.gnuplot.empty()) {
    std::ostringstream g;
    g << "set datafile separator ','\nset key autotitle columnhead\nset xlabel 't'\n"
      << "plot '" << f.first << "' using 1:2 with lines\n";
    run.outputs.write(c.gnuplot, g.str());
  }
  run.write_manifest(c.manifest.empty() ? dir / "manifest.json" : fs::path(c.manifest));
  out << "wrote " << f.first << " and phi.csv to " << dir.string() << " (Abel round trip "
      << csv_number(d.abel_roundtrip_err) << ")\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct OracleArgs {
  std::string model;
  std::vector<double> s;
  int nodes = 2000;
  int m_grid = 200;
  std::string method = "newton";
  std::string init = "dual";
  bool compare = false;
  std::string out;
};

int do_oracle(const OracleArgs& a, const CatalogFlags& cf, const Common& c, Run& run, std::ostream& out) {
  Json src = resolve_source(a.model, cf);
  run.inputs.push_back(input_record("model", a.model, src));
  PhaseFieldModel model = load_model(src, true);
  OracleConfig cfg;
  cfg.n_w = a.nodes;
  cfg.n_m = a.m_grid;
  cfg.threads = c.threads;
  cfg.method = a.method == "cd" ? OracleMethod::CoordinateDescent : OracleMethod::Newton;
  cfg.init = a.init == "affine" ? OracleInit::Affine : OracleInit::Dual;
  cfg.validate();

  std::optional<ForwardSolver> solver;
  if (a.compare) solver.emplace(model, 512, c.threads);
  std::vector<std::string> head{"s", "g_discrete", "argmin_m"};
  if (a.compare) head.insert(head.end(), {"g_forward", "rel_dev"});
  Csv csv(head);
  double worst = 0;
  for (double s : a.s) {
    auto r = discrete_g(model, s, cfg);
    std::vector<double> row{s, r.g, r.argmin_m};
    if (solver) {
      double g = solver->g_value(s);
      double rel = std::abs(r.g - g) / std::abs(g);
      worst = std::max(worst, rel);
      row.insert(row.end(), {g, rel});
    }
    csv.row(row);
  }
  run.diagnostics = {{"model", model.name}, {"n_w", cfg.n_w}, {"n_m", cfg.n_m}};
  if (a.compare) run.diagnostics["max_rel_dev"] = worst;
  if (a.out.empty()) {
    out << csv.str();
  } else {
    run.outputs.write(a.out, csv.str());
  }
  const fs::path base = a.out.empty() ? fs::path("oracle.csv") : fs::path(a.out);
  if (!c.gnuplot.empty()) {
    std::ostringstream g;
    g << "set datafile separator ','\nset key autotitle columnhead\nset xlabel 's'\n"
      << "plot " << quote(base) << " using 1:2 with linespoints\n";
    run.outputs.write(c.gnuplot, g.str());
  }
  if (!a.out.empty() || !c.manifest.empty())
    run.write_manifest(c.manifest.empty() ? with_suffix(base, "_manifest.json") : fs::path(c.manifest));
  return kOk;
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::string suite = "acceptance";
  std::string report = "report.json";
  std::vector<int> criteria;
};

int do_validate(const ValidateArgs& a, const Common& c, Run& run, std::ostream& out) {
  std::vector<int> ids = a.criteria;
  if (ids.empty())
    for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
  Json results = Json::array();
  bool all = true;
  for (int id : ids) {
    auto r = run_criterion(id, c.threads);
    out << format_line(r) << std::endl;
    all = all && r.pass;
    results.push_back(to_json(r));
  }
  Json rep = {{"suite", a.suite}, {"all_pass", all}, {"criteria", results}};
  run.outputs.write(a.report, rep.dump(2) + "\n");
  run.diagnostics = {{"all_pass", all}};
  if (!c.manifest.empty()) run.write_manifest(c.manifest);
  return all ? kOk : kFailure;
}

// ---------------------------------------------------------------------------

Json entry_json(const CatalogEntry& e) {
  const auto& t = e.target;
  Json models = Json::array();
  for (std::size_t i = 0; i < e.analytic_models.size(); ++i) {
    const auto& m = e.analytic_models[i];
    models.push_back({{"pair", i}, {"label", m.label}, {"fixed", m.fixed_kind}, {"produced", m.produced_kind}});
  }
  return {{"name", e.name},
          {"description", e.description},
          {"params", params_to_json(e.params)},
          {"regime", to_string(t.regime)},
          {"sigma", finite_or_string(t.sigma)},
          {"g_inf", finite_or_string(t.g_inf)},
          {"s_frac0", finite_or_string(t.s_frac0)},
          {"kinks", t.kinks},
          {"closed_form_models", models}};
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::HypothesisViolation:
    case ErrorKind::CompatibilityError:
      return kHypothesis;
    case ErrorKind::NonConvergent:
    case ErrorKind::NonFinite:
    case ErrorKind::NoBracket:
    case ErrorKind::EnvelopeViolated:
      return kNonConvergence;
    default:
      return kFailure;
  }
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cohesive laws from phase-field damage models: forward evaluation, reconstruction, checks"};
  app.name("cohesive");
  app.set_version_flag("--version", COHESIVE_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  auto section = std::make_shared<std::string>();
  app.set_config("--config", "", "JSON file with option values for the subcommand (flags take precedence)");
  app.config_formatter(std::make_shared<JsonConfig>(section));
  app.allow_config_extras(CLI::config_extras_mode::error);

  Common common;
  CatalogFlags cflags;

  ForwardArgs fa;
  auto* fwd = app.add_subcommand("forward", "evaluate g, g' and m_s on an opening grid");
  fwd->add_option("--model", fa.model, "catalog:NAME or a JSON model file")->required();
  fwd->add_option("--s-grid", fa.s_grid, "openings lo:hi:step")->capture_default_str();
  fwd->add_option("--out", fa.out, "CSV output (stdout when omitted)");
  fwd->add_option("--profiles", fa.profiles, "optimal profiles for 'm,s' pairs")->delimiter(';');
  fwd->add_flag("--phi", fa.phi, "also write the jump threshold table");
  fwd->add_option("--nodes", fa.nodes, "nodes of the Phi table")->check(CLI::Range(16, 1 << 20))->capture_default_str();
  fwd->add_flag("--no-check", fa.no_check, "skip the hypothesis checks");
  add_catalog_flags(fwd, cflags, true);
  add_common(fwd, common);

  ReconstructArgs ra;
  auto* rec = app.add_subcommand("reconstruct", "build a model with a prescribed cohesive law");
  rec->add_option("--target", ra.target, "catalog:NAME or a JSON target file")->required();
  rec->add_option("--fix", ra.fix, "fixed ingredient: khat=<expr in t> or omega=<expr in t>")->required();
  rec->add_option("--regime", ra.regime, "expected regime")->check(CLI::IsMember({"linear", "superlinear"}));
  rec->add_option("--out", ra.out, "output directory")->capture_default_str();
  rec->add_option("--nodes", ra.nodes, "nodes of the produced table")->check(CLI::Range(16, 1 << 20))
      ->capture_default_str();
  rec->add_option("--sigma", ra.sigma, "rescale to critical stress sigma")->check(CLI::PositiveNumber);
  rec->add_option("--s-grid", ra.s_grid, "also run a forward round trip on lo:hi:step");
  rec->add_flag("--no-check", ra.no_check, "skip the model hypothesis checks");
  add_catalog_flags(rec, cflags, false);
  add_common(rec, common);

  OracleArgs oa;
  auto* orc = app.add_subcommand("oracle", "brute-force discrete minimization of the reduced energy");
  orc->add_option("--model", oa.model, "catalog:NAME or a JSON model file")->required();
  orc->add_option("--s", oa.s, "openings, comma separated")->delimiter(',')->required()->check(CLI::PositiveNumber);
  orc->add_option("--nodes", oa.nodes, "cells of the w grid")->check(CLI::Range(4, 1 << 22))->capture_default_str();
  orc->add_option("--m-grid", oa.m_grid, "size of the m scan")->check(CLI::Range(2, 1 << 20))->capture_default_str();
  orc->add_option("--method", oa.method, "inner solver")->check(CLI::IsMember({"newton", "cd"}))->capture_default_str();
  orc->add_option("--init", oa.init, "starting profile")->check(CLI::IsMember({"dual", "affine"}))
      ->capture_default_str();
  orc->add_flag("--compare", oa.compare, "add the forward g and the relative deviation");
  orc->add_option("--out", oa.out, "CSV output (stdout when omitted)");
  add_catalog_flags(orc, cflags, true);
  add_common(orc, common);

  ValidateArgs va;
  auto* val = app.add_subcommand("validate", "run a validation suite");
  val->add_option("--suite", va.suite, "suite name")->check(CLI::IsMember({"acceptance"}))->capture_default_str();
  val->add_option("--report", va.report, "JSON report path")->capture_default_str();
  val->add_option("--criterion", va.criteria, "run only these criteria")->delimiter(',')
      ->check(CLI::Range(1, kCriterionCount));
  add_common(val, common);

  auto* cat = app.add_subcommand("catalog", "list or show catalog entries");
  cat->require_subcommand(1);
  auto* cat_list = cat->add_subcommand("list", "names and descriptions");
  std::string show_name;
  CatalogFlags show_flags;
  auto* cat_show = cat->add_subcommand("show", "one entry as JSON");
  cat_show->add_option("name", show_name, "entry name")->required();
  add_catalog_flags(cat_show, show_flags, false);

  std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  for (const auto& a : args) {
    if (a == "forward" || a == "reconstruct" || a == "oracle" || a == "validate") {
      *section = a;
      break;
    }
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kFailure;
  }

  Run run;
  std::ostringstream cmd;
  for (std::size_t i = 0; i < argv.size(); ++i) cmd << (i ? " " : "") << argv[i];
  run.command = cmd.str();
  run.argv = argv;

  try {
    if (*fwd) {
      run.sub = fwd;
      return do_forward(fa, cflags, common, run, out);
    }
    if (*rec) {
      run.sub = rec;
      return do_reconstruct(ra, cflags, common, run, out);
    }
    if (*orc) {
      run.sub = orc;
      return do_oracle(oa, cflags, common, run, out);
    }
    if (*val) {
      run.sub = val;
      return do_validate(va, common, run, out);
    }
    if (*cat_list) {
      for (const auto& n : names()) out << n << "\t" << get(n).description << "\n";
      return kOk;
    }
    if (*cat_show) {
      Json src = resolve_source("catalog:" + show_name, show_flags);
      out << entry_json(get(show_name, params_from_json(src["params"]))).dump(2) << "\n";
      return kOk;
    }
  } catch (const HypothesisViolation& e) {
    err << "error: " << e.what() << "\n";
    return kHypothesis;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace cohesive::cli
