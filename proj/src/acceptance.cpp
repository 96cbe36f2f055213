#include "cohesive/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <sstream>

#include "cohesive/catalog.hpp"
#include "cohesive/forward.hpp"
#include "cohesive/oracle.hpp"
#include "cohesive/parallel.hpp"
#include "cohesive/reconstruct.hpp"

namespace cohesive {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

/// Non-finite metrics are stored as strings so the report stays valid JSON.
Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

ReconstructOptions recon_options(int threads) {
  ReconstructOptions o;
  o.threads = threads;
  return o;
}

ScalarFn t_squared() {
  return [](double t) { return t * t; };
}

// 1: ω0(1-t) for linear softening with k̂0 = t²
void linear_omega(CriterionResult& r, int threads) {
  auto t0 = Clock::now();
  auto e = get("linear");
  auto rec = omega_from_khat(e.target, t_squared(), std::nullopt, recon_options(threads));
  double worst = 0, mx = 0;
  for (double t : linspace(0.0, 0.999, 20001)) {
    double ex = (1 - t * t) / (M_PI * M_PI);
    mx = std::max(mx, ex);
    worst = std::max(worst, std::abs(rec.produced(t) - ex));
  }
  double secs = elapsed(t0);
  double rel = worst / mx;
  r.pass = rel <= 1e-6 && secs <= 5.0;
  r.detail = fmt("sup|err|/max = %.3e (tol 1e-6), reconstruction %.2f s (limit 5 s)", rel, secs);
  r.metrics = {{"sup_abs_err", worst}, {"sup_rel_err", rel}, {"reconstruction_seconds", secs}};
}

// 2: g and g' for the linear model
void linear_forward(CriterionResult& r, int threads) {
  auto e = get("linear");
  ForwardSolver fs(e.analytic_models[0].model(), 512, threads);
  double eg = 0, ep = 0, ef = 0;
  for (int i = 1; i <= 9; ++i) {
    double s = 0.1 * i;
    eg = std::max(eg, std::abs(fs.g_value(s) - (s - s * s / 2)));
    ep = std::max(ep, std::abs(fs.g_derivative(s) - (1 - s)));
  }
  for (double s : {1.0, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0}) {
    ef = std::max(ef, std::abs(fs.g_value(s) - 0.5));
    ep = std::max(ep, std::abs(fs.g_derivative(s)));
  }
  r.pass = eg <= 1e-4 && ef <= 1e-4 && ep <= 1e-4;
  r.detail = fmt("|g-(s-s^2/2)| = %.2e, |g-0.5| (s>=1) = %.2e, |g'-g0'| = %.2e (tol 1e-4)", eg, ef, ep);
  r.metrics = {{"g_err_softening", eg}, {"g_err_plateau", ef}, {"g_prime_err", ep}};
}

// 3: Φ(m) = 1 - m for the linear model
void linear_phi(CriterionResult& r, int) {
  auto model = get("linear").analytic_models[0].model();
  double worst = 0, where = kNaN;
  for (double m : linspace(0.01, 0.99, 99)) {
    double d = std::abs(capital_phi(model, m) - (1 - m));
    if (d > worst) {
      worst = d;
      where = m;
    }
  }
  r.pass = worst <= 1e-4;
  r.detail = fmt("max|Phi(m)-(1-m)| = %.2e at m=%.2f (tol 1e-4)", worst, where);
  r.metrics = {{"max_err", worst}, {"at_m", num(where)}};
}

// 4: both Dugdale pairs
void dugdale(CriterionResult& r, int threads) {
  auto e = get("dugdale");
  bool ok = true;
  double eg_all = 0, ephi_all = 0;
  bool mono_all = true;
  Json per = Json::array();
  for (const auto& am : e.analytic_models) {
    auto model = am.model();
    ForwardSolver fs(model, 512, threads);
    double eg = 0;
    for (int i = 1; i <= 20; ++i) {
      double s = 0.1 * i;
      eg = std::max(eg, std::abs(fs.g_value(s) - std::min(s, 1.0)));
    }
    double ephi = 0, prev = -kInf;
    bool mono = true;
    for (double x : linspace(0.01, 0.99, 99)) {
      double p = capital_phi(model, x);
      if (p < prev - 1e-9 * std::abs(prev)) mono = false;
      prev = p;
      ephi = std::max(ephi, std::abs(p - 2 * std::sqrt(model.fhat(x))));
    }
    ok = ok && eg <= 1e-3 && ephi <= 1e-3 && mono;
    eg_all = std::max(eg_all, eg);
    ephi_all = std::max(ephi_all, ephi);
    mono_all = mono_all && mono;
    per.push_back({{"pair", am.label}, {"g_err", eg}, {"phi_err", ephi}, {"phi_non_decreasing", mono}});
  }
  r.pass = ok && e.analytic_models.size() == 2;
  r.detail = fmt("%zu pairs: |g-min(s,1)| = %.2e, |Phi-2fhat^1/2| = %.2e (tol 1e-3), Phi non-decreasing: %s",
                 e.analytic_models.size(), eg_all, ephi_all, mono_all ? "yes" : "no");
  r.metrics = {{"pairs", per}};
}

// 5: f̂0^{-1} for linear softening with ω0 = x²/4
void linear_fhat(CriterionResult& r, int threads) {
  auto e = get("linear");
  auto rec = khat_from_omega(e.target, [](double x) { return x * x / 4; }, recon_options(threads));
  const AnalyticModel* ref = nullptr;
  for (const auto& am : e.analytic_models)
    if (am.fixed_kind == "omega" && std::abs(am.fixed(0.5) - 0.0625) < 1e-15) ref = &am;
  if (!ref) throw Error(ErrorKind::Unsupported, "linear entry has no closed form for omega(x) = x^2/4");
  double worst = 0, where = kNaN;
  for (double y : linspace(0.001, 0.999, 20001)) {
    double d = std::abs(rec.produced(y) - ref->produced(y));
    if (d > worst) {
      worst = d;
      where = y;
    }
  }
  r.pass = worst <= 1e-6;
  r.detail = fmt("sup|fhat^-1 err| = %.3e at %.4f (tol 1e-6)", worst, where);
  r.metrics = {{"sup_err", worst}, {"at", num(where)}};
}

// 6: Abel round trips
void abel(CriterionResult& r, int threads) {
  bool ok = true;
  double worst_lin = 0;
  Json per = Json::object();
  for (const auto& name : names()) {
    auto e = get(name);
    if (e.dugdale || e.target.regime != Regime::Linear) continue;
    RFunction R = build_R(e.target);
    SmallPhi phi = tabulate_phi(R, 1024, threads);
    ScalarFn f = [&](double t) { return phi(t); };
    auto ts = linspace(0.0, R.sigma2 * (1 - 1e-3), 401);
    std::vector<double> err(ts.size());
    parallel_for(ts.size(), threads,
                 [&](std::size_t i) { err[i] = std::abs(abel_forward_linear(f, ts[i], R.breakpoints) - R.R(ts[i])); });
    double w = *std::max_element(err.begin(), err.end());
    per[name] = w;
    worst_lin = std::max(worst_lin, w);
    ok = ok && w <= 1e-6;
  }
  auto e = get("logarithmic");
  RFunction R = build_R(e.target);
  SmallPhi phi = tabulate_phi(R, 1024, threads);
  ScalarFn f = [&](double t) { return phi(t); };
  auto ts = linspace(0.0, 4.0, 401);
  std::vector<double> err(ts.size());
  parallel_for(ts.size(), threads, [&](std::size_t i) {
    double t = ts[i], q = std::sqrt(t);
    err[i] = std::abs(abel_forward_super(f, t, phi.T_max) - (1 + q) * std::exp(-q));
  });
  double wlog = *std::max_element(err.begin(), err.end());
  per["logarithmic"] = wlog;
  r.pass = ok && wlog <= 1e-5;
  r.detail = fmt("linear regime sup err %.2e (tol 1e-6), logarithmic sup err %.2e (tol 1e-5)", worst_lin, wlog);
  r.metrics = {{"sup_err", per}};
}

// 7: oracle against the forward engine
void oracle_check(CriterionResult& r, int threads) {
  bool ok = true;
  double worst = 0, slowest = 0;
  Json per = Json::object();
  for (const char* name : {"dugdale", "linear", "hyperbolic", "logarithmic"}) {
    auto e = get(name);
    auto model = e.analytic_models[0].model();
    auto t0 = Clock::now();
    ForwardSolver fs(model, 512, threads);
    double sf = std::isfinite(e.target.s_frac0) ? e.target.s_frac0 : effective_s_frac(e.target);
    Json rows = Json::array();
    double law_worst = 0;
    for (double frac : {0.2, 0.4, 0.6, 0.8}) {
      double s = frac * sf;
      OracleConfig cfg;
      cfg.threads = threads;
      auto o = discrete_g(model, s, cfg);
      double g = fs.g_value(s);
      double rel = std::abs(o.g - g) / g;
      law_worst = std::max(law_worst, rel);
      rows.push_back({{"s", s}, {"oracle", o.g}, {"forward", g}, {"rel_err", rel}, {"argmin_m", o.argmin_m},
                      {"m_star", num(fs.m_star(s))}});
    }
    double secs = elapsed(t0);
    ok = ok && law_worst <= 0.02 && secs <= 60;
    worst = std::max(worst, law_worst);
    slowest = std::max(slowest, secs);
    per[name] = {{"rows", rows}, {"seconds", secs}};
  }
  r.pass = ok;
  r.detail = fmt("max rel dev %.2e (tol 2e-2), slowest law %.1f s (limit 60 s)", worst, slowest);
  r.metrics = per;
}

std::vector<double> opening_grid(double sf, double lo, double hi, int n) { return linspace(lo * sf, hi * sf, n); }

// 8: reconstruct then forward, no closed forms used
void round_trips(CriterionResult& r, int threads) {
  bool ok = true;
  double worst = 0;
  Json per = Json::object();
  for (const char* name : {"bilinear", "hyperbolic", "quad_hyperbolic", "exponential"}) {
    auto e = get(name);
    auto rec = omega_from_khat(e.target, t_squared(), std::nullopt, recon_options(threads));
    double sf = std::isfinite(e.target.s_frac0) ? e.target.s_frac0 : effective_s_frac(e.target);
    auto rt = round_trip(e.target, rec, opening_grid(sf, 0.02, 0.98, 49), threads);
    ok = ok && rt.sup_rel_err <= 5e-3;
    worst = std::max(worst, rt.sup_rel_err);
    per[name] = {{"s_star", sf}, {"sup_rel_err", rt.sup_rel_err}, {"mean_rel_err", rt.mean_rel_err}};
  }
  r.pass = ok;
  r.detail = fmt("max sup rel dev %.2e (tol 5e-3)", worst);
  r.metrics = per;
}

struct ModelUnderTest {
  std::string label;
  PhaseFieldModel model;
  double s_star;
  double g_inf;
  bool closed_form;
};

// 9: structural properties of g
void properties(CriterionResult& r, int threads) {
  std::vector<ModelUnderTest> models;
  for (const auto& name : names()) {
    auto e = get(name);
    double sf = std::isfinite(e.target.s_frac0) ? e.target.s_frac0 : effective_s_frac(e.target);
    if (e.analytic_models.empty()) {
      auto rec = omega_from_khat(e.target, t_squared(), std::nullopt, recon_options(threads));
      models.push_back({name + "/reconstructed", rec.model, sf, e.target.g_inf, false});
    }
    for (const auto& am : e.analytic_models)
      models.push_back({name + "/" + am.label, am.model(), sf, e.target.g_inf, true});
  }

  bool ok = true;
  Json per = Json::object();
  std::vector<std::string> failed;
  for (const auto& mt : models) {
    ForwardSolver fs(mt.model, 512, threads);
    auto s = linspace(0.0, 1.5 * mt.s_star, 61);
    std::vector<double> g(s.size());
    parallel_for(s.size(), threads, [&](std::size_t i) { g[i] = fs.g_value(s[i]); });
    const double two_psi1 = mt.model.two_psi1();
    double concave = 0, decrease = 0, bound = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      double cap = std::isfinite(mt.model.sigma) ? std::min(mt.model.sigma * s[i], two_psi1) : two_psi1;
      bound = std::max(bound, g[i] - cap);
      if (i > 0) decrease = std::max(decrease, g[i - 1] - g[i]);
      if (i > 0 && i + 1 < s.size()) concave = std::max(concave, g[i + 1] - 2 * g[i] + g[i - 1]);
    }
    double tail = std::abs(fs.g_value(10 * mt.s_star) - two_psi1);
    double gap = mt.closed_form ? std::abs(two_psi1 - mt.g_inf) : kNaN;
    bool pass = concave <= 1e-8 && decrease <= 1e-10 && bound <= 1e-8 && tail <= 1e-4 && (!mt.closed_form || gap <= 1e-8);
    if (!pass) failed.push_back(mt.label);
    ok = ok && pass;
    per[mt.label] = {{"concavity_violation", concave}, {"decrease", decrease}, {"bound_excess", bound},
                     {"tail_err", tail}, {"two_psi1_gap", num(gap)}, {"pass", pass}};
  }

  // monotonicity of the regularized exponential law in δ
  const std::vector<double> deltas{1e-3, 1e-2, 1e-1, 0.25};
  std::vector<ScalarFn> gs;
  for (double d : deltas) {
    CatalogParams p;
    p.delta = d;
    gs.push_back(get("exponential", p).analytic_g);
  }
  double worst_reversal = 0;
  for (double s : linspace(0.05, 8.0, 160))
    for (std::size_t i = 0; i + 1 < gs.size(); ++i) worst_reversal = std::max(worst_reversal, gs[i](s) - gs[i + 1](s));
  bool delta_ok = worst_reversal <= 0;
  per["exponential_delta_monotonicity"] = {{"max_g_small_delta_minus_g_large_delta", worst_reversal}, {"pass", delta_ok}};
  if (!delta_ok) failed.push_back("exponential delta monotonicity");

  r.pass = ok && delta_ok;
  std::ostringstream os;
  for (std::size_t i = 0; i < failed.size(); ++i) os << (i ? ", " : "") << failed[i];
  r.detail = fmt("%zu models checked; failing: %s", models.size(), failed.empty() ? "none" : os.str().c_str());
  r.metrics = per;
}

// 10: diffuse density against brute force, envelope shape
void diffuse_density(CriterionResult& r, int threads) {
  auto deg = default_degradation();
  std::mt19937_64 rng(20241019);
  std::uniform_real_distribution<double> lvs(std::log(1e-2), std::log(1e2)), lt(std::log(1e-3), std::log(1e1));
  const int n = 100;
  std::vector<double> vs(n), ts(n), err(n);
  for (int i = 0; i < n; ++i) {
    vs[i] = std::exp(lvs(rng));
    ts[i] = std::exp(lt(rng));
  }
  parallel_for(n, threads, [&](std::size_t i) {
    double h = h_sigma(deg, vs[i], ts[i]);
    double hd = discrete_h_sigma(deg, vs[i], ts[i]);
    err[i] = std::abs(h - hd) / std::abs(hd);
  });
  double worst = *std::max_element(err.begin(), err.end());

  double concave = 0, above = 0;
  auto grid = linspace(0.0, 10.0, 401);
  for (double v : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    auto env = h_sigma_envelope(deg, v, grid);
    const auto& ev = env.values();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double h = h_sigma(deg, v, grid[i]);
      above = std::max(above, ev[i] - h);
      if (i > 0 && i + 1 < grid.size()) concave = std::max(concave, -(ev[i + 1] - 2 * ev[i] + ev[i - 1]));
    }
  }
  r.pass = worst <= 1e-6 && concave <= 1e-12 && above <= 1e-12;
  r.detail = fmt("max rel dev %.2e over %d pairs (tol 1e-6); envelope convexity defect %.1e, excess over h %.1e",
                 worst, n, concave, above);
  r.metrics = {{"max_rel_err", worst}, {"convexity_defect", concave}, {"excess_over_h", above}};
}

struct Criterion {
  const char* name;
  void (*run)(CriterionResult&, int);
};

const Criterion kCriteria[kCriterionCount] = {
    {"linear softening omega reconstruction", linear_omega},
    {"linear softening forward g and g'", linear_forward},
    {"linear softening jump threshold", linear_phi},
    {"Dugdale pairs", dugdale},
    {"linear softening fhat reconstruction", linear_fhat},
    {"Abel round trips", abel},
    {"discrete oracle cross-check", oracle_check},
    {"reconstruct-forward round trips", round_trips},
    {"cohesive law properties", properties},
    {"diffuse density", diffuse_density},
};

}  // namespace

CriterionResult run_criterion(int id, int threads) {
  if (id < 1 || id > kCriterionCount) throw Error(ErrorKind::OutOfRange, fmt("criterion %d does not exist", id));
  const Criterion& c = kCriteria[id - 1];
  CriterionResult r;
  r.id = id;
  r.name = c.name;
  auto t0 = Clock::now();
  try {
    c.run(r, threads);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = elapsed(t0);
  return r;
}

std::vector<CriterionResult> run_acceptance(int threads) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id, threads));
  return out;
}

Json to_json(const CriterionResult& r) {
  return {{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds},
          {"metrics", r.metrics}};
}

std::string format_line(const CriterionResult& r) {
  return fmt("[%s] %d %s: %s (%.2f s)", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str(), r.seconds);
}

}  // namespace cohesive
