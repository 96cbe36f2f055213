#include "cohesive/config.hpp"

#include <cmath>
#include <fstream>

#include "cohesive/expr.hpp"

namespace cohesive {

namespace {

void bad(const std::string& msg) { throw Error(ErrorKind::BadParameters, msg); }

ScalarFn expr_fn(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) bad(std::string("missing expression '") + key + "'");
  return Expression::parse(j[key].get<std::string>()).fn();
}

std::optional<ScalarFn> optional_expr(const Json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return expr_fn(j, key);
}

std::string catalog_name(const Json& j) {
  if (!j["catalog"].is_string()) bad("'catalog' must be a string");
  return j["catalog"].get<std::string>();
}

/// First opening where g0' ≤ 0: doubling scan, then bisection.
double first_zero(const ScalarFn& gp) {
  double lo = 0, hi = 1e-3;
  while (hi <= 1e6 && gp(hi) > 0) {
    lo = hi;
    hi *= 2;
  }
  if (hi > 1e6) return kInf;
  for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
    double mid = 0.5 * (lo + hi);
    (gp(mid) > 0 ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

double number_or_inf(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "+inf") return kInf;
    try {
      std::size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  bad("expected a number or \"inf\", got " + j.dump());
  return kNaN;
}

CatalogParams params_from_json(const Json& j, CatalogParams p) {
  if (j.is_null()) return p;
  if (!j.is_object()) bad("'params' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    double v = number_or_inf(it.value());
    if (k == "k") p.k = v;
    else if (k == "k1") p.k1 = v;
    else if (k == "k2") p.k2 = v;
    else if (k == "a") p.a = v;
    else if (k == "b") p.b = v;
    else if (k == "delta") p.delta = v;
    else bad("unknown catalog parameter '" + k + "'");
  }
  return p;
}

Json params_to_json(const CatalogParams& p) {
  Json j;
  j["k"] = p.k;
  j["k1"] = p.k1;
  j["k2"] = p.k2;
  j["a"] = p.a;
  if (p.b) j["b"] = *p.b;
  j["delta"] = p.delta;
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, path + ": " + e.what());
  }
}

Json source_from_argument(const std::string& arg) {
  const std::string prefix = "catalog:";
  if (arg.rfind(prefix, 0) == 0) {
    Json j;
    j["catalog"] = arg.substr(prefix.size());
    return j;
  }
  return read_json_file(arg);
}

PhaseFieldModel load_model(const Json& j, bool check) {
  if (!j.is_object()) bad("model specification must be a JSON object");
  if (j.contains("catalog")) {
    CatalogEntry e = get(catalog_name(j), params_from_json(j.value("params", Json())));
    if (e.analytic_models.empty()) bad("catalog entry '" + e.name + "' carries no closed-form model");
    std::size_t idx = 0;
    if (j.contains("pair")) {
      const Json& p = j["pair"];
      if (p.is_number_integer()) {
        idx = p.get<std::size_t>();
      } else if (p.is_string()) {
        idx = e.analytic_models.size();
        for (std::size_t i = 0; i < e.analytic_models.size(); ++i)
          if (e.analytic_models[i].label == p.get<std::string>()) idx = i;
      }
      if (idx >= e.analytic_models.size()) bad("no closed-form model " + p.dump() + " in '" + e.name + "'");
    }
    return e.analytic_models[idx].model(check);
  }
  ModelOptions mo;
  mo.check_hypotheses = check;
  mo.name = j.value("name", std::string("expression model"));
  mo.khat = optional_expr(j, "khat");
  mo.khat_prime = optional_expr(j, "khat_prime");
  if (j.contains("sigma")) mo.sigma = number_or_inf(j["sigma"]);
  return make_model(expr_fn(j, "fhat"), expr_fn(j, "Q"), expr_fn(j, "omega"), default_degradation(), mo);
}

TargetCohesiveLaw load_target(const Json& j) {
  if (!j.is_object()) bad("target specification must be a JSON object");
  if (j.contains("catalog")) return get(catalog_name(j), params_from_json(j.value("params", Json()))).target;
  TargetCohesiveLaw t;
  t.name = j.value("name", std::string("expression target"));
  ScalarFn g0 = expr_fn(j, "g0");
  ScalarFn gp = expr_fn(j, "g0_prime");
  std::optional<ScalarFn> gpp = optional_expr(j, "g0_second");
  std::string regime = j.value("regime", std::string("linear"));
  if (regime == "linear") t.regime = Regime::Linear;
  else if (regime == "superlinear") t.regime = Regime::Superlinear;
  else bad("regime must be 'linear' or 'superlinear'");

  t.sigma = j.contains("sigma") ? number_or_inf(j["sigma"]) : (t.regime == Regime::Linear ? gp(0.0) : kInf);
  t.s_frac0 = j.contains("s_frac0") ? number_or_inf(j["s_frac0"]) : first_zero(gp);
  if (j.contains("g_inf")) t.g_inf = number_or_inf(j["g_inf"]);
  else if (std::isfinite(t.s_frac0)) t.g_inf = g0(t.s_frac0);
  else bad("'g_inf' is required when g0' has no zero");

  const double sf = t.s_frac0;
  if (std::isfinite(sf)) {
    // the law is constant past the fracture opening
    t.g0 = [g0, sf](double s) { return g0(std::min(s, sf)); };
    t.g0_prime = [gp, sf](double s) { return s < sf ? gp(s) : 0.0; };
    if (gpp) {
      ScalarFn f = *gpp;
      t.g0_second = [f, sf](double s) { return s < sf ? f(s) : 0.0; };
    }
  } else {
    t.g0 = g0;
    t.g0_prime = gp;
    t.g0_second = gpp;
  }
  if (j.contains("kinks")) {
    for (const auto& k : j["kinks"]) t.kinks.push_back(number_or_inf(k));
  }
  if (j.contains("envelope")) {
    const Json& e = j["envelope"];
    std::string kind = e.value("kind", std::string("exp_sqrt"));
    double C = number_or_inf(e.at("C"));
    double rate = number_or_inf(e.at("rate"));
    if (kind == "exp_sqrt") t.decay_envelope = DecayEnvelope::exp_sqrt(C, rate);
    else if (kind == "power") t.decay_envelope = DecayEnvelope::power(C, rate);
    else bad("envelope kind must be 'exp_sqrt' or 'power'");
  }
  return t;
}

}  // namespace cohesive
