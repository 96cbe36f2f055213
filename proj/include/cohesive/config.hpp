#pragma once

#include <json.hpp>
#include <string>

#include "cohesive/catalog.hpp"
#include "cohesive/model.hpp"

namespace cohesive {

using Json = nlohmann::ordered_json;

/// Model or target given by a catalog reference or by expression strings.
///
/// Model, catalog form:     {"catalog": "linear", "params": {"k": 1}, "pair": 0}
///   `pair` is an index into the entry's closed-form models or its label.
/// Model, expression form:  {"fhat": "t^2", "Q": "t^2/4", "omega": "t^2/4",
///                           "khat": "...", "khat_prime": "...", "sigma": 1, "name": "..."}
///   Each map is written in its own argument t; khat, khat_prime and sigma are optional.
/// Target, catalog form:    {"catalog": "exponential", "params": {"k": 1, "delta": 1e-3}}
/// Target, expression form: {"g0": "t - t^2/2", "g0_prime": "1 - t", "g0_second": "-1",
///                           "regime": "linear", "s_frac0": 1, "g_inf": 0.5,
///                           "kinks": [], "envelope": {"kind": "exp_sqrt", "C": 1, "rate": 1}}
///   sigma defaults to g0'(0) (linear) or inf; s_frac0 defaults to the first zero of g0'
///   found by a scan up to 1e6; g_inf defaults to g0(s_frac0) and is required otherwise.
CatalogParams params_from_json(const Json& j, CatalogParams base = {});
Json params_to_json(const CatalogParams& p);

/// "catalog:NAME" or a path to a JSON file.
Json source_from_argument(const std::string& arg);
Json read_json_file(const std::string& path);

PhaseFieldModel load_model(const Json& j, bool check = true);
TargetCohesiveLaw load_target(const Json& j);

/// "inf", "infinity" or a number.
double number_or_inf(const Json& j);

}  // namespace cohesive
