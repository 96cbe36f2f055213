#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cohesive/config.hpp"
#include "cohesive/forward.hpp"

using namespace cohesive;

TEST_CASE("numbers and infinity") {
  CHECK(number_or_inf(Json(2.5)) == 2.5);
  CHECK(std::isinf(number_or_inf(Json("inf"))));
  CHECK(number_or_inf(Json("1e-3")) == 1e-3);
  CHECK_THROWS_AS(number_or_inf(Json("many")), Error);
  CHECK_THROWS_AS(number_or_inf(Json::array()), Error);
}

TEST_CASE("catalog parameters") {
  auto p = params_from_json(Json::parse(R"j({"k": 2, "delta": "0.01"})j"));
  CHECK(p.k == 2.0);
  CHECK(p.delta == 0.01);
  CHECK(p.k1 == CatalogParams{}.k1);
  CHECK_THROWS_AS(params_from_json(Json::parse(R"j({"kk": 2})j")), Error);
  auto back = params_from_json(params_to_json(p));
  CHECK(back.k == p.k);
  CHECK(back.delta == p.delta);
}

TEST_CASE("catalog model selection by index and label") {
  auto a = load_model(Json::parse(R"j({"catalog": "dugdale", "pair": 1})j"));
  auto b = load_model(Json::parse(R"j({"catalog": "dugdale", "pair": "omega(x)=9k^2 x/16"})j"));
  CHECK(a.name == b.name);
  CHECK_THROWS_AS(load_model(Json::parse(R"j({"catalog": "dugdale", "pair": 7})j")), Error);
  CHECK_THROWS_AS(load_model(Json::parse(R"j({"catalog": "quad_hyperbolic"})j")), Error);
}

TEST_CASE("expression model equals the catalog model") {
  auto j = Json::parse(R"j({"fhat": "t^2", "Q": "(1 - (1-t)^2)/pi^2", "omega": "(1 - (1-t)^2)/pi^2",
                           "khat": "t^2", "khat_prime": "2*t", "sigma": 1})j");
  auto m = load_model(j);
  ForwardSolver fs(m);
  for (double s : {0.2, 0.6, 1.4}) CHECK(fs.g_value(s) == doctest::Approx(std::min(s, 1.0) - std::min(s, 1.0) * std::min(s, 1.0) / 2).epsilon(1e-9));
}

TEST_CASE("expression targets and their defaults") {
  auto t = load_target(Json::parse(R"j({"g0": "t - t^2/2", "g0_prime": "1 - t"})j"));
  CHECK(t.sigma == doctest::Approx(1.0));
  CHECK(t.s_frac0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.g_inf == doctest::Approx(0.5));
  CHECK(t.g0(3.0) == doctest::Approx(0.5));
  CHECK(t.g0_prime(3.0) == 0.0);
  auto q = load_target(Json::parse(R"j({"g0": "t/(1+t)", "g0_prime": "1/(1+t)^2", "g_inf": 1})j"));
  CHECK(std::isinf(q.s_frac0));
  CHECK_THROWS_AS(load_target(Json::parse(R"j({"g0": "t/(1+t)", "g0_prime": "1/(1+t)^2"})j")), Error);
  CHECK_THROWS_AS(load_target(Json::parse(R"j({"g0": "t", "g0_prime": "1", "regime": "odd"})j")), Error);
  auto k = load_target(Json::parse(R"j({"g0": "t", "g0_prime": "1 - t", "kinks": [0.25, "inf"]})j"));
  CHECK(k.kinks.size() == 2);
}

TEST_CASE("sources from catalog references and files") {
  CHECK(source_from_argument("catalog:linear")["catalog"] == "linear");
  auto path = std::filesystem::temp_directory_path() / "cohesive_config_test.json";
  std::ofstream(path) << R"j({"catalog": "hyperbolic", "params": {"k": 2}})j";
  auto j = source_from_argument(path.string());
  CHECK(load_target(j).s_frac0 == doctest::Approx(0.5));
  std::ofstream(path) << "{not json";
  try {
    read_json_file(path.string());
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(source_from_argument("/nonexistent/file.json"), Error);
}
