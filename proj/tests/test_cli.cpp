#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "cohesive/config.hpp"

namespace fs = std::filesystem;
using namespace cohesive;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "cohesive");
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::vector<double>> read_csv(const std::string& text, std::string* header = nullptr) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
    rows.push_back(r);
  }
  return rows;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("cohesive_cli_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("grid specifications") {
  auto g = cli::parse_grid("0:2:0.05");
  CHECK(g.size() == 41);
  CHECK(g.back() == 2.0);
  CHECK(cli::parse_grid("0.5:0.5:1").size() == 1);
  for (const char* bad : {"0:1", "0:1:0", "1:0:0.1", "a:1:0.1", "0:1:-1", "0:inf:1"})
    CHECK_THROWS_AS(cli::parse_grid(bad), Error);
}

TEST_CASE("CSV numbers keep full precision") {
  for (double v : {0.1, 1.0 / 3, M_PI, 1e-300, 123456789.123456789}) CHECK(std::stod(cli::csv_number(v)) == v);
  CHECK(cli::csv_number(kNaN) == "nan");
  CHECK(cli::csv_number(-kInf) == "-inf");
}

TEST_CASE("SHA-256 digests") {
  CHECK(cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(cli::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("forward on Dugdale writes min(s,1), a manifest and identical reruns") {
  TempDir d;
  auto r = invoke({"forward", "--model", "catalog:dugdale", "--k", "1", "--s-grid", "0:2:0.05", "--out", d / "g.csv",
                "--phi", "--threads", "2", "--gnuplot-script", d / "g.gp"});
  REQUIRE(r.code == 0);
  std::string header;
  auto rows = read_csv(slurp(d / "g.csv"), &header);
  CHECK(header == "s,g,g_prime,m_star");
  CHECK(rows.size() == 41);
  for (const auto& row : rows) CHECK(std::abs(row[1] - std::min(row[0], 1.0)) <= 1e-3);
  CHECK(fs::exists(d / "g_phi.csv"));
  CHECK(slurp(d / "g.gp").find("plot") != std::string::npos);

  auto m = Json::parse(slurp(d / "g_manifest.json"));
  CHECK(m["resolved_config"]["model"] == "catalog:dugdale");
  CHECK(m["resolved_config"]["threads"] == 2);
  CHECK(m["inputs"][0]["sha256"].get<std::string>().size() == 64);
  bool found = false;
  for (const auto& f : m["outputs"])
    if (f["path"] == d / "g.csv") {
      found = true;
      CHECK(f["sha256"] == cli::sha256_hex(slurp(d / "g.csv")));
    }
  CHECK(found);
  CHECK(m["timing_seconds"].get<double>() >= 0);

  // rerun from the manifest into another file and compare bytes
  auto again = invoke({"forward", "--config", d / "g_manifest.json", "--out", d / "g2.csv", "--threads", "1"});
  REQUIRE(again.code == 0);
  CHECK(slurp(d / "g.csv") == slurp(d / "g2.csv"));
}

TEST_CASE("flags take precedence over the config file") {
  TempDir d;
  std::ofstream(d / "cfg.json") << R"({"model": "catalog:linear", "s_grid": "0:1:0.5", "params": {"k": 2}})";
  auto a = invoke({"forward", "--config", d / "cfg.json"});
  REQUIRE(a.code == 0);
  auto ra = read_csv(a.out);
  CHECK(ra[1][1] == doctest::Approx(0.25));  // k = 2 saturates at 1/(2k)
  auto b = invoke({"forward", "--config", d / "cfg.json", "--k", "1"});
  auto rb = read_csv(b.out);
  CHECK(rb[1][1] == doctest::Approx(0.375));
  std::ofstream(d / "bad.json") << R"({"model": "catalog:linear", "unknown_option": 1})";
  CHECK(invoke({"forward", "--config", d / "bad.json"}).code != 0);
}

TEST_CASE("reconstruct linear softening writes omega.csv") {
  TempDir d;
  auto r = invoke({"reconstruct", "--target", "catalog:linear", "--k", "1", "--fix", "khat=t^2", "--out", d / "rec",
                "--regime", "linear"});
  REQUIRE(r.code == 0);
  auto rows = read_csv(slurp(d / "rec/omega.csv"));
  CHECK(rows.size() > 100);
  for (const auto& row : rows)
    if (row[0] <= 0.999) CHECK(std::abs(row[1] - (1 - row[0] * row[0]) / (M_PI * M_PI)) < 1e-7);
  CHECK(fs::exists(d / "rec/phi.csv"));
  CHECK(fs::exists(d / "rec/manifest.json"));
  auto wrong = invoke({"reconstruct", "--target", "catalog:linear", "--fix", "khat=t^2", "--out", d / "x", "--regime",
                    "superlinear"});
  CHECK(wrong.code == cli::kFailure);
}

TEST_CASE("exit codes") {
  TempDir d;
  std::ofstream(d / "bad_model.json") << R"({"fhat": "t^2", "Q": "t^2/4", "omega": "-t"})";
  auto h = invoke({"forward", "--model", d / "bad_model.json"});
  CHECK(h.code == cli::kHypothesis);
  CHECK(h.err.find("Hp2") != std::string::npos);
  CHECK(invoke({"reconstruct", "--target", "catalog:dugdale", "--fix", "khat=t^2", "--out", d / "r"}).code ==
        cli::kHypothesis);
  CHECK(invoke({"forward", "--model", "catalog:linear", "--s-grid", "1:0:1"}).code == cli::kFailure);
  CHECK(invoke({"forward"}).code == cli::kFailure);
  CHECK(invoke({"nonsense"}).code == cli::kFailure);
  CHECK(invoke({"forward", "--model", "catalog:linear", "--pair", "9"}).code == cli::kFailure);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("oracle and catalog subcommands") {
  auto o = invoke({"oracle", "--model", "catalog:linear", "--s", "0.25,0.5", "--nodes", "200", "--m-grid", "20",
                "--compare", "--threads", "2"});
  REQUIRE(o.code == 0);
  auto rows = read_csv(o.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][1] == doctest::Approx(0.375).epsilon(1e-2));
  CHECK(rows[1][4] < 1e-2);

  auto l = invoke({"catalog", "list"});
  CHECK(l.code == 0);
  CHECK(l.out.find("logarithmic") != std::string::npos);
  auto s = invoke({"catalog", "show", "bilinear", "--k1", "3", "--a", "0.2"});
  REQUIRE(s.code == 0);
  auto j = Json::parse(s.out);
  CHECK(j["params"]["k1"] == 3.0);
  CHECK(j["regime"] == "linear");
}

TEST_CASE("validate runs selected criteria and writes a report") {
  TempDir d;
  auto v = invoke({"validate", "--suite", "acceptance", "--criterion", "2,3", "--report", d / "report.json"});
  CHECK(v.code == 0);
  CHECK(v.out.find("[PASS] 2") != std::string::npos);
  auto rep = Json::parse(slurp(d / "report.json"));
  CHECK(rep["all_pass"] == true);
  CHECK(rep["criteria"].size() == 2);
}
