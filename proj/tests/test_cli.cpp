#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "capsym/config.hpp"
#include "capsym/experiments.hpp"
#include "capsym/io.hpp"

using namespace capsym;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("capsym_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(
      "experiment = bossel-daners\n"
      "lambda = -0.25  # comment\n"
      "spacing = 1/32\n"
      "[obstacle]\nkind = ball\nradius = 0.5\n"
      "[outer]\nkind = box\nlo = -1, 0.6\nhi = 1, 1.3\n"
      "[tolerance]\nc_grid = 2\n");
  CHECK(c.experiment == "bossel_daners");
  CHECK(c.lambda == -0.25);
  CHECK(c.spacing == 1.0 / 32);
  CHECK(c.obstacle.kind == "ball");
  CHECK(c.outer.hi == Vec{1.0, 1.3});
  CHECK(*c.c_grid == 2.0);
}

TEST_CASE("config errors name the offending line") {
  try {
    parse_config("experiment = talenti\ngamma = 3\n");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("gamma") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("experiment = talenti\nlambda = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment = nonsense\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment = moser\nouter = box\n[outer]\nlo = -1,0\nhi = 1,1\n"), ConfigError);
}

TEST_CASE("CSV round trip is bit exact") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  CsvTable t{{"s", "value"}, {}};
  for (int i = 0; i < 200; ++i) t.rows.push_back({std::ldexp(nd(rng), i % 40 - 20), nd(rng) * 1e-300});
  t.rows.push_back({std::numeric_limits<double>::denorm_min(), -0.0});
  const fs::path dir = scratch("csv");
  write_csv((dir / "t.csv").string(), t);
  const CsvTable r = read_csv((dir / "t.csv").string());
  CHECK(r.header == t.header);
  REQUIRE(r.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::memcmp(&r.rows[i][j], &t.rows[i][j], sizeof(double)) == 0);
  CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n"), InvalidInput);
  CHECK_THROWS_AS(parse_csv(""), InvalidInput);
}

TEST_CASE("JSON lines append and read back") {
  const fs::path dir = scratch("jsonl");
  VerificationReport a = make_inequality("polya_szego", 2.0, 1.5, 0.01);
  VerificationReport b = make_identity("co_area", 1.0, 1.0 + 1e-3, 1e-2);
  append_jsonl((dir / "r.jsonl").string(), {a});
  append_jsonl((dir / "r.jsonl").string(), {b});
  const auto back = read_jsonl((dir / "r.jsonl").string());
  REQUIRE(back.size() == 2);
  CHECK(back[0].to_line() == a.to_line());
  CHECK(back[1].to_line() == b.to_line());
  CHECK(back[1].identity());
}

TEST_CASE("SVG has the fixed viewport") {
  SvgPlot p;
  p.title = "margin <h>";
  p.series.push_back({"lhs", {1, 2, 3}, {3, 1, 2}, true});
  const std::string s = render_svg(p);
  CHECK(s.find("width=\"800\" height=\"600\"") != std::string::npos);
  CHECK(s.find("margin &lt;h&gt;") != std::string::npos);
  CHECK(s.find("<polyline") != std::string::npos);
}

TEST_CASE("random fields are reproducible and admissible") {
  const MaskedGrid g = build_cap_grid(0.0, 2, 1.0, 1.0 / 32);
  const Field a = random_admissible_field(g, 42), b = random_admissible_field(g, 42), c = random_admissible_field(g, 43);
  CHECK(a == b);
  CHECK(a != c);
  for (int k : g.domain) {
    CHECK(a[k] >= 0.0);
    if (g.cls[k] == CellClass::Dirichlet) CHECK(a[k] == 0.0);
  }
}

TEST_CASE("experiment runs and exit codes") {
  const fs::path dir = scratch("run");
  ExperimentConfig t = parse_config("experiment = talenti\nspacing = 1/32\nlambda = 0.3\n");
  const RunResult rt = run_experiment(t, {dir.string(), true, std::nullopt, 1});
  CHECK(rt.exit_code == 0);
  REQUIRE(rt.reports.size() == 1);
  CHECK(std::abs(rt.reports[0].margin) < rt.reports[0].tolerance);
  CHECK(fs::exists(dir / "report.jsonl"));

  ExperimentConfig m = parse_config("experiment = moser\nspacing = 1/32\n[moser]\nk = 4, 16\n");
  const RunResult rm = run_experiment(m, {dir.string(), false, std::nullopt, 1});
  CHECK(rm.exit_code == 2);
  REQUIRE(!rm.errors.empty());
  CHECK(rm.errors[0].find("needs spacing") != std::string::npos);

  ExperimentConfig bd = parse_config(
      "experiment = bossel_daners\nspacing = 1/32\n[obstacle]\nkind = ball\n[outer]\nkind = box\nlo = -1.2, 0.6\nhi = "
      "1.2, 1.3\n");
  const RunResult rb = run_experiment(bd, {dir.string(), false, std::nullopt, 1});
  CHECK(rb.exit_code == 0);
  REQUIRE(rb.reports.size() == 1);
  CHECK(rb.reports[0].margin > 0.0);
}

TEST_CASE("reruns with the same seed give identical report lines") {
  ExperimentConfig c = parse_config("experiment = polya_szego\nspacing = 1/16\nsamples = 2\nseed = 9\n");
  const fs::path d1 = scratch("seed1"), d2 = scratch("seed2");
  const RunResult a = run_batch({c, c}, {d1.string(), false, std::nullopt, 2});
  const RunResult b = run_batch({c, c}, {d2.string(), false, std::nullopt, 1});
  REQUIRE(a.reports.size() == b.reports.size());
  for (std::size_t i = 0; i < a.reports.size(); ++i) CHECK(a.reports[i].to_line() == b.reports[i].to_line());
  std::ifstream f1(d1 / "report.jsonl"), f2(d2 / "report.jsonl");
  std::string s1((std::istreambuf_iterator<char>(f1)), {}), s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);
}
