#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gpe/config.hpp"
#include "gpe/errors.hpp"

using namespace gpe;

namespace {

const char* kMinimal1D =
    "dim = 1\n"
    "domain.a = -2\n"
    "domain.b = 2\n"
    "grid.n = 40\n"
    "beta = 1\n";

std::filesystem::path temp_dir() {
  auto d = std::filesystem::temp_directory_path() / "gpe_config_test";
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("minimal config and defaults") {
  RunConfig c = parse_config_text(kMinimal1D);
  CHECK(c.spec.dim == 1);
  CHECK(c.spec.n == 40);
  CHECK(c.spec.beta == 1.0);
  CHECK(c.spec.pot.id == "harmonic");
  CHECK(c.seed == 1);
  CHECK(!c.sigma.has_value());
  CHECK(c.kind.empty());
  CHECK(c.paths == std::vector<int>{1});
  CHECK(c.workers == 1);
  CHECK(c.trace.ds0 == 0.01);
  CHECK(c.trace.newton_tol == 1e-10);
}

TEST_CASE("full config round-trips losslessly") {
  std::string text =
      "dim = 2\n"
      "domain.a = 0\n"
      "domain.b = 1\n"
      "domain.c = 0\n"
      "domain.d = 1\n"
      "grid.m = 9\n"
      "grid.n = 8\n"
      "beta = 20\n"
      "kind = pentadiag\n"
      "sigma = 0.5\n"
      "seed = 12345\n"
      "paths = 1..5,9\n"
      "workers = 3\n"
      "out = results\n"
      "trace.ds0 = 0.02\n"
      "trace.ds_min = 1e-07\n"
      "trace.ds_max = 0.2\n"
      "trace.angle_halve_deg = 15\n"
      "trace.angle_double_deg = 5\n"
      "trace.newton_tol = 1e-11\n"
      "trace.newton_max_iter = 12\n"
      "trace.max_steps = 5000\n";
  RunConfig c = parse_config_text(text);
  CHECK(c.spec.m == 9);
  CHECK(c.spec.n == 8);
  CHECK(c.sigma.has_value());
  CHECK(*c.sigma == 0.5);
  CHECK(c.kind == "pentadiag");
  CHECK(c.paths == std::vector<int>{1, 2, 3, 4, 5, 9});
  CHECK(c.workers == 3);
  CHECK(c.trace.newton_max_iter == 12);

  std::string s1 = serialize_config(c);
  RunConfig c2 = parse_config_text(s1);
  std::string s2 = serialize_config(c2);
  CHECK(s1 == s2);
  CHECK(c2.paths == c.paths);
  CHECK(c2.trace.ds0 == c.trace.ds0);
  CHECK(c2.trace.max_steps == c.trace.max_steps);
  CHECK(c2.seed == c.seed);

  // report echo drops the worker count
  std::string echo = serialize_config(c, false);
  CHECK(echo.find("workers") == std::string::npos);
  RunConfig c3 = parse_config_text(echo);
  CHECK(c3.workers == 1);
}

TEST_CASE("comments and blank lines are ignored") {
  RunConfig c = parse_config_text(
      "# a comment\n"
      "\n"
      "dim = 1   # trailing comment\n"
      "domain.a = -1\n"
      "domain.b = 1\n"
      "grid.n = 5\n"
      "beta = 0\n");
  CHECK(c.spec.n == 5);
  CHECK(c.spec.dom.a == -1.0);
}

TEST_CASE("malformed configs are rejected") {
  CHECK_THROWS_AS(parse_config_text(std::string(kMinimal1D) + "banana = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(std::string(kMinimal1D) + "beta = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(std::string(kMinimal1D) + "domain.c = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(std::string(kMinimal1D) + "grid.m = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("dim = 1\ndomain.a = -2\ndomain.b = 2\nbeta = 1\n"),
                  ConfigError);  // grid.n missing
  CHECK_THROWS_AS(parse_config_text("dim = 2\ndomain.a = 0\ndomain.b = 1\ndomain.c = 0\n"
                                    "domain.d = 1\ngrid.n = 8\nbeta = 1\n"),
                  ConfigError);  // grid.m missing
  CHECK_THROWS_AS(parse_config_text(std::string(kMinimal1D) + "seed = twelve\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(std::string(kMinimal1D) + "trace.ds0 = 0.1extra\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("dim = 3\ndomain.a = 0\ndomain.b = 1\ngrid.n = 4\nbeta = 0\n"),
                  ConfigError);
}

TEST_CASE("path set parsing and formatting") {
  CHECK(parse_paths("2") == std::vector<int>{2});
  CHECK(parse_paths("1..9") == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(parse_paths("1..3,7") == std::vector<int>{1, 2, 3, 7});
  CHECK(parse_paths("7,1..3") == std::vector<int>{1, 2, 3, 7});
  CHECK(parse_paths("2,2,2") == std::vector<int>{2});
  CHECK_THROWS_AS(parse_paths(""), ConfigError);
  CHECK_THROWS_AS(parse_paths("3..1"), ConfigError);
  CHECK_THROWS_AS(parse_paths("0"), ConfigError);
  CHECK_THROWS_AS(parse_paths("-2"), ConfigError);
  CHECK_THROWS_AS(parse_paths("a..b"), ConfigError);

  CHECK(format_paths({1, 2, 3, 7}) == "1..3,7");
  CHECK(format_paths({2}) == "2");
  CHECK(format_paths({1, 2}) == "1,2");
  CHECK(format_paths({1, 2, 3, 4, 5, 6, 7, 8, 9}) == "1..9");
  for (const std::string& s : {"2", "1..9", "1..3,7", "1,2"})
    CHECK(format_paths(parse_paths(s)) == s);
}

TEST_CASE("run config validation") {
  RunConfig c = parse_config_text(kMinimal1D);
  CHECK_NOTHROW(validate(c));
  RunConfig bad = c;
  bad.workers = 0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.workers = 4096;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.out.clear();
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.sigma = -0.5;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.kind = "blocktridiag";  // 2D kind on a 1D problem
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.paths.clear();
  CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("tabulated potential from a file") {
  auto dir = temp_dir();
  {
    std::ofstream out(dir / "pot.txt");
    out << "1.0 2.0\n3.0 4.0 5.0\n";
  }
  std::string text = "dim = 1\ndomain.a = 0\ndomain.b = 1\ngrid.n = 5\nbeta = 0\n"
                     "potential = file:pot.txt\n";
  RunConfig c = parse_config_text(text, dir.string());
  CHECK(c.spec.pot.id == "table");
  CHECK(c.spec.pot.table == std::vector<double>{1, 2, 3, 4, 5});
  CHECK(c.spec.pot.source == "file:pot.txt");

  // wrong value count
  std::string bad = "dim = 1\ndomain.a = 0\ndomain.b = 1\ngrid.n = 4\nbeta = 0\n"
                    "potential = file:pot.txt\n";
  CHECK_THROWS_AS(parse_config_text(bad, dir.string()), ConfigError);

  // missing file
  std::string missing = "dim = 1\ndomain.a = 0\ndomain.b = 1\ngrid.n = 5\nbeta = 0\n"
                        "potential = file:nope.txt\n";
  CHECK_THROWS_AS(parse_config_text(missing, dir.string()), ConfigError);

  // a supplied table overrides the file (reports carry it inline)
  std::vector<double> inline_table = {9, 8, 7, 6, 5};
  RunConfig c2 = parse_config_text(missing, dir.string(), &inline_table);
  CHECK(c2.spec.pot.table == inline_table);

  CHECK_THROWS_AS(parse_config_text(std::string(kMinimal1D) + "potential = cubic\n"),
                  ConfigError);

  std::filesystem::remove_all(dir);
}

TEST_CASE("load_config resolves file references relative to the config") {
  auto dir = temp_dir();
  {
    std::ofstream pot(dir / "pot2.txt");
    pot << "0.5 0.5 0.5\n";
    std::ofstream cfg(dir / "run.cfg");
    cfg << "dim = 1\ndomain.a = 0\ndomain.b = 1\ngrid.n = 3\nbeta = 0\n"
           "potential = file:pot2.txt\n";
  }
  RunConfig c = load_config((dir / "run.cfg").string());
  CHECK(c.spec.pot.table == std::vector<double>{0.5, 0.5, 0.5});
  CHECK_THROWS_AS(load_config((dir / "absent.cfg").string()), ConfigError);
  std::filesystem::remove_all(dir);
}
