#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "specpart/errors.hpp"
#include "specpart/io.hpp"
#include "specpart/scenario.hpp"

using namespace specpart;
using json = nlohmann::json;

namespace {

json interval(int n, int k = 2) {
  return {{"mode", "solve"},
          {"domain",
           {{"region", {{"type", "rect"}, {"lo", {0}}, {"hi", {"pi"}}}},
            {"window", {{"lo", {0}}, {"hi", {"pi"}}}},
            {"h", "pi/" + std::to_string(n)}}},
          {"k", k},
          {"p", 1},
          {"eigs", 2},
          {"seed", {{"value", 7}, {"starts", 2}}}};
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS(parse_config(json::array()), ValidationError);
  CHECK_THROWS_AS(parse_config({{"mode", "dance"}}), ValidationError);
  CHECK_THROWS_AS(parse_config({{"mode", "solve"}}), ValidationError);
  auto c = interval(16);
  c["k"] = 0;
  CHECK_THROWS_AS(parse_config(c), ValidationError);
  c = interval(16);
  c["p"] = 0.5;
  CHECK_THROWS_AS(parse_config(c), ValidationError);
  c = interval(16);
  c["domain"]["h"] = 0.3;
  CHECK_THROWS_AS(parse_config(c), ValidationError);
  c = interval(16);
  c["seed"] = -3;
  CHECK_THROWS_AS(parse_config(c), ValidationError);
  CHECK_THROWS_AS(parse_config({{"mode", "example"}, {"example", "teapot"}}), ValidationError);

  c = interval(16);
  c["p"] = "inf";
  c["seed"] = "18446744073709551615";
  const auto cfg = parse_config(c);
  CHECK(std::isinf(cfg.p));
  CHECK(cfg.opt.seed == 18446744073709551615ull);
  CHECK(cfg.domain->grid.dim() == 1);
}

TEST_CASE("solve on the interval writes a self-contained report") {
  const auto dir = std::filesystem::temp_directory_path() / "specpart_scenario_test";
  std::filesystem::remove_all(dir);
  const auto rep = run(parse_config(interval(64)), dir);
  CHECK(rep["summary"]["lambda_1"].get<double>() == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(rep["summary"]["energy"].get<double>() == doctest::Approx(8.0).epsilon(1e-2));
  CHECK(rep["input_hash"] == io::content_hash(interval(64).dump()));
  CHECK(rep["config"] == interval(64));
  for (const char* f : {"report.json", "eigen.csv", "cell_1.spfd", "cell_2.spfd"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  CHECK_FALSE(std::filesystem::exists(dir / "cells.pgm"));  // 1-D windows have no image

  std::ifstream is(dir / "report.json");
  CHECK(json::parse(is) == rep);
  std::filesystem::remove_all(dir);
}

TEST_CASE("identical config and seed give identical reports") {
  const auto a = run(parse_config(interval(48, 3)));
  const auto b = run(parse_config(interval(48, 3)));
  CHECK(a.dump() == b.dump());
}

TEST_CASE("sweep records failing rows and keeps going") {
  const std::vector<double> ks{1, 0, 2};
  const auto rep = run_sweep(interval(32), "k", ks);
  REQUIRE(rep["rows"].size() == 3);
  CHECK(rep["rows"][0]["status"] == "ok");
  CHECK(rep["rows"][1]["status"] == "ValidationError");
  CHECK(rep["rows"][2]["status"] == "ok");
  CHECK(rep["rows"][2]["monotone_ok"] == true);
  const auto csv = sweep_csv(rep);
  CHECK(csv.rfind("value,status,energy,max_lambda,gap,sigma,threshold,lambda_1,monotone_ok,ratio\n", 0) == 0);
  CHECK(csv.find("\n0,ValidationError,,,,,,,,\n") != std::string::npos);

  CHECK_THROWS_AS(run_sweep(interval(32), "q", ks), ValidationError);
  CHECK_THROWS_AS(run_sweep(interval(32), "R", ks), ValidationError);
}

TEST_CASE("h sweep reports the Richardson ratio") {
  auto c = interval(16, 1);
  c["eigs"] = 1;
  const std::vector<double> hs{M_PI / 16, M_PI / 32, M_PI / 64};
  const auto rep = run_sweep(c, "h", hs);
  CHECK(rep["rows"][2]["ratio"].get<double>() == doctest::Approx(4.0).epsilon(2e-2));
}

TEST_CASE("error reports and exit status") {
  const ValidationError v("bad");
  CHECK(exit_status(v) == 2);
  CHECK(error_json(v)["error"] == "ValidationError");
  const NoConvergence n(10, 0.5);
  CHECK(exit_status(n) == 3);
  CHECK(error_json(n)["exit_status"] == 3);
  const CellCollapse cc(1);
  CHECK(exit_status(cc) == 3);
  CHECK(exit_status(std::runtime_error("x")) == 3);
}
