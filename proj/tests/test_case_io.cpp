#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "pdscr/case_io.hpp"
#include "pdscr/pipeline.hpp"

using namespace pdscr;

namespace {
bool has_code(const CaseParse& p, const std::string& code) {
  for (const auto& d : p.diagnostics)
    if (d.code == code) return true;
  return false;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), {});
}
}  // namespace

TEST_CASE("bundled six-bus case parses clean") {
  auto parsed = validate_case(std::string(PDSCR_CASE_DIR) + "/sixbus.json");
  for (const auto& d : parsed.diagnostics)
    UNSCOPED_INFO(d.code << " " << d.path << " " << d.message);
  REQUIRE(parsed.ok());
  CHECK(parsed.grid->num_buses() == 6);
  CHECK(parsed.grid->num_units() == 3);
  CHECK(parsed.grid->T() == 8);
  // $/kWh fields arrive converted to $/MWh
  CHECK_THAT(parsed.grid->price_high,
             Catch::Matchers::WithinAbs(167.90, 1e-9));
}

TEST_CASE("round trip of the parsed case is equivalent") {
  auto gc = make_sixbus();
  auto j = write_case_json(gc);
  auto back = parse_case_json(j);
  REQUIRE(back.ok());
  CHECK(write_case_json(*back.grid) == j);
}

TEST_CASE("dangling bus reference is E-NET-01") {
  auto j = write_case_json(make_sixbus());
  j["network"]["branches"][0]["to_bus"] = 99;
  auto parsed = parse_case_json(j);
  CHECK_FALSE(parsed.grid.has_value());
  CHECK(has_code(parsed, "E-NET-01"));
}

TEST_CASE("non-positive tariff tier is E-DR-02") {
  auto j = write_case_json(make_sixbus());
  j["dr_programs"]["price_low_usd_per_kwh"] = 0.0;
  auto parsed = parse_case_json(j);
  CHECK(has_code(parsed, "E-DR-02"));
}

TEST_CASE("horizon mismatch is E-HZN-01") {
  auto j = write_case_json(make_sixbus());
  j["wind"][0]["forecast_mw"] = {1.0, 2.0};
  auto parsed = parse_case_json(j);
  CHECK(has_code(parsed, "E-HZN-01"));
}

TEST_CASE("unknown fields are E-SCHEMA-02") {
  auto j = write_case_json(make_sixbus());
  j["units"][0]["voltage_kv"] = 220;
  auto parsed = parse_case_json(j);
  CHECK(has_code(parsed, "E-SCHEMA-02"));
}

TEST_CASE("disconnected network is E-NET-02") {
  auto j = write_case_json(make_sixbus());
  auto branches = j["network"]["branches"];
  j["network"]["branches"] = json::array();
  j["network"]["branches"].push_back(branches[0]);  // only bus1-bus2 remain
  auto parsed = parse_case_json(j);
  CHECK(has_code(parsed, "E-NET-02"));
}

TEST_CASE("tiny pipeline runs end to end and is byte-deterministic") {
  // a small two-bus case keeps this test fast; full-size determinism is
  // covered by the acceptance suite
  GridCase gc;
  gc.name = "pipe-smoke";
  gc.horizon = 4;
  gc.buses = {{1, {0, 0, 0, 0}}, {2, {60, 55, 50, 58}}};
  gc.branches = {{"L", 1, 2, 20, 150}};
  ThermalUnit u{"U1", 1, 1, 0.01, 20, 40, 50, 80, 2.0, 1,
                10, 120, 120, 120, 1, 1};
  gc.units = {u};
  gc.wind = {{"W1", 2, {5, 30, 45, 10}}};
  gc.pmp.procedures = {{2, 6.0}, {2, 4.0}};
  gc.pmp.buffers = {{3, 1.0}};
  gc.pmp.target_projects = 4;
  gc.pmp.fixed_cost = 10.0;
  gc.pmp.horizon = 4;
  gc.pmp_bus = 2;
  gc.price_high = 167.90;
  gc.price_low = 82.74;
  gc.incentive_rate = 150.0;
  gc.reserve_beta = 0.05;
  gc.reserve_price = 250.0;
  gc.fuel_segments = 4;
  gc.scenario_count = 3;
  gc.seed = 11;

  namespace fs = std::filesystem;
  auto base = fs::temp_directory_path() / "pdscr_pipe_smoke";
  fs::remove_all(base);

  PipelineOptions opts;
  opts.eps_points = 2;
  opts.select = 3;
  opts.out_dir = (base / "a").string();
  auto man1 = run_pipeline(gc, opts);
  opts.out_dir = (base / "b").string();
  auto man2 = run_pipeline(gc, opts);

  auto report1 = slurp(base / "a" / "report" / "report.csv");
  auto report2 = slurp(base / "b" / "report" / "report.csv");
  CHECK(report1 == report2);
  CHECK(man1.input_hash == man2.input_hash);
  CHECK(report1.find("pdscr-report-v1") != std::string::npos);

  // resume from cached artifacts leaves the outputs untouched
  auto man3 = run_pipeline(gc, opts);
  CHECK(slurp(base / "b" / "report" / "report.csv") == report2);
  CHECK(man3.input_hash == man2.input_hash);

  // front + compromise artifacts exist
  CHECK(fs::exists(base / "a" / "dayahead" / "front.csv"));
  CHECK(fs::exists(base / "a" / "dayahead" / "front.svg"));
  CHECK(fs::exists(base / "a" / "dayahead" / "compromise.json"));
  CHECK(fs::exists(base / "a" / "scenarios" / "scenarios.json"));
  CHECK(fs::exists(base / "a" / "manifest.json"));
  fs::remove_all(base);
}
