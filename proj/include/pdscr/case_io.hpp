#pragma once

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pdscr/grid.hpp"

namespace pdscr {

using json = nlohmann::ordered_json;

struct Diagnostic {
  std::string code;
  std::string path;
  std::string message;
};

struct CaseParse {
  std::optional<GridCase> grid;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return grid.has_value() && diagnostics.empty(); }
};

namespace case_detail {

inline void expect_keys(const json& obj, const std::string& path,
                        const std::set<std::string>& known,
                        std::vector<Diagnostic>& diags) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key()))
      diags.push_back({"E-SCHEMA-02", path + "." + it.key(),
                       "unknown field"});
}

template <typename T>
bool fetch(const json& obj, const std::string& path, const char* key, T& out,
           std::vector<Diagnostic>& diags) {
  if (!obj.contains(key)) {
    diags.push_back({"E-SCHEMA-01", path + "." + key, "missing field"});
    return false;
  }
  try {
    out = obj.at(key).get<T>();
  } catch (const std::exception&) {
    diags.push_back({"E-SCHEMA-01", path + "." + key, "wrong type"});
    return false;
  }
  return true;
}

}  // namespace case_detail

// Parses and validates a case file. Prices arrive in $/kWh and leave in
// $/MWh; every cross reference and profile length is checked before any
// solver sees the data.
inline CaseParse parse_case_json(const json& j) {
  using namespace case_detail;
  CaseParse out;
  auto& diags = out.diagnostics;
  GridCase gc;

  expect_keys(j, "$",
              {"schema", "name", "horizon_slots", "network", "units", "wind",
               "pmp", "dr_programs", "solver", "scenarios"},
              diags);
  std::string schema;
  if (fetch(j, "$", "schema", schema, diags) && schema != "pdscr-case-v1")
    diags.push_back({"E-SCHEMA-01", "$.schema", "unsupported schema"});
  fetch(j, "$", "name", gc.name, diags);
  fetch(j, "$", "horizon_slots", gc.horizon, diags);
  if (gc.horizon < 2)
    diags.push_back({"E-HZN-01", "$.horizon_slots", "horizon too short"});

  if (j.contains("network")) {
    const auto& net = j.at("network");
    expect_keys(net, "$.network", {"buses", "branches"}, diags);
    int bi = 0;
    for (const auto& b : net.value("buses", json::array())) {
      std::string path = "$.network.buses[" + std::to_string(bi++) + "]";
      expect_keys(b, path, {"id", "load_mw"}, diags);
      Bus bus;
      fetch(b, path, "id", bus.id, diags);
      fetch(b, path, "load_mw", bus.load, diags);
      if (static_cast<int>(bus.load.size()) != gc.horizon)
        diags.push_back({"E-HZN-01", path + ".load_mw",
                         "profile length differs from the horizon"});
      gc.buses.push_back(std::move(bus));
    }
    int li = 0;
    for (const auto& b : net.value("branches", json::array())) {
      std::string path = "$.network.branches[" + std::to_string(li++) + "]";
      expect_keys(b, path,
                  {"id", "from_bus", "to_bus", "susceptance_mw_per_rad",
                   "rating_mw"},
                  diags);
      Branch br;
      fetch(b, path, "id", br.id, diags);
      fetch(b, path, "from_bus", br.from, diags);
      fetch(b, path, "to_bus", br.to, diags);
      fetch(b, path, "susceptance_mw_per_rad", br.susceptance, diags);
      fetch(b, path, "rating_mw", br.rating, diags);
      if (br.rating <= 0)
        diags.push_back({"E-NET-03", path + ".rating_mw",
                         "branch rating must be positive"});
      gc.branches.push_back(std::move(br));
    }
  } else {
    diags.push_back({"E-SCHEMA-01", "$.network", "missing field"});
  }

  auto bus_exists = [&](int id) {
    for (const auto& b : gc.buses)
      if (b.id == id) return true;
    return false;
  };
  for (std::size_t i = 0; i < gc.branches.size(); ++i) {
    if (!bus_exists(gc.branches[i].from))
      diags.push_back({"E-NET-01",
                       "$.network.branches[" + std::to_string(i) + "].from_bus",
                       "references a missing bus"});
    if (!bus_exists(gc.branches[i].to))
      diags.push_back({"E-NET-01",
                       "$.network.branches[" + std::to_string(i) + "].to_bus",
                       "references a missing bus"});
  }

  int ui = 0;
  for (const auto& u : j.value("units", json::array())) {
    std::string path = "$.units[" + std::to_string(ui++) + "]";
    expect_keys(u, path,
                {"id", "bus", "plant", "fuel_a_usd_per_mw2",
                 "fuel_b_usd_per_mw", "fuel_c_usd", "start_alpha_usd",
                 "start_beta_usd", "start_tau_h", "initial_off_h", "p_min_mw",
                 "p_max_mw", "ramp_up_mw_per_h", "ramp_down_mw_per_h",
                 "min_up_h", "min_down_h"},
                diags);
    ThermalUnit tu;
    fetch(u, path, "id", tu.id, diags);
    fetch(u, path, "bus", tu.bus, diags);
    fetch(u, path, "plant", tu.plant, diags);
    fetch(u, path, "fuel_a_usd_per_mw2", tu.fuel_a, diags);
    fetch(u, path, "fuel_b_usd_per_mw", tu.fuel_b, diags);
    fetch(u, path, "fuel_c_usd", tu.fuel_c, diags);
    fetch(u, path, "start_alpha_usd", tu.start_alpha, diags);
    fetch(u, path, "start_beta_usd", tu.start_beta, diags);
    fetch(u, path, "start_tau_h", tu.start_tau, diags);
    if (u.contains("initial_off_h"))
      fetch(u, path, "initial_off_h", tu.init_off_h, diags);
    fetch(u, path, "p_min_mw", tu.p_min, diags);
    fetch(u, path, "p_max_mw", tu.p_max, diags);
    fetch(u, path, "ramp_up_mw_per_h", tu.ramp_up, diags);
    fetch(u, path, "ramp_down_mw_per_h", tu.ramp_down, diags);
    fetch(u, path, "min_up_h", tu.min_up, diags);
    fetch(u, path, "min_down_h", tu.min_down, diags);
    if (!(0 <= tu.p_min && tu.p_min <= tu.p_max))
      diags.push_back({"E-UNIT-01", path, "power window invalid"});
    if (tu.fuel_a < 0)
      diags.push_back({"E-UNIT-01", path + ".fuel_a_usd_per_mw2",
                       "non-convex fuel curve"});
    if (!bus_exists(tu.bus))
      diags.push_back({"E-NET-01", path + ".bus", "references a missing bus"});
    gc.units.push_back(std::move(tu));
  }
  if (gc.units.empty())
    diags.push_back({"E-UNIT-02", "$.units", "no thermal units"});

  int wi = 0;
  for (const auto& w : j.value("wind", json::array())) {
    std::string path = "$.wind[" + std::to_string(wi++) + "]";
    expect_keys(w, path, {"id", "bus", "forecast_mw"}, diags);
    WindFarm f;
    fetch(w, path, "id", f.id, diags);
    fetch(w, path, "bus", f.bus, diags);
    fetch(w, path, "forecast_mw", f.forecast, diags);
    if (static_cast<int>(f.forecast.size()) != gc.horizon)
      diags.push_back({"E-HZN-01", path + ".forecast_mw",
                       "profile length differs from the horizon"});
    for (double x : f.forecast)
      if (x < 0)
        diags.push_back(
            {"E-WIND-01", path + ".forecast_mw", "negative forecast"});
    if (!bus_exists(f.bus))
      diags.push_back({"E-NET-01", path + ".bus", "references a missing bus"});
    gc.wind.push_back(std::move(f));
  }

  if (j.contains("pmp")) {
    const auto& pm = j.at("pmp");
    std::string path = "$.pmp";
    expect_keys(pm, path,
                {"bus", "procedures", "buffers", "target_projects",
                 "fixed_cost_usd"},
                diags);
    fetch(pm, path, "bus", gc.pmp_bus, diags);
    if (!bus_exists(gc.pmp_bus))
      diags.push_back({"E-NET-01", path + ".bus", "references a missing bus"});
    int pi = 0;
    for (const auto& s : pm.value("procedures", json::array())) {
      std::string sp = path + ".procedures[" + std::to_string(pi++) + "]";
      expect_keys(s, sp, {"max_projects", "power_mw_per_project"}, diags);
      PmpSystem::Stage st;
      fetch(s, sp, "max_projects", st.max_projects, diags);
      fetch(s, sp, "power_mw_per_project", st.power_per_project, diags);
      gc.pmp.procedures.push_back(st);
    }
    pi = 0;
    for (const auto& s : pm.value("buffers", json::array())) {
      std::string sp = path + ".buffers[" + std::to_string(pi++) + "]";
      expect_keys(s, sp, {"max_projects", "power_mw_per_project"}, diags);
      PmpSystem::Stage st;
      fetch(s, sp, "max_projects", st.max_projects, diags);
      fetch(s, sp, "power_mw_per_project", st.power_per_project, diags);
      gc.pmp.buffers.push_back(st);
    }
    fetch(pm, path, "target_projects", gc.pmp.target_projects, diags);
    fetch(pm, path, "fixed_cost_usd", gc.pmp.fixed_cost, diags);
    gc.pmp.horizon = gc.horizon;
    try {
      gc.pmp.validate();
    } catch (const std::exception& e) {
      diags.push_back({"E-PMP-01", path, e.what()});
    }
  } else {
    diags.push_back({"E-SCHEMA-01", "$.pmp", "missing field"});
  }

  if (j.contains("dr_programs")) {
    const auto& dr = j.at("dr_programs");
    std::string path = "$.dr_programs";
    expect_keys(dr, path,
                {"price_high_usd_per_kwh", "price_low_usd_per_kwh",
                 "incentive_usd_per_kwh", "reserve_price_usd_per_mwh",
                 "reserve_beta"},
                diags);
    double hi = 0, lo = 0, inc = 0;
    fetch(dr, path, "price_high_usd_per_kwh", hi, diags);
    fetch(dr, path, "price_low_usd_per_kwh", lo, diags);
    fetch(dr, path, "incentive_usd_per_kwh", inc, diags);
    fetch(dr, path, "reserve_price_usd_per_mwh", gc.reserve_price, diags);
    fetch(dr, path, "reserve_beta", gc.reserve_beta, diags);
    gc.price_high = hi * 1000.0;  // $/kWh -> $/MWh
    gc.price_low = lo * 1000.0;
    gc.incentive_rate = inc * 1000.0;
    if (hi <= 0 || lo <= 0)
      diags.push_back({"E-DR-02", path, "tariff tiers must be positive"});
    if (gc.reserve_beta < 0 || gc.reserve_beta > 1)
      diags.push_back({"E-RES-01", path + ".reserve_beta",
                       "error coefficient outside [0,1]"});
  } else {
    diags.push_back({"E-SCHEMA-01", "$.dr_programs", "missing field"});
  }

  if (j.contains("solver")) {
    const auto& sv = j.at("solver");
    std::string path = "$.solver";
    expect_keys(sv, path,
                {"fuel_segments", "eps_points", "intraday_eps_points",
                 "sales_revenue_includes_fixed"},
                diags);
    if (sv.contains("fuel_segments"))
      fetch(sv, path, "fuel_segments", gc.fuel_segments, diags);
    if (sv.contains("eps_points"))
      fetch(sv, path, "eps_points", gc.eps_points, diags);
    if (sv.contains("intraday_eps_points"))
      fetch(sv, path, "intraday_eps_points", gc.intraday_eps_points, diags);
    if (sv.contains("sales_revenue_includes_fixed"))
      fetch(sv, path, "sales_revenue_includes_fixed",
            gc.sales_revenue_includes_fixed, diags);
  }
  if (j.contains("scenarios")) {
    const auto& sc = j.at("scenarios");
    std::string path = "$.scenarios";
    expect_keys(sc, path, {"count", "sigma_fraction", "seed"}, diags);
    fetch(sc, path, "count", gc.scenario_count, diags);
    fetch(sc, path, "sigma_fraction", gc.sigma_fraction, diags);
    fetch(sc, path, "seed", gc.seed, diags);
  }

  // structural closure: connectedness via the network factorization
  if (diags.empty()) {
    try {
      std::vector<std::vector<double>> zero(
          gc.T(), std::vector<double>(gc.num_buses(), 0.0));
      dc_flow(gc, zero);
    } catch (const std::exception& e) {
      diags.push_back({"E-NET-02", "$.network", e.what()});
    }
  }

  if (diags.empty()) out.grid = std::move(gc);
  return out;
}

inline CaseParse validate_case(const std::string& path) {
  std::ifstream in(path);
  CaseParse out;
  if (!in) {
    out.diagnostics.push_back({"E-IO-01", path, "cannot open case file"});
    return out;
  }
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    out.diagnostics.push_back({"E-IO-02", path, e.what()});
    return out;
  }
  return parse_case_json(j);
}

// Canonical emission; parse(write(gc)) must reproduce an equivalent case.
inline json write_case_json(const GridCase& gc) {
  json j;
  j["schema"] = "pdscr-case-v1";
  j["name"] = gc.name;
  j["horizon_slots"] = gc.horizon;
  j["network"]["buses"] = json::array();
  for (const auto& b : gc.buses)
    j["network"]["buses"].push_back({{"id", b.id}, {"load_mw", b.load}});
  j["network"]["branches"] = json::array();
  for (const auto& b : gc.branches)
    j["network"]["branches"].push_back(
        {{"id", b.id},
         {"from_bus", b.from},
         {"to_bus", b.to},
         {"susceptance_mw_per_rad", b.susceptance},
         {"rating_mw", b.rating}});
  j["units"] = json::array();
  for (const auto& u : gc.units)
    j["units"].push_back({{"id", u.id},
                          {"bus", u.bus},
                          {"plant", u.plant},
                          {"fuel_a_usd_per_mw2", u.fuel_a},
                          {"fuel_b_usd_per_mw", u.fuel_b},
                          {"fuel_c_usd", u.fuel_c},
                          {"start_alpha_usd", u.start_alpha},
                          {"start_beta_usd", u.start_beta},
                          {"start_tau_h", u.start_tau},
                          {"initial_off_h", u.init_off_h},
                          {"p_min_mw", u.p_min},
                          {"p_max_mw", u.p_max},
                          {"ramp_up_mw_per_h", u.ramp_up},
                          {"ramp_down_mw_per_h", u.ramp_down},
                          {"min_up_h", u.min_up},
                          {"min_down_h", u.min_down}});
  j["wind"] = json::array();
  for (const auto& w : gc.wind)
    j["wind"].push_back(
        {{"id", w.id}, {"bus", w.bus}, {"forecast_mw", w.forecast}});
  j["pmp"]["bus"] = gc.pmp_bus;
  j["pmp"]["procedures"] = json::array();
  for (const auto& s : gc.pmp.procedures)
    j["pmp"]["procedures"].push_back(
        {{"max_projects", s.max_projects},
         {"power_mw_per_project", s.power_per_project}});
  j["pmp"]["buffers"] = json::array();
  for (const auto& s : gc.pmp.buffers)
    j["pmp"]["buffers"].push_back(
        {{"max_projects", s.max_projects},
         {"power_mw_per_project", s.power_per_project}});
  j["pmp"]["target_projects"] = gc.pmp.target_projects;
  j["pmp"]["fixed_cost_usd"] = gc.pmp.fixed_cost;
  j["dr_programs"] = {{"price_high_usd_per_kwh", gc.price_high / 1000.0},
                      {"price_low_usd_per_kwh", gc.price_low / 1000.0},
                      {"incentive_usd_per_kwh", gc.incentive_rate / 1000.0},
                      {"reserve_price_usd_per_mwh", gc.reserve_price},
                      {"reserve_beta", gc.reserve_beta}};
  j["solver"] = {{"fuel_segments", gc.fuel_segments},
                 {"eps_points", gc.eps_points},
                 {"intraday_eps_points", gc.intraday_eps_points},
                 {"sales_revenue_includes_fixed",
                  gc.sales_revenue_includes_fixed}};
  j["scenarios"] = {{"count", gc.scenario_count},
                    {"sigma_fraction", gc.sigma_fraction},
                    {"seed", gc.seed}};
  return j;
}

}  // namespace pdscr
