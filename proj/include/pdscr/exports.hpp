#pragma once

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "pdscr/dayahead.hpp"
#include "pdscr/grid.hpp"
#include "pdscr/intraday.hpp"

namespace pdscr {

inline std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// ---------------------------------------------------------------------------
// solution (de)serialization

inline json day_ahead_to_json(const DayAheadSolution& s) {
  json j;
  j["status"] = s.status;
  j["p_thermal_mw"] = s.p_thermal;
  j["reserve_mw"] = s.reserve;
  j["p_wind_mw"] = s.p_wind;
  j["alpha_usd_per_mwh"] = s.alpha;
  j["flows_mw"] = s.flows;
  j["theta_rad"] = s.theta;
  j["pmp"]["processed"] = s.pmp.processed;
  j["pmp"]["buffered"] = s.pmp.buffered;
  j["j1_usd"] = s.j1;
  j["j2"] = s.j2;
  j["j_pmp_usd"] = s.j_pmp;
  j["curtailment_mw"] = s.curtailment;
  return j;
}

inline DayAheadSolution day_ahead_from_json(const json& j) {
  DayAheadSolution s;
  j.at("status").get_to(s.status);
  j.at("p_thermal_mw").get_to(s.p_thermal);
  j.at("reserve_mw").get_to(s.reserve);
  j.at("p_wind_mw").get_to(s.p_wind);
  j.at("alpha_usd_per_mwh").get_to(s.alpha);
  j.at("flows_mw").get_to(s.flows);
  j.at("theta_rad").get_to(s.theta);
  j.at("pmp").at("processed").get_to(s.pmp.processed);
  j.at("pmp").at("buffered").get_to(s.pmp.buffered);
  s.j1 = j.at("j1_usd").get<double>();
  s.j2 = j.at("j2").get<double>();
  s.j_pmp = j.at("j_pmp_usd").get<double>();
  s.curtailment = j.at("curtailment_mw").get<double>();
  return s;
}

// ---------------------------------------------------------------------------
// CSV emission (fixed column order, versioned headers)

inline std::string front_csv(const ParetoFront& front) {
  std::string out = "# pdscr-front-v1\nj1_usd,j2,curtailment_mw\n";
  for (const auto& fp : front.points)
    out += fmt6(fp.j1) + "," + fmt6(fp.j2) + "," + fmt6(fp.curtailment) +
           "\n";
  return out;
}

inline std::string schedule_csv(const GridCase& gc, const PmpSchedule& s) {
  std::string out = "# pdscr-pmp-schedule-v1\nslot";
  for (int i = 0; i < gc.pmp.R(); ++i)
    out += ",procedure" + std::to_string(i + 1);
  for (int i = 0; i < gc.pmp.R() - 1; ++i)
    out += ",buffer" + std::to_string(i + 1);
  out += "\n";
  for (int t = 0; t < gc.T(); ++t) {
    out += std::to_string(t);
    for (int i = 0; i < gc.pmp.R(); ++i)
      out += "," + fmt6(s.processed[t][i]);
    for (int i = 0; i < gc.pmp.R() - 1; ++i)
      out += "," + fmt6(s.buffered[t][i]);
    out += "\n";
  }
  return out;
}

inline std::string flows_csv(const GridCase& gc,
                             const std::vector<std::vector<double>>& flows) {
  std::string out = "# pdscr-flows-v1\nslot";
  for (const auto& br : gc.branches) out += "," + br.id;
  out += "\n";
  for (int t = 0; t < gc.T(); ++t) {
    out += std::to_string(t);
    for (int j = 0; j < gc.num_branches(); ++j) out += "," + fmt6(flows[t][j]);
    out += "\n";
  }
  return out;
}

inline std::string ledger_csv(const GridCase& gc, const ProfitLedger& led) {
  auto plants = gc.plant_ids();
  std::string out = "# pdscr-ledger-v1\nslot,psi_usd";
  for (int id : plants) out += ",u_plant" + std::to_string(id) + "_usd";
  out += ",v_ipe_usd,p_outres_mw,c_outres_usd,delta_wind_mw,criterion\n";
  for (std::size_t t = 0; t < led.rows.size(); ++t) {
    const auto& r = led.rows[t];
    out += std::to_string(t) + "," + fmt6(r.psi);
    for (std::size_t k = 0; k < plants.size(); ++k)
      out += "," + fmt6(k < r.plant_profit.size() ? r.plant_profit[k] : 0.0);
    out += "," + fmt6(r.ipe_profit) + "," + fmt6(r.p_outres) + "," +
           fmt6(r.c_outres) + "," + fmt6(r.delta_wind) + "," +
           to_string(r.mode) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// minimal SVG scatter of a front

inline std::string front_svg(const std::vector<std::pair<double, double>>&
                                 pts,
                             const std::string& xlabel,
                             const std::string& ylabel) {
  const int W = 480, H = 360, M = 48;
  double lo1 = 1e300, hi1 = -1e300, lo2 = 1e300, hi2 = -1e300;
  for (auto [a, b] : pts) {
    lo1 = std::min(lo1, a);
    hi1 = std::max(hi1, a);
    lo2 = std::min(lo2, b);
    hi2 = std::max(hi2, b);
  }
  if (pts.empty()) lo1 = lo2 = 0, hi1 = hi2 = 1;
  if (hi1 - lo1 < 1e-12) hi1 = lo1 + 1;
  if (hi2 - lo2 < 1e-12) hi2 = lo2 + 1;
  auto X = [&](double v) {
    return M + (W - 2 * M) * (v - lo1) / (hi1 - lo1);
  };
  auto Y = [&](double v) {
    return H - M - (H - 2 * M) * (v - lo2) / (hi2 - lo2);
  };
  std::string svg =
      "<svg xmlns='http://www.w3.org/2000/svg' width='" + std::to_string(W) +
      "' height='" + std::to_string(H) + "'>\n";
  svg += "<rect width='100%' height='100%' fill='white'/>\n";
  svg += "<line x1='" + fmt6(M) + "' y1='" + fmt6(H - M) + "' x2='" +
         fmt6(W - M) + "' y2='" + fmt6(H - M) + "' stroke='black'/>\n";
  svg += "<line x1='" + fmt6(M) + "' y1='" + fmt6(M) + "' x2='" + fmt6(M) +
         "' y2='" + fmt6(H - M) + "' stroke='black'/>\n";
  std::string poly;
  for (auto [a, b] : pts) poly += fmt6(X(a)) + "," + fmt6(Y(b)) + " ";
  if (pts.size() > 1)
    svg += "<polyline points='" + poly +
           "' fill='none' stroke='#2b6cb0' stroke-width='1.5'/>\n";
  for (auto [a, b] : pts)
    svg += "<circle cx='" + fmt6(X(a)) + "' cy='" + fmt6(Y(b)) +
           "' r='4' fill='#2b6cb0'/>\n";
  svg += "<text x='" + fmt6(W / 2.0) + "' y='" + fmt6(H - 12.0) +
         "' text-anchor='middle' font-size='12'>" + xlabel + "</text>\n";
  svg += "<text x='14' y='" + fmt6(H / 2.0) +
         "' text-anchor='middle' font-size='12' transform='rotate(-90 14 " +
         fmt6(H / 2.0) + ")'>" + ylabel + "</text>\n";
  svg += "</svg>\n";
  return svg;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace pdscr
