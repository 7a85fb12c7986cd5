#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <string>
#include <vector>

#include "pdscr/case_io.hpp"
#include "pdscr/dayahead.hpp"
#include "pdscr/exports.hpp"
#include "pdscr/intraday.hpp"
#include "pdscr/metrics.hpp"
#include "pdscr/replay.hpp"
#include "pdscr/scenarios.hpp"

namespace pdscr {

inline constexpr const char* kToolVersion = "pdscr 0.1.0";

inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct PipelineOptions {
  std::string out_dir;
  std::string stages = "all";  // dayahead | scenarios | intraday | report
  int eps_points = -1;         // <0: use the case configuration
  int scenario_count = -1;
  int select = -1;             // scenarios carried into the intraday stage
  long long seed = -1;
  bool dump_lp = false;
  std::function<void(const std::string&)> log;
};

struct RunManifest {
  std::string run_id;
  std::string input_hash;
  json artifacts = json::object();
  json wall_clock_s = json::object();

  json to_json() const {
    json j;
    j["run_id"] = run_id;
    j["tool_version"] = kToolVersion;
    j["input_hash"] = input_hash;
    j["artifacts"] = artifacts;
    j["wall_clock_s"] = wall_clock_s;
    return j;
  }
};

namespace pipe_detail {

namespace fs = std::filesystem;

inline bool stage_fresh(const fs::path& meta_path, const json& expect) {
  std::ifstream in(meta_path);
  if (!in) return false;
  try {
    json have;
    in >> have;
    return have == expect;
  } catch (...) {
    return false;
  }
}

inline void write_json(const fs::path& p, const json& j) {
  write_file(p.string(), j.dump(2) + "\n");
}

}  // namespace pipe_detail

// Fig. 13/14-style per-slot profit wheel: one ring per slot, arc lengths
// proportional to the participant shares.
inline std::string ledger_rings_svg(const GridCase& gc,
                                    const ProfitLedger& led) {
  auto plants = gc.plant_ids();
  const int T = static_cast<int>(led.rows.size());
  const int cell = 84, R0 = 14, R1 = 32;
  const int cols = std::max(1, (T + 1) / 2);
  const int W = cols * cell + 20, H = 2 * cell + 30;
  static const char* palette[] = {"#c05621", "#2f855a", "#2b6cb0", "#6b46c1",
                                  "#b83280", "#718096"};
  std::string svg = "<svg xmlns='http://www.w3.org/2000/svg' width='" +
                    std::to_string(W) + "' height='" + std::to_string(H) +
                    "'>\n<rect width='100%' height='100%' fill='white'/>\n";
  for (int t = 0; t < T; ++t) {
    double cx = 10 + cell * (t % cols) + cell / 2.0;
    double cy = 10 + cell * (t / cols) + cell / 2.0;
    const auto& r = led.rows[t];
    double total = r.ipe_profit;
    for (double u : r.plant_profit) total += u;
    svg += "<circle cx='" + fmt6(cx) + "' cy='" + fmt6(cy) + "' r='" +
           fmt6(R1) + "' fill='none' stroke='#e2e8f0' stroke-width='" +
           fmt6(R1 - R0) + "'/>\n";
    if (total > 1e-9) {
      double a0 = -1.5707963267948966;
      auto arc = [&](double frac, const char* color) {
        if (frac <= 1e-9) return;
        double a1 = a0 + frac * 2 * 3.141592653589793;
        double rm = (R0 + R1) / 2.0;
        double x0 = cx + rm * std::cos(a0), y0 = cy + rm * std::sin(a0);
        double x1 = cx + rm * std::cos(a1), y1 = cy + rm * std::sin(a1);
        int large = frac > 0.5 ? 1 : 0;
        svg += "<path d='M " + fmt6(x0) + " " + fmt6(y0) + " A " + fmt6(rm) +
               " " + fmt6(rm) + " 0 " + std::to_string(large) + " 1 " +
               fmt6(x1) + " " + fmt6(y1) + "' fill='none' stroke='" + color +
               "' stroke-width='" + fmt6(R1 - R0) + "'/>\n";
        a0 = a1;
      };
      for (std::size_t k = 0; k < r.plant_profit.size(); ++k)
        arc(r.plant_profit[k] / total, palette[k % 6]);
      arc(r.ipe_profit / total, "#d69e2e");
    }
    svg += "<text x='" + fmt6(cx) + "' y='" + fmt6(cy + 4) +
           "' text-anchor='middle' font-size='10'>" + std::to_string(t) +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline RunManifest run_pipeline(const GridCase& gc,
                                const PipelineOptions& opts) {
  namespace fs = std::filesystem;
  using pipe_detail::stage_fresh;
  using pipe_detail::write_json;

  auto log = [&](const std::string& s) {
    if (opts.log) opts.log(s);
  };
  const int eps_points = opts.eps_points > 0 ? opts.eps_points : gc.eps_points;
  const int n_scenarios =
      opts.scenario_count > 0 ? opts.scenario_count : gc.scenario_count;
  const std::uint64_t seed =
      opts.seed >= 0 ? static_cast<std::uint64_t>(opts.seed) : gc.seed;
  const int select =
      opts.select > 0 ? std::min(opts.select, n_scenarios) : n_scenarios;

  fs::path root(opts.out_dir);
  fs::create_directories(root / "dayahead");
  fs::create_directories(root / "scenarios");
  fs::create_directories(root / "intraday");
  fs::create_directories(root / "report");

  RunManifest man;
  man.input_hash = fnv1a_hex(write_case_json(gc).dump());
  man.run_id = "run-" + man.input_hash.substr(0, 12);

  auto tick = [] { return std::chrono::steady_clock::now(); };
  auto secs = [](auto a, auto b) {
    return std::chrono::duration<double>(b - a).count();
  };

  // ---- Step 1: day-ahead sweep and compromise --------------------------
  DayAheadSolution compromise;
  ParetoFront front;
  {
    json meta = {{"input_hash", man.input_hash}, {"eps_points", eps_points}};
    auto dir = root / "dayahead";
    auto t0 = tick();
    if (stage_fresh(dir / "meta.json", meta) &&
        fs::exists(dir / "compromise.json")) {
      log("dayahead: reusing cached artifacts");
      std::ifstream in(dir / "compromise.json");
      json j;
      in >> j;
      compromise = day_ahead_from_json(j);
    } else {
      log("dayahead: sweeping " + std::to_string(eps_points) + " points");
      front = epsilon_sweep(gc, eps_points, {}, opts.log);
      compromise = pick_compromise(front).sol;
      auto rep = replay_day_ahead(gc, compromise);
      if (!rep.ok())
        throw std::runtime_error("day-ahead compromise failed replay: " +
                                 rep.violations.front());
      write_file((dir / "front.csv").string(), front_csv(front));
      std::vector<std::pair<double, double>> pts;
      for (const auto& fp : front.points) pts.push_back({fp.j1, fp.j2});
      write_file((dir / "front.svg").string(),
                 front_svg(pts, "thermal cost ($)", "1 - C_ASC"));
      for (std::size_t i = 0; i < front.points.size(); ++i)
        write_json(dir / ("point_" + std::to_string(i) + ".json"),
                   day_ahead_to_json(front.points[i].sol));
      write_json(dir / "compromise.json", day_ahead_to_json(compromise));
      write_file((dir / "pmp_schedule.csv").string(),
                 schedule_csv(gc, compromise.pmp));
      write_file((dir / "flows.csv").string(),
                 flows_csv(gc, compromise.flows));
      if (opts.dump_lp) {
        auto m = build_bilevel(gc, {});
        write_file((dir / "bilevel.lp").string(), m.prob.to_lp_text());
      }
      write_json(dir / "meta.json", meta);
    }
    man.artifacts["dayahead"] = (dir / "compromise.json").string();
    man.wall_clock_s["dayahead"] = secs(t0, tick());
  }
  if (opts.stages == "dayahead") {
    write_json(root / "manifest.json", man.to_json());
    return man;
  }

  // ---- Step 2a: wind scenarios -----------------------------------------
  ScenarioSet sset;
  std::vector<int> selection;
  {
    json meta = {{"input_hash", man.input_hash},
                 {"count", n_scenarios},
                 {"seed", seed},
                 {"select", select}};
    auto dir = root / "scenarios";
    auto t0 = tick();
    std::vector<std::vector<double>> forecast(gc.T(),
                                              std::vector<double>(
                                                  gc.num_farms()));
    for (int t = 0; t < gc.T(); ++t)
      for (int l = 0; l < gc.num_farms(); ++l)
        forecast[t][l] = gc.wind[l].forecast[t];
    sset = lhs_sample(forecast, gc.sigma_fraction, n_scenarios, seed);
    selection = stratified_select(sset, select);
    if (!stage_fresh(dir / "meta.json", meta)) {
      log("scenarios: sampling " + std::to_string(n_scenarios));
      json j;
      j["seed"] = seed;
      j["count"] = n_scenarios;
      j["sigma_fraction"] = gc.sigma_fraction;
      j["fluctuation_mw"] = sset.fluctuation;
      j["selection"] = selection;
      j["realized_mw"] = sset.realized;
      write_json(dir / "scenarios.json", j);
      write_json(dir / "meta.json", meta);
    } else {
      log("scenarios: reusing cached artifacts");
    }
    man.artifacts["scenarios"] = (dir / "scenarios.json").string();
    man.wall_clock_s["scenarios"] = secs(t0, tick());
  }
  if (opts.stages == "scenarios") {
    write_json(root / "manifest.json", man.to_json());
    return man;
  }

  // ---- Step 2b: intraday responses per selected scenario ----------------
  struct Row {
    int scenario;
    double fluct;
    double curt[3], casc[3], cost[3];
    double hv[2];
  };
  std::vector<Row> rows;
  {
    json meta = {{"input_hash", man.input_hash},
                 {"count", n_scenarios},
                 {"seed", seed},
                 {"select", select},
                 {"eps_points", eps_points},
                 {"intraday_eps", gc.intraday_eps_points}};
    auto dir = root / "intraday";
    auto t0 = tick();
    bool fresh = stage_fresh(dir / "meta.json", meta) &&
                 fs::exists(dir / "summary.json");
    if (fresh) {
      log("intraday: reusing cached artifacts");
      std::ifstream in(dir / "summary.json");
      json j;
      in >> j;
      for (const auto& e : j) {
        Row r;
        r.scenario = e.at("scenario").get<int>();
        r.fluct = e.at("fluctuation_mw").get<double>();
        for (int c = 0; c < 3; ++c) {
          r.curt[c] = e.at("curtailment_mw")[c].get<double>();
          r.casc[c] = e.at("casc")[c].get<double>();
          r.cost[c] = e.at("cost_usd")[c].get<double>();
        }
        r.hv[0] = e.at("hv")[0].get<double>();
        r.hv[1] = e.at("hv")[1].get<double>();
        rows.push_back(r);
      }
    } else {
      json summary = json::array();
      for (int idx : selection) {
        log("intraday: scenario " + std::to_string(idx));
        const auto& realized = sset.realized[idx];
        auto fixed = evaluate_day_ahead_fixed(gc, compromise, realized, {});
        auto equal = solve_intraday(gc, compromise, realized,
                                    ShareRule::Equal,
                                    gc.intraday_eps_points);
        auto contrib = solve_intraday(gc, compromise, realized,
                                      ShareRule::Contribution,
                                      gc.intraday_eps_points);
        Row r;
        r.scenario = idx;
        r.fluct = sset.fluctuation[idx];
        const IntradayOutcome* outs[3] = {&fixed, &equal.compromise,
                                          &contrib.compromise};
        for (int c = 0; c < 3; ++c) {
          r.curt[c] = outs[c]->j5;
          r.casc[c] = 1.0 - outs[c]->j6;
          r.cost[c] = outs[c]->ledger.total_cost();
        }
        r.hv[0] = normalized_hypervolume({equal.front, contrib.front}, 0)
                      .value;
        r.hv[1] = normalized_hypervolume({equal.front, contrib.front}, 1)
                      .value;
        rows.push_back(r);

        std::string tag = std::to_string(idx);
        write_file((dir / ("ledger_equal_" + tag + ".csv")).string(),
                   ledger_csv(gc, equal.compromise.ledger));
        write_file((dir / ("ledger_contribution_" + tag + ".csv")).string(),
                   ledger_csv(gc, contrib.compromise.ledger));
        write_file((dir / ("rings_equal_" + tag + ".svg")).string(),
                   ledger_rings_svg(gc, equal.compromise.ledger));
        json e;
        e["scenario"] = idx;
        e["fluctuation_mw"] = r.fluct;
        e["curtailment_mw"] = {r.curt[0], r.curt[1], r.curt[2]};
        e["casc"] = {r.casc[0], r.casc[1], r.casc[2]};
        e["cost_usd"] = {r.cost[0], r.cost[1], r.cost[2]};
        e["hv"] = {r.hv[0], r.hv[1]};
        summary.push_back(e);
      }
      write_json(dir / "summary.json", summary);
      write_json(dir / "meta.json", meta);
    }
    man.artifacts["intraday"] = (dir / "summary.json").string();
    man.wall_clock_s["intraday"] = secs(t0, tick());
  }
  if (opts.stages == "intraday") {
    write_json(root / "manifest.json", man.to_json());
    return man;
  }

  // ---- Step 3: comparison report ----------------------------------------
  {
    auto dir = root / "report";
    auto t0 = tick();
    std::size_t front_points = front.points.size();
    if (front_points == 0) {
      for (int i = 0;; ++i) {
        if (!fs::exists(root / "dayahead" /
                        ("point_" + std::to_string(i) + ".json")))
          break;
        ++front_points;
      }
    }
    std::string csv =
        "# pdscr-report-v1\n"
        "scenario,fluctuation_mw,"
        "curtail_fixed_mw,curtail_equal_mw,curtail_contribution_mw,"
        "casc_fixed,casc_equal,casc_contribution,"
        "cost_fixed_usd,cost_equal_usd,cost_contribution_usd,"
        "hv_equal,hv_contribution\n";
    for (const auto& r : rows) {
      csv += std::to_string(r.scenario) + "," + fmt6(r.fluct);
      for (int c = 0; c < 3; ++c) csv += "," + fmt6(r.curt[c]);
      for (int c = 0; c < 3; ++c) csv += "," + fmt6(r.casc[c]);
      for (int c = 0; c < 3; ++c) csv += "," + fmt6(r.cost[c]);
      csv += "," + fmt6(r.hv[0]) + "," + fmt6(r.hv[1]) + "\n";
    }
    write_file((dir / "report.csv").string(), csv);
    json s;
    s["front_points"] = front_points;
    s["compromise_j1_usd"] = compromise.j1;
    s["compromise_j2"] = compromise.j2;
    s["compromise_casc"] = 1.0 - compromise.j2;
    s["scenarios_reported"] = rows.size();
    write_json(dir / "summary.json", s);
    man.artifacts["report"] = (dir / "report.csv").string();
    man.wall_clock_s["report"] = secs(t0, tick());
  }

  write_json(root / "manifest.json", man.to_json());
  return man;
}

}  // namespace pdscr
