// Command-line front end: validate a case, run the day-ahead sweep, sample
// wind scenarios, run the intraday response, or drive the whole pipeline.
//
// Exit codes: 0 ok, 2 validation failure, 3 infeasible, 4 solver limit.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "pdscr/pdscr.hpp"

using namespace pdscr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSolverLimit = 4;

GridCase load_or_exit(const std::string& path) {
  auto parsed = validate_case(path);
  if (!parsed.grid) {
    for (const auto& d : parsed.diagnostics)
      std::fprintf(stderr, "%s %s: %s\n", d.code.c_str(), d.path.c_str(),
                   d.message.c_str());
    std::exit(kExitValidation);
  }
  return *parsed.grid;
}

std::vector<std::vector<double>> forecast_of(const GridCase& gc) {
  std::vector<std::vector<double>> f(gc.T(),
                                     std::vector<double>(gc.num_farms()));
  for (int t = 0; t < gc.T(); ++t)
    for (int l = 0; l < gc.num_farms(); ++l) f[t][l] = gc.wind[l].forecast[t];
  return f;
}

void progress(const std::string& s) { std::fprintf(stderr, "%s\n", s.c_str()); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"power demand-supply cooperative responding toolkit"};
  app.require_subcommand(1);

  std::string case_path, out_dir = "out", criterion = "equal",
              stages = "all";
  long long seed = -1;
  int eps_points = -1, scenario_count = -1, select = -1;
  bool dump_lp = false;

  auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--case", case_path, "case file (JSON)")->required();
    if (needs_out) cmd->add_option("--out", out_dir, "output directory");
  };

  auto* v = app.add_subcommand("validate", "check a case file");
  add_common(v, false);

  auto* da = app.add_subcommand("dayahead", "day-ahead sweep and compromise");
  add_common(da, true);
  da->add_option("--eps-points", eps_points, "Pareto grid size");
  da->add_flag("--dump-lp", dump_lp, "write the model in LP text format");

  auto* sc = app.add_subcommand("scenarios", "sample wind scenarios");
  add_common(sc, true);
  sc->add_option("--seed", seed, "sampling seed");
  sc->add_option("--scenarios", scenario_count, "sample count");
  sc->add_option("--select", select, "stratified subset size");

  auto* in = app.add_subcommand("intraday", "cooperative intraday response");
  add_common(in, true);
  in->add_option("--criterion", criterion, "equal|contribution")
      ->check(CLI::IsMember({"equal", "contribution"}));
  in->add_option("--seed", seed, "sampling seed");
  in->add_option("--eps-points", eps_points, "day-ahead grid size");
  in->add_option("--scenarios", scenario_count, "sample count");
  in->add_option("--select", select, "stratified subset size");

  auto* rp = app.add_subcommand("report", "comparison report");
  add_common(rp, true);
  rp->add_option("--seed", seed, "sampling seed");
  rp->add_option("--eps-points", eps_points, "day-ahead grid size");
  rp->add_option("--scenarios", scenario_count, "sample count");
  rp->add_option("--select", select, "stratified subset size");

  auto* pl = app.add_subcommand("pipeline", "all stages in order");
  add_common(pl, true);
  pl->add_option("--seed", seed, "sampling seed");
  pl->add_option("--eps-points", eps_points, "day-ahead grid size");
  pl->add_option("--scenarios", scenario_count, "sample count");
  pl->add_option("--select", select, "stratified subset size");
  pl->add_flag("--dump-lp", dump_lp, "write the models in LP text format");

  CLI11_PARSE(app, argc, argv);

  try {
    if (v->parsed()) {
      auto parsed = validate_case(case_path);
      for (const auto& d : parsed.diagnostics)
        std::fprintf(stderr, "%s %s: %s\n", d.code.c_str(), d.path.c_str(),
                     d.message.c_str());
      if (!parsed.grid) return kExitValidation;
      std::printf("%s: valid (%d buses, %d units, %d farms, horizon %d)\n",
                  parsed.grid->name.c_str(), parsed.grid->num_buses(),
                  parsed.grid->num_units(), parsed.grid->num_farms(),
                  parsed.grid->T());
      return kExitOk;
    }

    GridCase gc = load_or_exit(case_path);
    PipelineOptions opts;
    opts.out_dir = out_dir;
    opts.eps_points = eps_points;
    opts.scenario_count = scenario_count;
    opts.select = select;
    opts.seed = seed;
    opts.dump_lp = dump_lp;
    opts.log = progress;

    if (da->parsed()) opts.stages = "dayahead";
    if (sc->parsed()) opts.stages = "scenarios";
    if (in->parsed()) opts.stages = "intraday";
    if (rp->parsed() || pl->parsed()) opts.stages = "all";

    if (in->parsed() && criterion == "contribution")
      progress("criterion: contribution (the report stage always includes "
               "both rules)");

    auto man = run_pipeline(gc, opts);
    std::printf("%s\n", man.to_json().dump(2).c_str());
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::runtime_error& e) {
    std::string what = e.what();
    std::fprintf(stderr, "error: %s\n", what.c_str());
    if (what.find("infeasible") != std::string::npos ||
        what.find("load shed") != std::string::npos)
      return kExitInfeasible;
    return kExitSolverLimit;
  }
}
