#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "raf/geometry.hpp"
#include "raf/io.hpp"
#include "raf/kernel.hpp"
#include "raf/pipeline.hpp"
#include "raf/sampling.hpp"
#include "raf/scenario.hpp"
#include "raf/solver.hpp"
#include "raf/version.hpp"

namespace {

using raf::io::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNumerical = 3;

struct SampleArgs {
  std::string region_path;
  int m = 200;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_sample(const SampleArgs& a) {
  raf::PoleRegion region = raf::io::region_from_json(raf::io::load_json(a.region_path));
  raf::PoleSet ps = raf::sample_poles(region, a.m, a.seed);
  raf::io::save_poleset(a.out, ps);
  json cfg = {{"region", raf::io::region_to_json(region)}, {"M", a.m}, {"seed", a.seed}};
  raf::io::write_manifest(a.out, "sample", a.seed, cfg);
  return kExitOk;
}

struct FitArgs {
  std::string data_path;
  std::string dict_path;
  std::string config_path;
  double lambda1 = 0.1;
  double lambda2 = -1.0;
  bool fit_d = false;
  bool reweight = false;
  std::string out;
};

int cmd_fit(const FitArgs& a) {
  raf::TimeSeries data = raf::io::load_csv(a.data_path);
  if (data.y.size() == 0) throw raf::ConfigError("fit needs a y column");
  raf::PoleSet ps = raf::io::load_poleset(a.dict_path);
  raf::ConstraintSet cs;
  if (!a.config_path.empty())
    cs = raf::io::constraints_from_json(raf::io::load_json(a.config_path));

  raf::Dictionary dict =
      raf::normalize_columns(raf::convolved_design(ps, data.u));
  double lambda2 = a.lambda2 < 0 ? raf::default_lambda2(dict) : a.lambda2;
  raf::ConicProblem cp = raf::compile(dict, data, a.lambda1, lambda2, cs, a.fit_d);
  raf::FitReport rep = a.reweight ? raf::fit_reweighted(cp) : raf::fit(cp);

  json cfg = {{"data", a.data_path},   {"dict", a.dict_path},
              {"priors", raf::io::constraints_to_json(cs)},
              {"lambda1", a.lambda1},  {"lambda2", lambda2},
              {"fit_feedthrough", a.fit_d}, {"reweight", a.reweight}};
  if (!rep.feasible) {
    json out = {{"format_version", raf::io::kFormatVersion},
                {"feasible", false},
                {"solve", raf::io::solve_info_to_json(rep.info)}};
    raf::io::save_json(a.out, out);
    raf::io::write_manifest(a.out, "fit", ps.seed, cfg);
    std::cerr << "infeasible: " << rep.info.message << "\n";
    return kExitInfeasible;
  }
  raf::io::save_model(a.out, rep.model);
  raf::io::write_manifest(a.out, "fit", ps.seed, cfg);
  return kExitOk;
}

struct DiagnoseArgs {
  std::string dict_path;
  int horizon = 100;
  std::string out;
  std::string csv;
};

int cmd_diagnose(const DiagnoseArgs& a) {
  raf::PoleSet ps = raf::io::load_poleset(a.dict_path);
  std::vector<raf::Complex> reps;
  for (int i : ps.group_reps()) reps.push_back(ps.poles[i]);
  raf::CoherenceReport rep = raf::coherence_report(reps, a.horizon);

  json out = {{"format_version", raf::io::kFormatVersion},
              {"horizon", rep.horizon},
              {"mu_max", rep.mu_max},
              {"gershgorin_bound", rep.gershgorin_bound},
              {"min_eig", rep.min_eig},
              {"groups", static_cast<int>(reps.size())}};
  raf::io::save_json(a.out, out);
  if (!a.csv.empty()) {
    std::string text = "i,j,mu\n";
    char buf[64];
    for (int i = 0; i < rep.mu.rows(); ++i)
      for (int j = 0; j < rep.mu.cols(); ++j) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", i, j, rep.mu(i, j));
        text += buf;
      }
    raf::io::write_text_atomic(a.csv, text);
  }
  json cfg = {{"dict", a.dict_path}, {"T", a.horizon}};
  raf::io::write_manifest(a.out, "diagnose", ps.seed, cfg);
  return kExitOk;
}

struct KernelArgs {
  std::string experiment = "hoeffding";
  std::string region_path;
  int m = 1000;
  int horizon = 20;
  int trials = 200;
  std::uint64_t seed = 1;
  std::string out;
  std::string report;
};

int cmd_kernel(const KernelArgs& a) {
  json cfg = {{"experiment", a.experiment}, {"M", a.m},      {"T", a.horizon},
              {"trials", a.trials},         {"seed", a.seed}};
  if (a.experiment == "hoeffding") {
    raf::PoleRegion region;
    if (!a.region_path.empty())
      region = raf::io::region_from_json(raf::io::load_json(a.region_path));
    cfg["region"] = raf::io::region_to_json(region);
    raf::HoeffdingReport rep =
        raf::hoeffding_experiment(region, a.m, a.horizon, a.trials, a.seed);
    std::string text = "eps,empirical_rate,hoeffding_bound\n";
    char buf[128];
    for (std::size_t i = 0; i < rep.curve.eps.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", rep.curve.eps[i],
                    rep.curve.empirical_rate[i], rep.curve.hoeffding_bound[i]);
      text += buf;
    }
    raf::io::write_text_atomic(a.out, text);
    if (!a.report.empty()) {
      json jr = {{"format_version", raf::io::kFormatVersion},
                 {"M", rep.M},
                 {"T", rep.T},
                 {"trials", rep.trials},
                 {"mean_error", rep.mean_error},
                 {"max_error", rep.max_error},
                 {"errors", rep.errors}};
      raf::io::save_json(a.report, jr);
    }
  } else if (a.experiment == "counterexample") {
    raf::CounterexampleReport rep = raf::counterexample_check();
    json jr = {{"format_version", raf::io::kFormatVersion},
               {"diag_ok", rep.diag_ok},
               {"kernel_psd", rep.kernel_psd},
               {"defect_psd", rep.defect_psd},
               {"lp_infeasible", rep.lp_infeasible},
               {"lp_residual", rep.lp_residual}};
    raf::io::save_json(a.out, jr);
  } else {
    throw raf::ConfigError("unknown kernel experiment: " + a.experiment);
  }
  raf::io::write_manifest(a.out, "kernel", a.seed, cfg);
  return kExitOk;
}

struct PickArgs {
  std::string nodes_path;
  std::string out;
};

int cmd_pick(const PickArgs& a) {
  json j = raf::io::load_json(a.nodes_path);
  raf::PickData data;
  for (const auto& e : j.at("nodes"))
    data.nodes.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
  for (const auto& e : j.at("values"))
    data.values.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
  raf::PickResult res = raf::pick_matrix(data);
  json out = {{"format_version", raf::io::kFormatVersion},
              {"min_eig", res.min_eig},
              {"psd", res.psd},
              {"n", static_cast<int>(data.nodes.size())}};
  raf::io::save_json(a.out, out);
  raf::io::write_manifest(a.out, "pick", 0, j);
  return kExitOk;
}

struct GaugeArgs {
  std::string dict_path;
  std::string target_path;
  double tol = 1e-8;
  std::string out;
};

int cmd_gauge(const GaugeArgs& a) {
  raf::PoleSet ps = raf::io::load_poleset(a.dict_path);
  raf::TimeSeries target = raf::io::load_csv(a.target_path);
  const Eigen::VectorXd& h = target.y.size() > 0 ? target.y : target.u;
  raf::Dictionary dict =
      raf::normalize_columns(raf::real_split(ps, static_cast<int>(h.size())));
  raf::GaugeResult res = raf::atomic_gauge(h, dict, a.tol);
  json out = {{"format_version", raf::io::kFormatVersion},
              {"out_of_span", res.out_of_span}};
  if (!res.out_of_span) {
    out["value"] = res.value;
    json weights = json::array();
    for (const auto& w : res.atom_weights)
      weights.push_back({w.real(), w.imag()});
    out["atom_weights"] = weights;
    json residues = json::array();
    for (const auto& c : res.residues) residues.push_back({c.real(), c.imag()});
    out["residues"] = residues;
  }
  raf::io::save_json(a.out, out);
  json cfg = {{"dict", a.dict_path}, {"target", a.target_path}, {"tol", a.tol}};
  raf::io::write_manifest(a.out, "gauge", ps.seed, cfg);
  return kExitOk;
}

struct SimulateArgs {
  std::string model_path;
  std::string input_path;
  int impulse_len = 0;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  raf::RafModel model = raf::io::load_model(a.model_path);
  raf::TimeSeries out_ts;
  if (a.impulse_len > 0) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(a.impulse_len);
    u(0) = 1.0;
    out_ts.u = u;
    out_ts.y = raf::impulse_response(model, a.impulse_len);
  } else {
    if (a.input_path.empty())
      throw raf::ConfigError("simulate needs --input or --impulse");
    raf::TimeSeries input = raf::io::load_csv(a.input_path);
    out_ts.u = input.u;
    out_ts.y = raf::simulate(model, input.u);
  }
  raf::io::save_csv(a.out, out_ts);
  json cfg = {{"model", a.model_path},
              {"input", a.input_path},
              {"impulse", a.impulse_len}};
  raf::io::write_manifest(a.out, "simulate", model.poles.seed, cfg);
  return kExitOk;
}

struct PipelineArgs {
  std::string config_path;
  std::string data_path;
  int seeds = 1;
  std::string out;
  std::string model_out;
};

int cmd_pipeline(const PipelineArgs& a) {
  json jcfg = raf::io::load_json(a.config_path);
  raf::PipelineConfig cfg = raf::io::pipeline_config_from_json(jcfg);

  raf::TimeSeries data;
  raf::ScenarioData scen;
  bool synthetic = false;
  if (!a.data_path.empty()) {
    data = raf::io::load_csv(a.data_path);
  } else if (jcfg.contains("scenario")) {
    const json& s = jcfg["scenario"];
    synthetic = true;
    scen = raf::make_scenario(
        raf::TwoModeParams{}, s.value("N", 100),
        s.value("snr_db", 30.0), s.value("bandwidth", 0.6),
        s.value("seed", cfg.seed));
    data = scen.data;
  } else {
    throw raf::ConfigError("pipeline needs --data or a scenario block");
  }

  int exit_code = kExitOk;
  json per_seed = json::array();
  raf::PipelineResult last;
  for (int k = 0; k < a.seeds; ++k) {
    raf::PipelineConfig run_cfg = cfg;
    run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(k);
    raf::PipelineResult res = raf::run_pipeline(run_cfg, data);
    json entry = raf::io::pipeline_result_to_json(res);
    entry["seed"] = run_cfg.seed;
    if (res.feasible && synthetic) {
      raf::Score sc = raf::score(res.model, scen.truth, 200, data.u,
                                 &run_cfg.constraints);
      entry["score"] = {{"impulse_rmse", sc.impulse_rmse},
                        {"sim_fit_pct", sc.sim_fit_pct},
                        {"prior_violation", sc.prior_violation}};
    }
    per_seed.push_back(entry);
    if (!res.feasible) exit_code = kExitInfeasible;
    last = res;
  }

  json out;
  if (a.seeds == 1) {
    out = per_seed[0];
  } else {
    out = {{"format_version", raf::io::kFormatVersion},
           {"seeds", a.seeds},
           {"runs", per_seed}};
  }
  raf::io::save_json(a.out, out);
  if (!a.model_out.empty() && last.feasible)
    raf::io::save_model(a.model_out, last.model);
  raf::io::write_manifest(a.out, "pipeline", cfg.seed, jcfg);
  return exit_code;
}

struct ScenarioArgs {
  int n = 100;
  double snr_db = 30.0;
  double bandwidth = 0.6;
  std::uint64_t seed = 0;
  std::string out;
  std::string truth_out;
};

int cmd_scenario(const ScenarioArgs& a) {
  raf::ScenarioData scen =
      raf::make_scenario(raf::TwoModeParams{}, a.n, a.snr_db, a.bandwidth, a.seed);
  raf::io::save_csv(a.out, scen.data);
  if (!a.truth_out.empty()) raf::io::save_model(a.truth_out, scen.truth);
  json cfg = {{"N", a.n},
              {"snr_db", a.snr_db},
              {"bandwidth", a.bandwidth},
              {"seed", a.seed},
              {"empirical_snr_db", scen.empirical_snr_db},
              {"filter_pole", scen.filter_pole}};
  raf::io::write_manifest(a.out, "scenario", a.seed, cfg);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"randomized atomic features for stable system identification"};
  app.set_version_flag("--version", raf::kVersion);
  app.require_subcommand(1);

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "draw a pole dictionary from a region");
  sample->add_option("--region", sa.region_path, "region JSON")->required();
  sample->add_option("--M", sa.m, "number of pole groups")->required();
  sample->add_option("--seed", sa.seed, "rng seed");
  sample->add_option("--out", sa.out, "output dictionary JSON")->required();

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "fit residues by the convex master problem");
  fit->add_option("--data", fa.data_path, "data CSV (t,u,y)")->required();
  fit->add_option("--dict", fa.dict_path, "dictionary JSON")->required();
  fit->add_option("--config", fa.config_path, "priors JSON");
  fit->add_option("--lambda1", fa.lambda1, "group penalty weight");
  fit->add_option("--lambda2", fa.lambda2, "ridge weight (negative = auto)");
  fit->add_flag("--fit-d", fa.fit_d, "fit the feedthrough term");
  fit->add_flag("--reweight", fa.reweight, "one reweighted re-solve (heuristic)");
  fit->add_option("--out", fa.out, "output model JSON")->required();

  DiagnoseArgs da;
  auto* diagnose = app.add_subcommand("diagnose", "coherence diagnostics of a dictionary");
  diagnose->add_option("--dict", da.dict_path, "dictionary JSON")->required();
  diagnose->add_option("--T", da.horizon, "horizon");
  diagnose->add_option("--out", da.out, "report JSON")->required();
  diagnose->add_option("--csv", da.csv, "pairwise coherence CSV");

  KernelArgs ka;
  auto* kernel = app.add_subcommand("kernel", "kernel experiments");
  kernel->add_option("--experiment", ka.experiment, "hoeffding | counterexample");
  kernel->add_option("--region", ka.region_path, "region JSON (hoeffding)");
  kernel->add_option("--M", ka.m, "groups per trial");
  kernel->add_option("--T", ka.horizon, "kernel horizon");
  kernel->add_option("--trials", ka.trials, "monte carlo trials");
  kernel->add_option("--seed", ka.seed, "rng seed");
  kernel->add_option("--out", ka.out, "output file")->required();
  kernel->add_option("--report", ka.report, "extra report JSON (hoeffding)");

  PickArgs pa;
  auto* pick = app.add_subcommand("pick", "interpolation positivity check");
  pick->add_option("--nodes", pa.nodes_path, "JSON with nodes/values")->required();
  pick->add_option("--out", pa.out, "report JSON")->required();

  GaugeArgs ga;
  auto* gauge = app.add_subcommand("gauge", "atomic gauge of a target signal");
  gauge->add_option("--dict", ga.dict_path, "dictionary JSON")->required();
  gauge->add_option("--target", ga.target_path,
                    "target CSV; the y column when present, else u")
      ->required();
  gauge->add_option("--tol", ga.tol, "reconstruction tolerance");
  gauge->add_option("--out", ga.out, "report JSON")->required();

  SimulateArgs ma;
  auto* simulate = app.add_subcommand("simulate", "run a model on an input");
  simulate->add_option("--model", ma.model_path, "model JSON")->required();
  simulate->add_option("--input", ma.input_path, "input CSV (t,u)");
  simulate->add_option("--impulse", ma.impulse_len, "impulse response length");
  simulate->add_option("--out", ma.out, "output CSV")->required();

  PipelineArgs pla;
  auto* pipeline = app.add_subcommand("pipeline", "full identification loop");
  pipeline->add_option("--config", pla.config_path, "pipeline config JSON")->required();
  pipeline->add_option("--data", pla.data_path, "data CSV (else scenario block)");
  pipeline->add_option("--seeds", pla.seeds, "fan out over consecutive seeds")
      ->check(CLI::PositiveNumber);
  pipeline->add_option("--out", pla.out, "round report JSON")->required();
  pipeline->add_option("--model", pla.model_out, "also write final model JSON");

  ScenarioArgs sca;
  auto* scenario = app.add_subcommand("scenario", "synthesize two-mode benchmark data");
  scenario->add_option("--N", sca.n, "sample count");
  scenario->add_option("--snr", sca.snr_db, "output SNR in dB");
  scenario->add_option("--bandwidth", sca.bandwidth, "input bandwidth in (0, pi]");
  scenario->add_option("--seed", sca.seed, "rng seed");
  scenario->add_option("--out", sca.out, "data CSV")->required();
  scenario->add_option("--truth", sca.truth_out, "ground-truth model JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sample->parsed()) return cmd_sample(sa);
    if (fit->parsed()) return cmd_fit(fa);
    if (diagnose->parsed()) return cmd_diagnose(da);
    if (kernel->parsed()) return cmd_kernel(ka);
    if (pick->parsed()) return cmd_pick(pa);
    if (gauge->parsed()) return cmd_gauge(ga);
    if (simulate->parsed()) return cmd_simulate(ma);
    if (pipeline->parsed()) return cmd_pipeline(pla);
    if (scenario->parsed()) return cmd_scenario(sca);
  } catch (const raf::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const raf::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const raf::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
