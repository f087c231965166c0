#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "raf/geometry.hpp"
#include "raf/io.hpp"
#include "raf/kernel.hpp"
#include "raf/pipeline.hpp"
#include "raf/sampling.hpp"
#include "raf/scenario.hpp"
#include "raf/solver.hpp"
#include "raf/version.hpp"

namespace py = pybind11;
using namespace raf;

namespace {

FitReport fit_series(const PoleSet& ps, const TimeSeries& data, double lambda1,
                     double lambda2, const ConstraintSet& cs, bool fit_d,
                     bool reweight, const AdmmSettings& settings) {
  Dictionary dict = normalize_columns(convolved_design(ps, data.u));
  if (lambda2 < 0) lambda2 = default_lambda2(dict);
  ConicProblem cp = compile(dict, data, lambda1, lambda2, cs, fit_d);
  return reweight ? fit_reweighted(cp, settings) : fit(cp, settings);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "randomized atomic features for stable system identification";
  m.attr("__version__") = kVersion;
  m.attr("rng_id") = kRngId;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_IOError);

  py::enum_<RadialLaw>(m, "RadialLaw")
      .value("UniformRadius", RadialLaw::UniformRadius)
      .value("UniformArea", RadialLaw::UniformArea)
      .value("LogTimeConstant", RadialLaw::LogTimeConstant);

  py::class_<PoleRegion>(m, "PoleRegion")
      .def(py::init<>())
      .def_readwrite("rho_min", &PoleRegion::rho_min)
      .def_readwrite("rho_max", &PoleRegion::rho_max)
      .def_readwrite("angle_bands", &PoleRegion::angle_bands)
      .def_readwrite("include_real_axis", &PoleRegion::include_real_axis)
      .def_readwrite("radial_law", &PoleRegion::radial_law)
      .def("validate", &PoleRegion::validate)
      .def("contains", &PoleRegion::contains, py::arg("p"),
           py::arg("tol") = 1e-12);

  py::class_<PoleSet>(m, "PoleSet")
      .def(py::init<>())
      .def_readwrite("poles", &PoleSet::poles)
      .def_readwrite("pair_index", &PoleSet::pair_index)
      .def_readwrite("seed", &PoleSet::seed)
      .def_readwrite("region", &PoleSet::region)
      .def("size", &PoleSet::size)
      .def("group_reps", &PoleSet::group_reps)
      .def("group_count", &PoleSet::group_count)
      .def("is_real", &PoleSet::is_real);

  m.def("sample_poles", &sample_poles, py::arg("region"), py::arg("m"),
        py::arg("seed"));

  py::class_<TimeSeries>(m, "TimeSeries")
      .def(py::init<>())
      .def_readwrite("u", &TimeSeries::u)
      .def_readwrite("y", &TimeSeries::y)
      .def("length", &TimeSeries::length);

  py::class_<Dictionary>(m, "Dictionary")
      .def_readonly("pole_set", &Dictionary::pole_set)
      .def_readonly("horizon", &Dictionary::horizon)
      .def_readonly("columns", &Dictionary::columns)
      .def_readonly("groups", &Dictionary::groups)
      .def_readonly("group_rep", &Dictionary::group_rep)
      .def_readonly("norms", &Dictionary::norms)
      .def_readonly("normalized", &Dictionary::normalized)
      .def_readonly("convolved", &Dictionary::convolved)
      .def("n_cols", &Dictionary::n_cols)
      .def("n_groups", &Dictionary::n_groups);

  m.def("real_split", &real_split, py::arg("poles"), py::arg("T"));
  m.def("convolved_design", &convolved_design, py::arg("poles"), py::arg("u"));
  m.def("normalize_columns", &normalize_columns, py::arg("dictionary"));
  m.def("denormalize_residues", &denormalize_residues, py::arg("dictionary"),
        py::arg("coeffs"));

  py::class_<GaugeResult>(m, "GaugeResult")
      .def_readonly("out_of_span", &GaugeResult::out_of_span)
      .def_readonly("value", &GaugeResult::value)
      .def_readonly("coefficients", &GaugeResult::coefficients)
      .def_readonly("atom_weights", &GaugeResult::atom_weights)
      .def_readonly("residues", &GaugeResult::residues);

  m.def("atomic_gauge", &atomic_gauge, py::arg("h"), py::arg("dictionary"),
        py::arg("reconstruction_tol") = 1e-8);

  py::class_<FitDiagnostics>(m, "FitDiagnostics")
      .def_readonly("status", &FitDiagnostics::status)
      .def_readonly("objective", &FitDiagnostics::objective)
      .def_readonly("primal_residual", &FitDiagnostics::primal_residual)
      .def_readonly("dual_residual", &FitDiagnostics::dual_residual)
      .def_readonly("iterations", &FitDiagnostics::iterations)
      .def_readonly("warning", &FitDiagnostics::warning)
      .def_readonly("message", &FitDiagnostics::message);

  py::class_<RafModel>(m, "RafModel")
      .def(py::init<>())
      .def_readwrite("poles", &RafModel::poles)
      .def_readwrite("group_rep", &RafModel::group_rep)
      .def_readwrite("residues", &RafModel::residues)
      .def_readwrite("feedthrough", &RafModel::feedthrough)
      .def_readonly("diagnostics", &RafModel::diagnostics)
      .def("group_count", &RafModel::group_count)
      .def("group_is_real", &RafModel::group_is_real)
      .def("group_pole", &RafModel::group_pole)
      .def("validate", &RafModel::validate);

  py::class_<BudgetReport>(m, "BudgetReport")
      .def_readonly("settling", &BudgetReport::settling)
      .def_readonly("l1_tail", &BudgetReport::l1_tail)
      .def_readonly("bibo", &BudgetReport::bibo)
      .def_readonly("step_tail", &BudgetReport::step_tail)
      .def_readonly("dc_gain", &BudgetReport::dc_gain);

  m.def("budgets", &budgets, py::arg("model"), py::arg("t_s"),
        py::arg("t_step"));
  m.def("impulse_response", &impulse_response, py::arg("model"),
        py::arg("length"));
  m.def("simulate", &simulate, py::arg("model"), py::arg("u"));
  m.def("frequency_response", &frequency_response, py::arg("model"),
        py::arg("omega"));

  py::class_<ConstraintSet>(m, "ConstraintSet")
      .def(py::init<>())
      .def_readwrite("monotone", &ConstraintSet::monotone)
      .def("empty", &ConstraintSet::empty)
      .def_static("from_json", [](const std::string& text) {
        return io::constraints_from_json(io::json::parse(text));
      })
      .def("to_json",
           [](const ConstraintSet& cs) { return io::constraints_to_json(cs).dump(2); });

  py::class_<AdmmSettings>(m, "AdmmSettings")
      .def(py::init<>())
      .def_readwrite("rho", &AdmmSettings::rho)
      .def_readwrite("alpha", &AdmmSettings::alpha)
      .def_readwrite("eps_rel", &AdmmSettings::eps_rel)
      .def_readwrite("eps_abs", &AdmmSettings::eps_abs)
      .def_readwrite("max_iter", &AdmmSettings::max_iter)
      .def_readwrite("check_every", &AdmmSettings::check_every)
      .def_readwrite("adaptive_rho", &AdmmSettings::adaptive_rho)
      .def_readwrite("feas_tol", &AdmmSettings::feas_tol);

  py::class_<SolveInfo>(m, "SolveInfo")
      .def_readonly("status", &SolveInfo::status)
      .def_readonly("iterations", &SolveInfo::iterations)
      .def_readonly("primal_residual", &SolveInfo::primal_residual)
      .def_readonly("dual_residual", &SolveInfo::dual_residual)
      .def_readonly("objective", &SolveInfo::objective)
      .def_readonly("max_violation", &SolveInfo::max_violation)
      .def_readonly("rho_final", &SolveInfo::rho_final)
      .def_readonly("message", &SolveInfo::message);

  py::class_<FitReport>(m, "FitReport")
      .def_readonly("feasible", &FitReport::feasible)
      .def_readonly("model", &FitReport::model)
      .def_readonly("info", &FitReport::info);

  m.def("fit_series", &fit_series, py::arg("poles"), py::arg("data"),
        py::arg("lambda1") = 0.1, py::arg("lambda2") = -1.0,
        py::arg("constraints") = ConstraintSet{}, py::arg("fit_d") = false,
        py::arg("reweight") = false, py::arg("settings") = AdmmSettings{});
  m.def("default_lambda2", &default_lambda2, py::arg("dictionary"));

  // kernels
  py::class_<AtomicMeasure>(m, "AtomicMeasure")
      .def(py::init<>())
      .def_readwrite("atoms", &AtomicMeasure::atoms)
      .def_readwrite("weights", &AtomicMeasure::weights)
      .def("validate", &AtomicMeasure::validate)
      .def("total_mass", &AtomicMeasure::total_mass)
      .def("rho", &AtomicMeasure::rho);

  py::class_<KernelMatrix>(m, "KernelMatrix")
      .def_readonly("K", &KernelMatrix::K)
      .def_readonly("horizon", &KernelMatrix::horizon)
      .def("size", &KernelMatrix::size);

  m.def("min_eigenvalue", &min_eigenvalue, py::arg("M"));
  m.def("kernel_atomic", &kernel_atomic, py::arg("mu"), py::arg("T"));
  m.def("kernel_empirical", &kernel_empirical, py::arg("poles"), py::arg("T"));
  m.def("measure_from_poles", &measure_from_poles, py::arg("poles"));
  m.def("region_law_kernel", &region_law_kernel, py::arg("region"),
        py::arg("T"));

  py::class_<RadiusDefect>(m, "RadiusDefect")
      .def_readonly("D", &RadiusDefect::D)
      .def_readonly("min_eig", &RadiusDefect::min_eig);

  m.def("radius_defect", &radius_defect, py::arg("K"), py::arg("rho"));
  m.def("shift_contractivity_check", &shift_contractivity_check, py::arg("K"),
        py::arg("rho"), py::arg("tol_rel") = 1e-10);

  py::class_<EmbeddingBound>(m, "EmbeddingBound")
      .def_readonly("lhs", &EmbeddingBound::lhs)
      .def_readonly("rhs", &EmbeddingBound::rhs)
      .def_readonly("rkhs_norm", &EmbeddingBound::rkhs_norm)
      .def_readonly("truncation", &EmbeddingBound::truncation);

  m.def("embedding_bound_check", &embedding_bound_check, py::arg("mu"),
        py::arg("coeffs"), py::arg("truncation") = 2000);

  py::class_<TailCurve>(m, "TailCurve")
      .def_readonly("eps", &TailCurve::eps)
      .def_readonly("empirical_rate", &TailCurve::empirical_rate)
      .def_readonly("hoeffding_bound", &TailCurve::hoeffding_bound);

  py::class_<HoeffdingReport>(m, "HoeffdingReport")
      .def_readonly("M", &HoeffdingReport::M)
      .def_readonly("T", &HoeffdingReport::T)
      .def_readonly("trials", &HoeffdingReport::trials)
      .def_readonly("errors", &HoeffdingReport::errors)
      .def_readonly("mean_error", &HoeffdingReport::mean_error)
      .def_readonly("max_error", &HoeffdingReport::max_error)
      .def_readonly("curve", &HoeffdingReport::curve);

  m.def("hoeffding_experiment", &hoeffding_experiment, py::arg("region"),
        py::arg("m"), py::arg("T"), py::arg("trials"), py::arg("seed"),
        py::arg("eps_grid") = std::vector<double>{});

  py::class_<AmlsCoordinates>(m, "AmlsCoordinates")
      .def(py::init<>())
      .def_readwrite("alpha", &AmlsCoordinates::alpha)
      .def_readwrite("omega", &AmlsCoordinates::omega)
      .def_readwrite("finite", &AmlsCoordinates::finite);

  m.def("amls_transform", &amls_transform, py::arg("p"));
  m.def("amls_inverse", &amls_inverse, py::arg("coords"));

  py::class_<CounterexampleReport>(m, "CounterexampleReport")
      .def_readonly("K", &CounterexampleReport::K)
      .def_readonly("diag_ok", &CounterexampleReport::diag_ok)
      .def_readonly("kernel_psd", &CounterexampleReport::kernel_psd)
      .def_readonly("defect_psd", &CounterexampleReport::defect_psd)
      .def_readonly("lp_infeasible", &CounterexampleReport::lp_infeasible)
      .def_readonly("lp_residual", &CounterexampleReport::lp_residual);

  m.def("counterexample_check", &counterexample_check, py::arg("T") = 8,
        py::arg("grid_step") = 0.05);

  py::class_<PickData>(m, "PickData")
      .def(py::init<>())
      .def_readwrite("nodes", &PickData::nodes)
      .def_readwrite("values", &PickData::values)
      .def("validate", &PickData::validate);

  py::class_<PickResult>(m, "PickResult")
      .def_readonly("P", &PickResult::P)
      .def_readonly("min_eig", &PickResult::min_eig)
      .def_readonly("psd", &PickResult::psd);

  m.def("pick_matrix", &pick_matrix, py::arg("data"));

  py::class_<NormalizedKernel>(m, "NormalizedKernel")
      .def_readonly("K", &NormalizedKernel::K)
      .def_readonly("max_identity_dev", &NormalizedKernel::max_identity_dev);

  m.def("normalized_kernel", &normalized_kernel, py::arg("K"), py::arg("rho"),
        py::arg("gamma"));
  m.def("nnls", &nnls, py::arg("A"), py::arg("b"), py::arg("max_iter") = 1000);

  // geometry
  m.def("gram_closed_form", &gram_closed_form, py::arg("p_i"), py::arg("p_j"),
        py::arg("T"));
  m.def("coherence_finite", &coherence_finite, py::arg("p_i"), py::arg("p_j"),
        py::arg("T"));
  m.def("coherence_infinite", &coherence_infinite, py::arg("p_i"),
        py::arg("p_j"));
  m.def("pseudo_hyperbolic", &pseudo_hyperbolic, py::arg("p"), py::arg("q"));

  py::class_<CoherenceReport>(m, "CoherenceReport")
      .def_readonly("mu", &CoherenceReport::mu)
      .def_readonly("mu_max", &CoherenceReport::mu_max)
      .def_readonly("gershgorin_bound", &CoherenceReport::gershgorin_bound)
      .def_readonly("min_eig", &CoherenceReport::min_eig)
      .def_readonly("horizon", &CoherenceReport::horizon);

  m.def("coherence_report", &coherence_report, py::arg("poles"), py::arg("T"));

  // scenario
  py::class_<TwoModeParams>(m, "TwoModeParams")
      .def(py::init<>())
      .def_readwrite("p1", &TwoModeParams::p1)
      .def_readwrite("p2", &TwoModeParams::p2)
      .def_readwrite("c1", &TwoModeParams::c1)
      .def_readwrite("c2", &TwoModeParams::c2);

  py::class_<ScenarioData>(m, "ScenarioData")
      .def_readonly("data", &ScenarioData::data)
      .def_readonly("y_clean", &ScenarioData::y_clean)
      .def_readonly("truth", &ScenarioData::truth)
      .def_readonly("noise_sigma", &ScenarioData::noise_sigma)
      .def_readonly("empirical_snr_db", &ScenarioData::empirical_snr_db)
      .def_readonly("filter_pole", &ScenarioData::filter_pole);

  m.def("make_scenario", &make_scenario, py::arg("params") = TwoModeParams{},
        py::arg("n") = 100, py::arg("snr_db") = 30.0,
        py::arg("bandwidth") = 0.6, py::arg("seed") = 0);
  m.def("scenario_region", &scenario_region);

  // pipeline
  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init<>())
      .def_readwrite("region", &PipelineConfig::region)
      .def_readwrite("m_groups", &PipelineConfig::m_groups)
      .def_readwrite("seed", &PipelineConfig::seed)
      .def_readwrite("lambda1_grid", &PipelineConfig::lambda1_grid)
      .def_readwrite("lambda2", &PipelineConfig::lambda2)
      .def_readwrite("constraints", &PipelineConfig::constraints)
      .def_readwrite("rounds", &PipelineConfig::rounds)
      .def_readwrite("local_radius", &PipelineConfig::local_radius)
      .def_readwrite("m_local", &PipelineConfig::m_local)
      .def_readwrite("prune_rel_tol", &PipelineConfig::prune_rel_tol)
      .def_readwrite("cluster_threshold", &PipelineConfig::cluster_threshold)
      .def_readwrite("validation_fraction", &PipelineConfig::validation_fraction)
      .def_readwrite("fit_feedthrough", &PipelineConfig::fit_feedthrough)
      .def_readwrite("reweight", &PipelineConfig::reweight)
      .def_readwrite("solver", &PipelineConfig::solver)
      .def_static("from_json", [](const std::string& text) {
        return io::pipeline_config_from_json(io::json::parse(text));
      })
      .def("to_json", [](const PipelineConfig& cfg) {
        return io::pipeline_config_to_json(cfg).dump(2);
      });

  py::class_<RoundReport>(m, "RoundReport")
      .def_readonly("round", &RoundReport::round)
      .def_readonly("dict_groups", &RoundReport::dict_groups)
      .def_readonly("objective", &RoundReport::objective)
      .def_readonly("lambda1", &RoundReport::lambda1)
      .def_readonly("active_groups", &RoundReport::active_groups)
      .def_readonly("cluster_reps", &RoundReport::cluster_reps)
      .def_readonly("budgets", &RoundReport::budgets)
      .def_readonly("solve", &RoundReport::solve);

  py::class_<PipelineResult>(m, "PipelineResult")
      .def_readonly("feasible", &PipelineResult::feasible)
      .def_readonly("empty_model", &PipelineResult::empty_model)
      .def_readonly("model", &PipelineResult::model)
      .def_readonly("full_model", &PipelineResult::full_model)
      .def_readonly("rounds", &PipelineResult::rounds)
      .def_readonly("active_groups", &PipelineResult::active_groups)
      .def_readonly("chosen_lambda1", &PipelineResult::chosen_lambda1)
      .def("to_json", [](const PipelineResult& res) {
        return io::pipeline_result_to_json(res).dump(2);
      });

  m.def("run_pipeline", &run_pipeline, py::arg("config"), py::arg("data"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<Score>(m, "Score")
      .def_readonly("impulse_rmse", &Score::impulse_rmse)
      .def_readonly("sim_fit_pct", &Score::sim_fit_pct)
      .def_readonly("prior_violation", &Score::prior_violation);

  m.def(
      "score",
      [](const RafModel& model, const RafModel& truth, int horizon,
         const Eigen::VectorXd& u, std::optional<ConstraintSet> cs) {
        return score(model, truth, horizon, u, cs ? &*cs : nullptr);
      },
      py::arg("model"), py::arg("truth"), py::arg("horizon"), py::arg("u"),
      py::arg("constraints") = std::nullopt);

  // io
  m.def("save_model", &io::save_model, py::arg("path"), py::arg("model"));
  m.def("load_model", &io::load_model, py::arg("path"));
  m.def("save_poleset", &io::save_poleset, py::arg("path"), py::arg("poles"));
  m.def("load_poleset", &io::load_poleset, py::arg("path"));
  m.def("save_csv", &io::save_csv, py::arg("path"), py::arg("data"));
  m.def("load_csv", &io::load_csv, py::arg("path"));
  m.def("model_to_json",
        [](const RafModel& model) { return io::model_to_json(model).dump(2); });
  m.def("model_from_json", [](const std::string& text) {
    return io::model_from_json(io::json::parse(text));
  });
}
