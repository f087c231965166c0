#pragma once

#include <cstdint>
#include <vector>

#include "raf/geometry.hpp"
#include "raf/solver.hpp"

namespace raf {

struct PipelineConfig {
  PoleRegion region;
  int m_groups = 200;        // initial dictionary size (pair groups)
  std::uint64_t seed = 0;
  std::vector<double> lambda1_grid = {0.1};
  double lambda2 = -1.0;     // negative selects the numerical-ridge default
  ConstraintSet constraints;
  int rounds = 0;            // local resample iterations
  double local_radius = 0.1; // pseudo-hyperbolic resample radius
  int m_local = 20;          // groups added per round
  double prune_rel_tol = 1e-3;
  double cluster_threshold = 0.05;
  double validation_fraction = 0.0;  // tail split used to pick lambda1
  bool fit_feedthrough = false;
  bool reweight = false;
  AdmmSettings solver;

  void validate() const;
};

struct RoundReport {
  int round = 0;
  int dict_groups = 0;
  double objective = 0.0;
  double lambda1 = 0.0;
  int active_groups = 0;
  std::vector<Complex> cluster_reps;
  BudgetReport budgets;
  SolveInfo solve;
};

struct PipelineResult {
  bool feasible = true;
  bool empty_model = false;
  RafModel model;             // final pruned-and-refit model
  RafModel full_model;        // last full-dictionary solve
  std::vector<RoundReport> rounds;
  std::vector<int> active_groups;
  double chosen_lambda1 = 0.0;
};

// Full identification loop: sample, build the convolved design, pick lambda1
// (held-out split when configured), then `rounds` passes of
// solve -> prune -> cluster -> local resample -> merge -> re-solve.
// Dictionaries only ever grow, so the training objective is non-increasing
// across rounds up to solver tolerance.
PipelineResult run_pipeline(const PipelineConfig& cfg, const TimeSeries& data);

struct Score {
  double impulse_rmse = 0.0;
  double sim_fit_pct = 0.0;   // 100 (1 - ||y_m - y_t|| / ||y_t - mean(y_t)||)
  double prior_violation = 0.0;
};

Score score(const RafModel& model, const RafModel& truth, int horizon,
            const Eigen::VectorXd& u, const ConstraintSet* cs = nullptr);

}  // namespace raf
