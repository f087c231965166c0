#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "raf/conic.hpp"
#include "raf/model.hpp"

namespace raf {

struct AdmmSettings {
  double rho = 1.0;
  double alpha = 1.6;     // over-relaxation
  double eps_rel = 1e-8;
  double eps_abs = 1e-10;
  int max_iter = 50000;
  int check_every = 25;
  bool adaptive_rho = true;
  // Constraint feasibility required of a returned model, re-checked on the
  // physical variables after de-normalization.
  double feas_tol = 1e-6;
};

struct SolveInfo {
  std::string status = "solved";  // solved | max_iterations | infeasible
  int iterations = 0;
  double primal_residual = 0.0;   // relative, at exit
  double dual_residual = 0.0;
  double objective = 0.0;
  double max_violation = 0.0;     // worst cone violation of the returned point
  double rho_final = 0.0;
  std::string message;
};

struct SolveResult {
  Eigen::VectorXd x;
  SolveInfo info;
};

// Operator-splitting solve of the compiled conic program.  The quadratic
// block is handled by one cached factorization; the group penalty by its
// proximal map; cones by projection.  Infeasibility is reported through
// info.status (heuristic certificate: stalled primal residual with growing
// multipliers and bounded iterates).  A genuinely unconstrained ridge
// (lambda1 = 0, no cones) is solved directly.  `warm` optionally seeds the
// primal iterate.
SolveResult solve_conic(const ConicProblem& cp, const AdmmSettings& settings = {},
                        const Eigen::VectorXd* warm = nullptr);

// Solver-side coefficient vector (normalized coordinates, epigraph block and
// feedthrough included) matching the given physical residues.
Eigen::VectorXd pack_solution(const ConicProblem& cp,
                              const std::vector<Complex>& residues,
                              double feedthrough);

struct FitReport {
  bool feasible = true;
  RafModel model;
  SolveInfo info;
};

RafModel assemble_model(const ConicProblem& cp, const Eigen::VectorXd& x,
                        const SolveInfo& info);

// solve_conic + de-normalization into a model.  feasible=false carries the
// infeasibility report instead of a model.
FitReport fit(const ConicProblem& cp, const AdmmSettings& settings = {},
              const Eigen::VectorXd* warm = nullptr);

// One-pass reweighting heuristic: solve, set w_g = 1 / (||x_g|| + 1e-4),
// solve again.  Flagged in the model diagnostics.
FitReport fit_reweighted(ConicProblem cp, const AdmmSettings& settings = {},
                         const Eigen::VectorXd* warm = nullptr);

// Numerical ridge default: 1e-8 * trace(B^T B) / n_cols of the design.
double default_lambda2(const Dictionary& dict);

struct PruneResult {
  RafModel model;
  std::vector<int> active_groups;  // indices into the original dictionary
  bool empty_model = false;
};

// Drops groups with ||c_g|| < rel_tol * max_g ||c_g||, then refits the
// retained groups by constrained least squares (same priors, no group
// penalty).
PruneResult prune(const RafModel& model, const Dictionary& dict,
                  const TimeSeries& data, const ConstraintSet& cs,
                  double rel_tol, double lambda2, bool fit_d,
                  const AdmmSettings& settings = {});

}  // namespace raf
