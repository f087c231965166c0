#pragma once

#include <Eigen/Dense>
#include <vector>

#include "raf/constraints.hpp"
#include "raf/dictionary.hpp"
#include "raf/model.hpp"

namespace raf {

// Variable vector x = [coefficients | feedthrough D? | epigraph a_g?].
struct VariableLayout {
  int n_coeff = 0;
  int d_index = -1;   // -1 when D is fixed at zero
  int a_offset = -1;  // -1 when no epigraph block
  int n_groups = 0;
  int total = 0;
};

// min 1/2 ||y - B x||^2 + lambda2 ||x_coeff||^2
//     + lambda1 sum_g w_g ||x_g||_2
// s.t. H x + h in Zero^{n_zero} x NonNeg^{n_nonneg} x SOC(dims).
// Cone rows are stacked in that order.
struct ConicProblem {
  Eigen::MatrixXd B;  // prediction map over all variables (zeros on a block)
  Eigen::VectorXd y;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::vector<double> group_weights;
  std::vector<std::vector<int>> groups;  // coefficient indices per group

  Eigen::MatrixXd H;
  Eigen::VectorXd h;
  int n_zero = 0;
  int n_nonneg = 0;
  std::vector<int> soc_dims;

  VariableLayout layout;

  // carried through for de-normalization and model assembly
  PoleSet pole_set;
  std::vector<int> group_rep;
  std::vector<double> norms;

  int cone_rows() const;
  void validate() const;
};

// Compiles the fitting objective and the declared priors over the normalized
// dictionary variables. Every constraint row composes the per-group
// de-normalization, so cones act on physical residues while the solver sees
// one variable set.
ConicProblem compile(const Dictionary& dict, const TimeSeries& data,
                     double lambda1, double lambda2, const ConstraintSet& cs,
                     bool fit_d);

// Worst violation of the declared priors by a physical model, re-evaluated
// outside the solver (0 when everything holds).  Data-dependent boxes and
// windows are checked only when data is given.
double prior_violation(const RafModel& model, const ConstraintSet& cs,
                       const TimeSeries* data = nullptr);

}  // namespace raf
