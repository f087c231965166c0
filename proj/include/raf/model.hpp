#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "raf/pole.hpp"

namespace raf {

struct FitDiagnostics {
  std::string status = "solved";  // solved | max_iterations | infeasible
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  bool warning = false;
  std::string message;
};

// Parallel first-order realization: G(z) = D + sum_m c_m / (1 - p_m z^-1),
// with one stored residue per conjugate pair (the conjugate is implied).
struct RafModel {
  PoleSet poles;
  std::vector<int> group_rep;      // pole index per stored residue
  std::vector<Complex> residues;   // c_m per group
  double feedthrough = 0.0;
  FitDiagnostics diagnostics;

  int group_count() const { return static_cast<int>(group_rep.size()); }
  bool group_is_real(int g) const {
    return poles.is_real(group_rep[static_cast<std::size_t>(g)]);
  }
  Complex group_pole(int g) const {
    return poles.poles[static_cast<std::size_t>(group_rep[static_cast<std::size_t>(g)])];
  }
  void validate() const;
};

struct BudgetReport {
  double settling = 0.0;   // sum |c_m| |p_m|^Ts
  double l1_tail = 0.0;    // sum |c_m| |p_m|^Ts / (1 - |p_m|)
  double bibo = 0.0;       // l1 tail at Ts = 0
  double step_tail = 0.0;  // sum |c_m| |p_m|^{t+1} / |1 - p_m|
  double dc_gain = 0.0;    // D + sum c_m / (1 - p_m)
};

BudgetReport budgets(const RafModel& model, int t_s, int t_step);

// G(e^{i omega}) on a grid in [0, pi].
std::vector<Complex> frequency_response(const RafModel& model,
                                        const std::vector<double>& omega);

// Impulse response of the realization: h(t) + D at t = 0.
Eigen::VectorXd impulse_response(const RafModel& model, int length);

// y = h * u + D u via per-pole state recursion.
Eigen::VectorXd simulate(const RafModel& model, const Eigen::VectorXd& u);

}  // namespace raf
