#pragma once

#include <optional>
#include <vector>

#include "raf/pole.hpp"

namespace raf {

// Per-sample bounds on the fit residual: |y(t) - yhat(t)| <= eps(t).
// A single entry broadcasts to every sample.
struct TimeBox {
  std::vector<double> eps;
};

// ||W (y - yhat)||_2 <= eta over an index window [lo, hi); optional diagonal
// weights of length hi - lo (all ones when empty).
struct WindowRms {
  int lo = 0;
  int hi = 0;
  std::vector<double> weights;
  double eta = 0.0;
};

// |G(e^{i omega_k})| <= gamma_k on a grid in [0, pi].
struct FreqMask {
  std::vector<double> omega;
  std::vector<double> gamma;
};

struct Settling {
  int t_s = 0;
  double eps_h = 0.0;
};

struct L1Tail {
  int t_s = 0;
  double budget = 0.0;
};

struct Bibo {
  double h_max = 0.0;
};

// Diagnostic only: evaluated by budget reports, never compiled.
struct StepTail {
  int t = 0;
  double budget = 0.0;
};

struct RelativeDegree {
  int r_d = 0;
};

struct DcEqual {
  double g0 = 0.0;
};

struct DcBound {
  double g_max = 0.0;
};

struct ConstraintSet {
  std::optional<TimeBox> time_box;
  std::vector<WindowRms> windows;
  std::optional<FreqMask> freq_mask;
  std::optional<Settling> settling;
  std::optional<L1Tail> l1_tail;
  std::optional<Bibo> bibo;
  std::optional<StepTail> step_tail;
  std::optional<RelativeDegree> relative_degree;
  std::optional<DcEqual> dc_equal;
  std::optional<DcBound> dc_bound;
  bool monotone = false;

  bool empty() const;
  bool needs_epigraph() const;
  void validate(int horizon) const;
};

}  // namespace raf
