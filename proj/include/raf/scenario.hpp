#pragma once

#include <complex>
#include <cstdint>

#include "raf/dictionary.hpp"
#include "raf/model.hpp"

namespace raf {

// Two underdamped modes inside the sector {r in [0.85, 0.95],
// theta in [0.3, 1]}; the budgets of the default system stay inside
// h_max = 55 and |G(1)| <= 4.
struct TwoModeParams {
  Complex p1 = std::polar(0.9, 0.4);
  Complex p2 = std::polar(0.88, 0.8);
  Complex c1{1.0, 0.0};
  Complex c2{0.5, -0.4};
};

struct ScenarioData {
  TimeSeries data;          // low-pass input u, noisy output y
  Eigen::VectorXd y_clean;
  RafModel truth;
  double noise_sigma = 0.0;
  double empirical_snr_db = 0.0;
  double filter_pole = 0.0;  // input filter: u(t) = a u(t-1) + e(t)
};

// Simulates the true two-mode system driven by low-pass filtered unit white
// noise (filter pole a = 1 - bandwidth/pi; bandwidth = pi gives white input)
// and adds white Gaussian noise scaled to the requested output SNR in dB
// (infinite snr_db means no noise).
ScenarioData make_scenario(const TwoModeParams& params, int N, double snr_db,
                           double bandwidth, std::uint64_t seed);

// The sector region the default scenario's poles live in.
PoleRegion scenario_region();

}  // namespace raf
