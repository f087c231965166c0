#include "raf/scenario.hpp"

#include <cmath>
#include <limits>

#include "raf/rng.hpp"

namespace raf {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

PoleRegion scenario_region() {
  PoleRegion region;
  region.rho_min = 0.85;
  region.rho_max = 0.95;
  region.angle_bands = {{0.3, 1.0}};
  region.include_real_axis = false;
  region.radial_law = RadialLaw::UniformRadius;
  return region;
}

ScenarioData make_scenario(const TwoModeParams& params, int N, double snr_db,
                           double bandwidth, std::uint64_t seed) {
  if (N < 2) throw ConfigError("scenario needs at least two samples");
  if (!(bandwidth > 0.0 && bandwidth <= kPi))
    throw ConfigError("bandwidth must lie in (0, pi]");
  if (!(std::abs(params.p1) < 1.0 && std::abs(params.p2) < 1.0))
    throw ConfigError("true poles must lie strictly inside the disk");

  ScenarioData out;
  out.truth.poles.poles = {params.p1, std::conj(params.p1), params.p2,
                           std::conj(params.p2)};
  out.truth.poles.pair_index = {1, 0, 3, 2};
  out.truth.poles.seed = seed;
  out.truth.poles.region = scenario_region();
  out.truth.group_rep = {0, 2};
  out.truth.residues = {params.c1, params.c2};
  out.truth.feedthrough = 0.0;
  out.truth.validate();

  out.filter_pole = 1.0 - bandwidth / kPi;

  Rng input_rng(Rng::derive(seed, 1));
  Eigen::VectorXd u(N);
  double state = 0.0;
  for (int t = 0; t < N; ++t) {
    state = out.filter_pole * state + input_rng.gaussian();
    u(t) = state;
  }

  out.y_clean = simulate(out.truth, u);

  Eigen::VectorXd noise = Eigen::VectorXd::Zero(N);
  double clean_power = out.y_clean.squaredNorm() / N;
  if (std::isinf(snr_db)) {
    out.noise_sigma = 0.0;
  } else {
    out.noise_sigma =
        std::sqrt(clean_power * std::pow(10.0, -snr_db / 10.0));
    Rng noise_rng(Rng::derive(seed, 2));
    for (int t = 0; t < N; ++t)
      noise(t) = out.noise_sigma * noise_rng.gaussian();
  }

  out.data.u = u;
  out.data.y = out.y_clean + noise;
  double noise_power = noise.squaredNorm() / N;
  out.empirical_snr_db =
      noise_power > 0.0
          ? 10.0 * std::log10(clean_power / noise_power)
          : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace raf
