#include "raf/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "raf/rng.hpp"

namespace raf {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::string to_string(RadialLaw law) {
  switch (law) {
    case RadialLaw::UniformRadius: return "uniform-in-radius";
    case RadialLaw::UniformArea: return "uniform-in-area";
    case RadialLaw::LogTimeConstant: return "log-time-constant";
  }
  return "uniform-in-radius";
}

RadialLaw radial_law_from_string(const std::string& s) {
  if (s == "uniform-in-radius") return RadialLaw::UniformRadius;
  if (s == "uniform-in-area") return RadialLaw::UniformArea;
  if (s == "log-time-constant") return RadialLaw::LogTimeConstant;
  throw ConfigError("unknown radial law: " + s);
}

std::vector<std::array<double, 2>> PoleRegion::effective_bands() const {
  std::vector<std::array<double, 2>> bands = angle_bands;
  if (include_real_axis) bands.push_back({0.0, 0.0});
  std::sort(bands.begin(), bands.end(),
            [](const auto& a, const auto& b) { return a[0] < b[0]; });
  // Merge duplicated degenerate bands.
  bands.erase(std::unique(bands.begin(), bands.end()), bands.end());
  return bands;
}

void PoleRegion::validate() const {
  if (!(rho_min >= 0.0) || !(rho_max < 1.0) || !(rho_max >= rho_min))
    throw ConfigError("pole region radii must satisfy 0 <= rho_min <= rho_max < 1");
  if (radial_law == RadialLaw::LogTimeConstant && rho_min <= 0.0)
    throw ConfigError("log-time-constant law requires rho_min > 0");
  auto bands = effective_bands();
  if (bands.empty())
    throw ConfigError("pole region has no angle bands");
  double prev_end = -1.0;
  for (const auto& b : bands) {
    if (!(b[0] >= 0.0) || !(b[1] <= kPi) || !(b[1] >= b[0]))
      throw ConfigError("angle bands must be ordered subintervals of [0, pi]");
    if (b[0] < prev_end - 1e-15)
      throw ConfigError("angle bands overlap");
    prev_end = b[1];
  }
}

bool PoleRegion::contains(Complex p, double tol) const {
  double r = std::abs(p);
  if (r < rho_min - tol || r > rho_max + tol) return false;
  double theta = std::abs(std::arg(p));  // [0, pi]
  for (const auto& b : effective_bands())
    if (theta >= b[0] - tol && theta <= b[1] + tol) return true;
  return false;
}

std::vector<int> PoleSet::group_reps() const {
  std::vector<int> reps;
  for (int i = 0; i < size(); ++i)
    if (pair_index[i] >= i) reps.push_back(i);
  return reps;
}

PairingReport validate_pairing(const PoleSet& ps) {
  PairingReport rep;
  const int n = ps.size();
  for (int i = 0; i < n; ++i) {
    const Complex& p = ps.poles[i];
    if (p.imag() == 0.0) {
      if (ps.pair_index[i] != i) rep.orphans.push_back(i);
      continue;
    }
    int j = ps.pair_index[i];
    if (j < 0 || j >= n || j == i) {
      rep.orphans.push_back(i);
      continue;
    }
    const Complex& q = ps.poles[j];
    // Bit-exact conjugate: same re, negated im.
    if (!(q.real() == p.real() && q.imag() == -p.imag()) || ps.pair_index[j] != i)
      rep.orphans.push_back(i);
  }
  return rep;
}

namespace {

double draw_radius(const PoleRegion& rg, Rng& rng) {
  const double lo = rg.rho_min, hi = rg.rho_max;
  if (hi == lo) return lo;
  double u = rng.uniform();
  switch (rg.radial_law) {
    case RadialLaw::UniformRadius:
      return lo + u * (hi - lo);
    case RadialLaw::UniformArea:
      return std::sqrt(lo * lo + u * (hi * hi - lo * lo));
    case RadialLaw::LogTimeConstant: {
      double a_lo = -std::log(hi), a_hi = -std::log(lo);
      return std::exp(-(a_lo + u * (a_hi - a_lo)));
    }
  }
  return lo;
}

double draw_angle(const std::vector<std::array<double, 2>>& bands, Rng& rng) {
  double total = 0.0;
  for (const auto& b : bands) total += b[1] - b[0];
  if (total <= 0.0) {
    // All bands degenerate: pick one uniformly.
    size_t k = static_cast<size_t>(rng.uniform() * static_cast<double>(bands.size()));
    if (k >= bands.size()) k = bands.size() - 1;
    return bands[k][0];
  }
  double x = rng.uniform() * total;
  for (const auto& b : bands) {
    double len = b[1] - b[0];
    if (x <= len) return b[0] + x;
    x -= len;
  }
  return bands.back()[1];
}

}  // namespace

PoleSet sample_poles(const PoleRegion& region, int M, std::uint64_t seed) {
  region.validate();
  if (M < 1) throw ConfigError("sample count M must be >= 1");

  PoleSet ps;
  ps.seed = seed;
  ps.region = region;
  ps.poles.reserve(2 * static_cast<size_t>(M));
  ps.pair_index.reserve(2 * static_cast<size_t>(M));

  const auto bands = region.effective_bands();
  Rng rng(seed);
  for (int g = 0; g < M; ++g) {
    double r = draw_radius(region, rng);
    double theta = draw_angle(bands, rng);
    double re = r * std::cos(theta);
    double im = r * std::sin(theta);
    if (std::abs(im) < kRealAxisSnap) {
      // Real pole: keep the signed radius (theta near 0 or pi).
      double val = std::copysign(r, std::cos(theta));
      int i = ps.size();
      ps.poles.emplace_back(val, 0.0);
      ps.pair_index.push_back(i);
    } else {
      int i = ps.size();
      ps.poles.emplace_back(re, im);
      ps.poles.emplace_back(re, -im);
      ps.pair_index.push_back(i + 1);
      ps.pair_index.push_back(i);
    }
  }
  return ps;
}

}  // namespace raf
