#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace raf {

using Complex = std::complex<double>;

// Snap threshold: poles with |Im p| below this are treated as real.
inline constexpr double kRealAxisSnap = 1e-12;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RadialLaw { UniformRadius, UniformArea, LogTimeConstant };

std::string to_string(RadialLaw law);
RadialLaw radial_law_from_string(const std::string& s);

// Admissible pole region: an annulus [rho_min, rho_max] crossed with a union
// of angle bands on [0, pi].  Conjugates are implied, never sampled.  A
// degenerate band [a,a] pins the angle exactly; include_real_axis appends the
// degenerate band [0,0] (positive real axis).
struct PoleRegion {
  double rho_min = 0.0;
  double rho_max = 0.95;
  std::vector<std::array<double, 2>> angle_bands = {{0.0, 3.14159265358979323846}};
  bool include_real_axis = false;
  RadialLaw radial_law = RadialLaw::UniformRadius;

  // Bands actually used for sampling (angle_bands plus the real axis when
  // requested), normalized and checked.  Throws ConfigError when invalid.
  std::vector<std::array<double, 2>> effective_bands() const;
  void validate() const;
  bool contains(Complex p, double tol = 1e-12) const;
};

// Sampled pole dictionary support.  Complex poles are stored adjacent to
// their conjugates; pair_index[i] is the partner index (i itself for real
// poles).  Im parts of a pair are bit-exact negations.
struct PoleSet {
  std::vector<Complex> poles;
  std::vector<int> pair_index;
  std::uint64_t seed = 0;
  PoleRegion region;

  int size() const { return static_cast<int>(poles.size()); }
  // Indices of group representatives: the real pole, or the pair member with
  // Im > 0 (stored first).
  std::vector<int> group_reps() const;
  int group_count() const { return static_cast<int>(group_reps().size()); }
  bool is_real(int i) const { return pair_index[i] == i; }
};

struct PairingReport {
  std::vector<int> orphans;  // complex poles without an exact conjugate partner
  bool valid() const { return orphans.empty(); }
};

PairingReport validate_pairing(const PoleSet& ps);

}  // namespace raf
