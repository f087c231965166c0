#pragma once

#include <Eigen/Dense>
#include <vector>

#include "raf/pole.hpp"

namespace raf {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TimeSeries {
  Eigen::VectorXd u;
  Eigen::VectorXd y;  // may be empty when only an input is known

  int length() const { return static_cast<int>(u.size()); }
  void validate() const;
};

// Real-valued design built from a pole set over a finite horizon.  A real
// pole contributes one column p^t (or its convolution with u); a conjugate
// pair (p, conj p) with residue c contributes the two columns 2*Re(p^t) and
// -2*Im(p^t) carrying the real coefficients (Re c, Im c).
//
// Normalization is per group: eta_g is the Frobenius norm of the group's
// column block (the pair's joint column norm), so both columns of a pair are
// scaled by the same eta and the group penalty ||c_g||_2 does not depend on
// the residue phase.  Physical residues are recovered as coeff / eta_g.
struct Dictionary {
  PoleSet pole_set;
  int horizon = 0;
  Eigen::MatrixXd columns;              // horizon x n_real
  std::vector<std::vector<int>> groups; // column indices per group
  std::vector<int> group_rep;           // pole index of each group representative
  std::vector<double> norms;            // eta per group (1.0 until normalized)
  bool normalized = false;
  bool convolved = false;               // built from an input, not an impulse

  int n_cols() const { return static_cast<int>(columns.cols()); }
  int n_groups() const { return static_cast<int>(groups.size()); }
};

// Vandermonde matrix Phi(t,m) = p_m^t, t = 0..T-1 (0^0 := 1).
Eigen::MatrixXcd vandermonde(const PoleSet& ps, int T);

// Unnormalized real-split impulse-response design over horizon T.
Dictionary real_split(const PoleSet& ps, int T);

// Unnormalized real-split input-convolved design: column m is the causal
// convolution of p_m^t with u, via the state recursion
// x(0) = u(0), x(t+1) = p*x(t) + u(t+1).
Dictionary convolved_design(const PoleSet& ps, const Eigen::VectorXd& u);

// Scales every group block to unit Frobenius norm and records eta.
// Throws NumericalError on a zero group (degenerate input).
Dictionary normalize_columns(Dictionary d);

// Restriction of a dictionary to the listed groups (ascending, deduplicated
// internally).  Pole set, columns, norms and group metadata are re-indexed.
Dictionary subset_groups(const Dictionary& d, const std::vector<int>& keep);

// Physical complex residues per group from the solver-side coefficient
// vector (normalized coordinates): c_g = (coeff_a + i*coeff_b) / eta_g for
// pairs, real coeff / eta_g for real poles.
std::vector<Complex> denormalize_residues(const Dictionary& d,
                                          const Eigen::VectorXd& coeffs);

struct GaugeResult {
  bool out_of_span = false;
  double value = 0.0;                 // +inf-flag is out_of_span
  Eigen::VectorXd coefficients;       // normalized coordinates, per column
  std::vector<Complex> atom_weights;  // complex d per group (normalized atoms)
  std::vector<Complex> residues;      // physical residues per group
};

// Finite atomic gauge of h over the dictionary's normalized atoms:
// minimize sum_g ||coeff_g||_2 subject to ||columns*coeff - h|| <= tol*||h||.
GaugeResult atomic_gauge(const Eigen::VectorXd& h, const Dictionary& d,
                         double reconstruction_tol = 1e-8);

}  // namespace raf
