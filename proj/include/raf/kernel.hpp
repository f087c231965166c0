#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "raf/pole.hpp"

namespace raf {

// Finite nonnegative atomic measure on the closed unit disk.
struct AtomicMeasure {
  std::vector<Complex> atoms;
  std::vector<double> weights;

  void validate() const;
  double total_mass() const;
  double rho() const;  // max atom radius
};

enum class KernelProvenance { Atomic, Empirical, Counterexample };

// Hermitian moment kernel K(s,t) on time indices 0..T (size T+1).
struct KernelMatrix {
  Eigen::MatrixXcd K;
  int horizon = 0;
  KernelProvenance provenance = KernelProvenance::Atomic;

  int size() const { return static_cast<int>(K.rows()); }
};

// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const Eigen::MatrixXcd& M);

// K(s,t) = sum_j w_j p_j^s conj(p_j)^t, s,t = 0..T.
KernelMatrix kernel_atomic(const AtomicMeasure& mu, int T);

// Uniform-weight atomic kernel over every pole of the set (weight 1/#poles).
KernelMatrix kernel_empirical(const PoleSet& ps, int T);

AtomicMeasure measure_from_poles(const PoleSet& ps);

struct RadiusDefect {
  Eigen::MatrixXcd D;  // rho^2 K(s,t) - K(s+1,t+1) on indices 0..T-1
  double min_eig = 0.0;
};

RadiusDefect radius_defect(const KernelMatrix& K, double rho);

// True iff the radius defect is PSD up to -tol_rel * trace(K); equivalent to
// the canonical shift having norm at most rho.
bool shift_contractivity_check(const KernelMatrix& K, double rho,
                               double tol_rel = 1e-10);

struct EmbeddingBound {
  double lhs = 0.0;       // truncated l1 sum plus certified geometric tail
  double rhs = 0.0;       // sqrt(mass)/(1-rho) * ||h||_H
  double rkhs_norm = 0.0;
  int truncation = 0;
};

// For h = sum_t a_t K(.,t): certifies sum_t |h(t)| <= sqrt(||mu||)/(1-rho) ||h||_H.
// The tail beyond the truncation horizon is bounded atom-by-atom.
EmbeddingBound embedding_bound_check(const AtomicMeasure& mu,
                                     const Eigen::VectorXd& coeffs,
                                     int truncation = 2000);

// Exact moment kernel of a pole region's sampling law (radius law x uniform
// angle over the band union, symmetrized over conjugation).
KernelMatrix region_law_kernel(const PoleRegion& region, int T);

struct TailCurve {
  std::vector<double> eps;
  std::vector<double> empirical_rate;  // Pr(max-entry error > eps), estimated
  std::vector<double> hoeffding_bound; // 4 (T+1)^2 exp(-M eps^2 / 8)
};

struct HoeffdingReport {
  int M = 0;
  int T = 0;
  int trials = 0;
  std::vector<double> errors;  // per-trial max-entry deviation
  double mean_error = 0.0;
  double max_error = 0.0;
  TailCurve curve;
};

// Monte Carlo tail experiment: samples `trials` dictionaries of M groups,
// measures max-entry deviation of the empirical kernel from the region-law
// kernel, and tabulates the empirical exceedance rate against the stated
// sub-Gaussian envelope over an epsilon grid.
HoeffdingReport hoeffding_experiment(const PoleRegion& region, int M, int T,
                                     int trials, std::uint64_t seed,
                                     std::vector<double> eps_grid = {});

struct AmlsCoordinates {
  double alpha = 0.0;  // decay rate -log|p|
  double omega = 0.0;  // oscillation angle arg(p)
  bool finite = true;  // false for p = 0 (infinite decay)
};

AmlsCoordinates amls_transform(Complex p);
Complex amls_inverse(const AmlsCoordinates& c);

struct CounterexampleReport {
  Eigen::MatrixXcd K;
  bool diag_ok = false;        // diagonal exactly (1, 1, 0, 0, ...)
  bool kernel_psd = false;
  bool defect_psd = false;     // unit-radius defect
  bool lp_infeasible = false;  // radial-grid moment system has no w >= 0
  double lp_residual = 0.0;    // min ||A w - b|| over w >= 0
};

// Gram kernel of the nilpotent 2x2 shift: PSD and shift-contractive, yet the
// diagonal moments (1, 1, 0, ...) admit no nonnegative disk measure.
CounterexampleReport counterexample_check(int T = 8, double grid_step = 0.05);

struct PickData {
  std::vector<Complex> nodes;   // |zeta_i| < 1, distinct
  std::vector<Complex> values;  // scalar W_i
  void validate() const;
};

struct PickResult {
  Eigen::MatrixXcd P;  // (1 - W_i conj(W_j)) / (1 - zeta_i conj(zeta_j))
  double min_eig = 0.0;
  bool psd = false;
};

PickResult pick_matrix(const PickData& data);

struct NormalizedKernel {
  KernelMatrix K;            // K(s,t) / (gamma^2 rho^{s+t})
  double max_identity_dev = 0.0;  // defect-identity check, relative
};

// Radius-normalized kernel, with the entrywise defect identity
// Ktilde(s,t) - Ktilde(s+1,t+1) = (rho^2 K(s,t) - K(s+1,t+1)) / (gamma^2 rho^{s+t+2})
// re-verified numerically.
NormalizedKernel normalized_kernel(const KernelMatrix& K, double rho, double gamma);

// Nonnegative least squares min ||A w - b||_2 s.t. w >= 0 (Lawson-Hanson).
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     int max_iter = 1000);

}  // namespace raf
