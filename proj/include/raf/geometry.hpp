#pragma once

#include <Eigen/Dense>
#include <vector>

#include "raf/pole.hpp"

namespace raf {

// Finite-horizon Gram entry of two pole atoms,
// G_ij = sum_{t<T} (conj(p_i) p_j)^t = (1 - (conj(p_i) p_j)^T) / (1 - conj(p_i) p_j),
// evaluated by series summation near the removable singularity conj(p_i)p_j -> 1.
Complex gram_closed_form(Complex p_i, Complex p_j, int T);

// Pairwise coherence |G_ij| / sqrt(G_ii G_jj) over horizon T, in [0,1].
double coherence_finite(Complex p_i, Complex p_j, int T);

// Infinite-horizon coherence sqrt((1-|p_i|^2)(1-|p_j|^2)) / |1 - conj(p_i) p_j|.
double coherence_infinite(Complex p_i, Complex p_j);

// Pseudo-hyperbolic distance |p - q| / |1 - conj(p) q| on the open disk.
double pseudo_hyperbolic(Complex p, Complex q);

struct GershgorinResult {
  double mu_s = 0.0;      // max off-diagonal coherence on the support
  double bound = 0.0;     // 1 - (s-1) mu_s
  double min_eig = 0.0;   // smallest eigenvalue of the normalized sub-Gram
};

// Normalized sub-Gram spectral check for a candidate support (|S| >= 2).
GershgorinResult gershgorin_check(const std::vector<Complex>& support, int T);

// Pairwise coherence diagnostics for a full pole list.
struct CoherenceReport {
  Eigen::MatrixXd mu;        // pairwise mu_T (1 on the diagonal)
  double mu_max = 0.0;       // max off-diagonal coherence
  double gershgorin_bound = 0.0;  // 1 - (n-1) mu_max
  double min_eig = 0.0;      // min eigenvalue of the full normalized Gram
  int horizon = 0;
};

CoherenceReport coherence_report(const std::vector<Complex>& poles, int T);

struct PoleCluster {
  std::vector<int> members;  // sorted input indices
  Complex representative;    // weight-averaged centroid, kept inside the disk
};

// Single-linkage clustering under the pseudo-hyperbolic metric; poles closer
// than `radius_threshold` are linked.  Clusters are ordered by their lowest
// member index.
std::vector<PoleCluster> cluster_active(const std::vector<Complex>& poles,
                                        const std::vector<double>& weights,
                                        double radius_threshold);

}  // namespace raf
