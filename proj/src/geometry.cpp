#include "raf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace raf {

namespace {

struct DomainCheck {
  static void inside_open_disk(Complex p, const char* what) {
    if (!(std::abs(p) < 1.0))
      throw ConfigError(std::string(what) + " requires |p| < 1");
  }
};

// Real diagonal Gram sum_{t<T} |p|^{2t}.
double gram_diag(Complex p, int T) {
  double x = std::norm(p);
  if (std::abs(1.0 - x) < 1e-8) {
    double s = 0.0, term = 1.0;
    for (int t = 0; t < T; ++t) {
      s += term;
      term *= x;
    }
    return s;
  }
  return (1.0 - std::pow(x, T)) / (1.0 - x);
}

}  // namespace

Complex gram_closed_form(Complex p_i, Complex p_j, int T) {
  if (T < 1) throw ConfigError("horizon must be >= 1");
  const Complex x = std::conj(p_i) * p_j;
  if (std::abs(Complex(1.0, 0.0) - x) < 1e-8) {
    // Removable singularity: the naive quotient loses all precision here.
    Complex s(0.0, 0.0), term(1.0, 0.0);
    for (int t = 0; t < T; ++t) {
      s += term;
      term *= x;
    }
    return s;
  }
  Complex xT(1.0, 0.0);
  // pow on complex is not guaranteed monotone-accurate; repeated squaring.
  {
    Complex base = x;
    int e = T;
    while (e > 0) {
      if (e & 1) xT *= base;
      base *= base;
      e >>= 1;
    }
  }
  return (Complex(1.0, 0.0) - xT) / (Complex(1.0, 0.0) - x);
}

double coherence_finite(Complex p_i, Complex p_j, int T) {
  double gii = gram_diag(p_i, T);
  double gjj = gram_diag(p_j, T);
  Complex gij = gram_closed_form(p_i, p_j, T);
  return std::abs(gij) / std::sqrt(gii * gjj);
}

double coherence_infinite(Complex p_i, Complex p_j) {
  DomainCheck::inside_open_disk(p_i, "coherence_infinite");
  DomainCheck::inside_open_disk(p_j, "coherence_infinite");
  double num = std::sqrt((1.0 - std::norm(p_i)) * (1.0 - std::norm(p_j)));
  return num / std::abs(Complex(1.0, 0.0) - std::conj(p_i) * p_j);
}

double pseudo_hyperbolic(Complex p, Complex q) {
  DomainCheck::inside_open_disk(p, "pseudo_hyperbolic");
  DomainCheck::inside_open_disk(q, "pseudo_hyperbolic");
  return std::abs(p - q) / std::abs(Complex(1.0, 0.0) - std::conj(p) * q);
}

GershgorinResult gershgorin_check(const std::vector<Complex>& support, int T) {
  const int s = static_cast<int>(support.size());
  if (s < 2) throw ConfigError("gershgorin_check needs a support of size >= 2");
  Eigen::MatrixXcd G(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      G(i, j) = gram_closed_form(support[i], support[j], T) /
                std::sqrt(gram_diag(support[i], T) * gram_diag(support[j], T));
  GershgorinResult out;
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      if (i != j) out.mu_s = std::max(out.mu_s, std::abs(G(i, j)));
  out.bound = 1.0 - (s - 1) * out.mu_s;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
  out.min_eig = es.eigenvalues().minCoeff();
  return out;
}

CoherenceReport coherence_report(const std::vector<Complex>& poles, int T) {
  const int n = static_cast<int>(poles.size());
  CoherenceReport rep;
  rep.horizon = T;
  rep.mu.resize(n, n);
  for (int i = 0; i < n; ++i) {
    rep.mu(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      double m = coherence_finite(poles[i], poles[j], T);
      rep.mu(i, j) = rep.mu(j, i) = m;
      rep.mu_max = std::max(rep.mu_max, m);
    }
  }
  rep.gershgorin_bound = 1.0 - (n - 1) * rep.mu_max;
  if (n >= 2) {
    GershgorinResult g = gershgorin_check(poles, T);
    rep.min_eig = g.min_eig;
  } else {
    rep.min_eig = 1.0;
  }
  return rep;
}

std::vector<PoleCluster> cluster_active(const std::vector<Complex>& poles,
                                        const std::vector<double>& weights,
                                        double radius_threshold) {
  const int n = static_cast<int>(poles.size());
  if (n == 0) return {};
  if (weights.size() != poles.size())
    throw ConfigError("cluster_active: weights size mismatch");
  for (double w : weights)
    if (w < 0.0) throw ConfigError("cluster_active: negative weight");

  // Union-find; ties and ordering resolved by lowest index.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (pseudo_hyperbolic(poles[i], poles[j]) < radius_threshold) {
        int ra = find(i), rb = find(j);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }

  std::vector<PoleCluster> clusters;
  std::vector<int> root_to_cluster(n, -1);
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    if (root_to_cluster[r] < 0) {
      root_to_cluster[r] = static_cast<int>(clusters.size());
      clusters.push_back({});
    }
    clusters[root_to_cluster[r]].members.push_back(i);
  }
  for (auto& c : clusters) {
    double wsum = 0.0;
    Complex acc(0.0, 0.0);
    for (int i : c.members) {
      acc += weights[i] * poles[i];
      wsum += weights[i];
    }
    if (wsum > 0.0) {
      c.representative = acc / wsum;
    } else {
      Complex mean(0.0, 0.0);
      for (int i : c.members) mean += poles[i];
      c.representative = mean / static_cast<double>(c.members.size());
    }
    double r = std::abs(c.representative);
    if (r >= 1.0) c.representative *= (1.0 - 1e-9) / r;
  }
  return clusters;
}

}  // namespace raf
