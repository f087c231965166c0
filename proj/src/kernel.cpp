#include "raf/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "raf/rng.hpp"
#include "raf/sampling.hpp"

namespace raf {

namespace {

Eigen::MatrixXcd vandermonde_cols(const std::vector<Complex>& atoms, int T) {
  Eigen::MatrixXcd V(T + 1, static_cast<int>(atoms.size()));
  for (int j = 0; j < static_cast<int>(atoms.size()); ++j) {
    Complex acc{1.0, 0.0};
    for (int t = 0; t <= T; ++t) {
      V(t, j) = acc;
      acc *= atoms[static_cast<std::size_t>(j)];
    }
  }
  return V;
}

}  // namespace

void AtomicMeasure::validate() const {
  if (atoms.size() != weights.size())
    throw ConfigError("measure atoms/weights size mismatch");
  for (double w : weights)
    if (!(w >= 0.0)) throw ConfigError("measure weight must be nonnegative");
  for (const Complex& p : atoms)
    if (!(std::abs(p) < 1.0))
      throw ConfigError("measure atom outside the open unit disk");
}

double AtomicMeasure::total_mass() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

double AtomicMeasure::rho() const {
  double r = 0.0;
  for (const Complex& p : atoms) r = std::max(r, std::abs(p));
  return r;
}

double min_eigenvalue(const Eigen::MatrixXcd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M,
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

KernelMatrix kernel_atomic(const AtomicMeasure& mu, int T) {
  mu.validate();
  if (T < 0) throw ConfigError("kernel horizon must be nonnegative");
  Eigen::MatrixXcd V = vandermonde_cols(mu.atoms, T);
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(
      mu.weights.data(), static_cast<int>(mu.weights.size()));
  KernelMatrix out;
  out.K = V * w.asDiagonal() * V.adjoint();
  out.horizon = T;
  out.provenance = KernelProvenance::Atomic;
  return out;
}

AtomicMeasure measure_from_poles(const PoleSet& ps) {
  AtomicMeasure mu;
  const std::size_t n = ps.poles.size();
  if (n == 0) throw ConfigError("empty pole set");
  mu.atoms = ps.poles;
  mu.weights.assign(n, 1.0 / static_cast<double>(n));
  return mu;
}

KernelMatrix kernel_empirical(const PoleSet& ps, int T) {
  KernelMatrix out = kernel_atomic(measure_from_poles(ps), T);
  out.provenance = KernelProvenance::Empirical;
  return out;
}

RadiusDefect radius_defect(const KernelMatrix& K, double rho) {
  if (!(rho > 0.0)) throw ConfigError("radius must be positive");
  const int T = K.horizon;
  if (T < 1) throw ConfigError("radius defect needs horizon >= 1");
  RadiusDefect d;
  d.D = rho * rho * K.K.topLeftCorner(T, T) - K.K.bottomRightCorner(T, T);
  d.min_eig = min_eigenvalue(d.D);
  return d;
}

bool shift_contractivity_check(const KernelMatrix& K, double rho,
                               double tol_rel) {
  RadiusDefect d = radius_defect(K, rho);
  double scale = std::max(1.0, K.K.real().trace());
  return d.min_eig >= -tol_rel * scale;
}

EmbeddingBound embedding_bound_check(const AtomicMeasure& mu,
                                     const Eigen::VectorXd& coeffs,
                                     int truncation) {
  mu.validate();
  if (coeffs.size() == 0) throw ConfigError("empty coefficient vector");
  const int L = static_cast<int>(coeffs.size());
  const int J = static_cast<int>(mu.atoms.size());

  // h(s) = sum_j w_j A_j p_j^s with A_j = sum_t coeffs(t) conj(p_j)^t.
  Eigen::VectorXcd A(J);
  for (int j = 0; j < J; ++j) {
    Complex pb = std::conj(mu.atoms[static_cast<std::size_t>(j)]);
    Complex acc{1.0, 0.0};
    Complex s{0.0, 0.0};
    for (int t = 0; t < L; ++t) {
      s += coeffs(t) * acc;
      acc *= pb;
    }
    A(j) = s;
  }

  KernelMatrix K = kernel_atomic(mu, L - 1);
  double norm_sq = (coeffs.transpose() * K.K.real() * coeffs)(0);
  norm_sq = std::max(norm_sq, 0.0);

  EmbeddingBound out;
  out.rkhs_norm = std::sqrt(norm_sq);
  out.truncation = truncation;

  double head = 0.0;
  double comp = 0.0;  // Kahan compensation
  std::vector<Complex> pw(static_cast<std::size_t>(J), Complex{1.0, 0.0});
  for (int s = 0; s <= truncation; ++s) {
    Complex hs{0.0, 0.0};
    for (int j = 0; j < J; ++j) {
      hs += mu.weights[static_cast<std::size_t>(j)] * A(j) *
            pw[static_cast<std::size_t>(j)];
      pw[static_cast<std::size_t>(j)] *= mu.atoms[static_cast<std::size_t>(j)];
    }
    double term = std::abs(hs) - comp;
    double next = head + term;
    comp = (next - head) - term;
    head = next;
  }
  // |h(s)| <= sum_j w_j |A_j| |p_j|^s termwise, summed past the truncation.
  double tail = 0.0;
  for (int j = 0; j < J; ++j) {
    double r = std::abs(mu.atoms[static_cast<std::size_t>(j)]);
    tail += mu.weights[static_cast<std::size_t>(j)] * std::abs(A(j)) *
            std::pow(r, truncation + 1) / (1.0 - r);
  }
  out.lhs = head + tail;
  out.rhs = std::sqrt(mu.total_mass()) / (1.0 - mu.rho()) * out.rkhs_norm;
  return out;
}

namespace {

// E[r^k] for the region's radial law on [lo, hi].
double radial_moment(const PoleRegion& region, int k) {
  const double lo = region.rho_min;
  const double hi = region.rho_max;
  if (k == 0) return 1.0;
  if (hi - lo < 1e-15) return std::pow(hi, k);
  switch (region.radial_law) {
    case RadialLaw::UniformRadius:
      return (std::pow(hi, k + 1) - std::pow(lo, k + 1)) /
             ((k + 1) * (hi - lo));
    case RadialLaw::UniformArea:
      return 2.0 * (std::pow(hi, k + 2) - std::pow(lo, k + 2)) /
             ((k + 2) * (hi * hi - lo * lo));
    case RadialLaw::LogTimeConstant: {
      double a_lo = -std::log(hi);
      double a_hi = -std::log(lo);
      return (std::pow(hi, k) - std::pow(lo, k)) / (k * (a_hi - a_lo));
    }
  }
  throw ConfigError("unknown radial law");
}

// E[cos(k theta)] for theta uniform on the band union (length-weighted).
double angle_cos_moment(const std::vector<std::array<double, 2>>& bands,
                        int k) {
  if (k == 0) return 1.0;
  double total = 0.0;
  for (const auto& b : bands) total += b[1] - b[0];
  double m = 0.0;
  if (total < 1e-15) {
    for (const auto& b : bands) m += std::cos(k * b[0]);
    return m / static_cast<double>(bands.size());
  }
  for (const auto& b : bands) {
    if (b[1] - b[0] < 1e-15) continue;
    m += (std::sin(k * b[1]) - std::sin(k * b[0])) / static_cast<double>(k);
  }
  return m / total;
}

}  // namespace

KernelMatrix region_law_kernel(const PoleRegion& region, int T) {
  region.validate();
  if (T < 0) throw ConfigError("kernel horizon must be nonnegative");
  auto bands = region.effective_bands();
  std::vector<double> R(static_cast<std::size_t>(2 * T + 1));
  for (int k = 0; k <= 2 * T; ++k)
    R[static_cast<std::size_t>(k)] = radial_moment(region, k);
  std::vector<double> C(static_cast<std::size_t>(T + 1));
  for (int k = 0; k <= T; ++k)
    C[static_cast<std::size_t>(k)] = angle_cos_moment(bands, k);

  KernelMatrix out;
  out.K.resize(T + 1, T + 1);
  for (int s = 0; s <= T; ++s)
    for (int t = 0; t <= T; ++t)
      out.K(s, t) = R[static_cast<std::size_t>(s + t)] *
                    C[static_cast<std::size_t>(std::abs(s - t))];
  out.horizon = T;
  out.provenance = KernelProvenance::Atomic;
  return out;
}

HoeffdingReport hoeffding_experiment(const PoleRegion& region, int M, int T,
                                     int trials, std::uint64_t seed,
                                     std::vector<double> eps_grid) {
  if (M < 1 || T < 0 || trials < 1)
    throw ConfigError("hoeffding experiment needs M >= 1, T >= 0, trials >= 1");
  KernelMatrix target = region_law_kernel(region, T);

  HoeffdingReport rep;
  rep.M = M;
  rep.T = T;
  rep.trials = trials;
  rep.errors.reserve(static_cast<std::size_t>(trials));
  for (int trial = 0; trial < trials; ++trial) {
    PoleSet ps = sample_poles(region, M,
                              Rng::derive(seed, static_cast<std::uint64_t>(trial)));
    // One i.i.d. sample per group: each group carries weight 1/M, split
    // evenly over its conjugate members.
    AtomicMeasure mu;
    for (int g : ps.group_reps()) {
      if (ps.is_real(g)) {
        mu.atoms.push_back(ps.poles[static_cast<std::size_t>(g)]);
        mu.weights.push_back(1.0 / M);
      } else {
        mu.atoms.push_back(ps.poles[static_cast<std::size_t>(g)]);
        mu.atoms.push_back(std::conj(ps.poles[static_cast<std::size_t>(g)]));
        mu.weights.push_back(0.5 / M);
        mu.weights.push_back(0.5 / M);
      }
    }
    KernelMatrix emp = kernel_atomic(mu, T);
    double err = (emp.K - target.K).cwiseAbs().maxCoeff();
    rep.errors.push_back(err);
  }
  rep.mean_error = std::accumulate(rep.errors.begin(), rep.errors.end(), 0.0) /
                   static_cast<double>(trials);
  rep.max_error = *std::max_element(rep.errors.begin(), rep.errors.end());

  if (eps_grid.empty()) {
    for (int i = 0; i < 16; ++i) eps_grid.push_back(0.05 + 0.08 * i);
  }
  std::sort(eps_grid.begin(), eps_grid.end());
  rep.curve.eps = eps_grid;
  for (double eps : eps_grid) {
    int exceed = 0;
    for (double e : rep.errors)
      if (e > eps) ++exceed;
    rep.curve.empirical_rate.push_back(static_cast<double>(exceed) /
                                       static_cast<double>(trials));
    double bound = 4.0 * (T + 1.0) * (T + 1.0) *
                   std::exp(-M * eps * eps / 8.0);
    rep.curve.hoeffding_bound.push_back(std::min(1.0, bound));
  }
  return rep;
}

AmlsCoordinates amls_transform(Complex p) {
  double r = std::abs(p);
  if (r > 1.0 + 1e-15)
    throw ConfigError("decay/oscillation map needs |p| <= 1");
  AmlsCoordinates c;
  if (r == 0.0) {
    c.finite = false;
    c.alpha = std::numeric_limits<double>::infinity();
    c.omega = 0.0;
    return c;
  }
  c.alpha = -std::log(std::min(r, 1.0));
  c.omega = std::arg(p);
  return c;
}

Complex amls_inverse(const AmlsCoordinates& c) {
  if (!c.finite || std::isinf(c.alpha)) return Complex{0.0, 0.0};
  return std::exp(-c.alpha) * Complex{std::cos(c.omega), std::sin(c.omega)};
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     int max_iter) {
  const int n = static_cast<int>(A.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double tol = 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff());

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (passive[static_cast<std::size_t>(i)]) idx.push_back(i);
    z.setZero(n);
    if (idx.empty()) return;
    Eigen::MatrixXd Ap(A.rows(), static_cast<int>(idx.size()));
    for (int k = 0; k < static_cast<int>(idx.size()); ++k)
      Ap.col(k) = A.col(idx[static_cast<std::size_t>(k)]);
    Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
    for (int k = 0; k < static_cast<int>(idx.size()); ++k)
      z(idx[static_cast<std::size_t>(k)]) = zp(k);
  };

  for (int outer = 0; outer < max_iter; ++outer) {
    Eigen::VectorXd w = A.transpose() * (b - A * x);
    int j = -1;
    double wmax = tol;
    for (int i = 0; i < n; ++i) {
      if (!passive[static_cast<std::size_t>(i)] && w(i) > wmax) {
        wmax = w(i);
        j = i;
      }
    }
    if (j < 0) break;
    passive[static_cast<std::size_t>(j)] = true;

    for (int inner = 0; inner < max_iter; ++inner) {
      Eigen::VectorXd z;
      solve_passive(z);
      bool ok = true;
      double alpha = 1.0;
      for (int i = 0; i < n; ++i) {
        if (passive[static_cast<std::size_t>(i)] && z(i) <= 0.0) {
          ok = false;
          double a = x(i) / (x(i) - z(i));
          alpha = std::min(alpha, a);
        }
      }
      if (ok) {
        x = z;
        break;
      }
      x += alpha * (z - x);
      for (int i = 0; i < n; ++i) {
        if (passive[static_cast<std::size_t>(i)] && x(i) <= 1e-14) {
          x(i) = 0.0;
          passive[static_cast<std::size_t>(i)] = false;
        }
      }
    }
  }
  return x;
}

CounterexampleReport counterexample_check(int T, double grid_step) {
  if (T < 2) throw ConfigError("counterexample horizon must be at least 2");
  // Gram kernel of x(t+1) = A x(t), x(0) = b with nilpotent A.
  Eigen::Matrix2d A;
  A << 0, 1, 0, 0;
  Eigen::Vector2d b(0, 1);

  CounterexampleReport rep;
  std::vector<Eigen::Vector2d> states;
  Eigen::Vector2d x = b;
  for (int t = 0; t <= T; ++t) {
    states.push_back(x);
    x = A * x;
  }
  rep.K.resize(T + 1, T + 1);
  for (int s = 0; s <= T; ++s)
    for (int t = 0; t <= T; ++t)
      rep.K(s, t) = states[static_cast<std::size_t>(s)].dot(
          states[static_cast<std::size_t>(t)]);

  rep.diag_ok = true;
  for (int s = 0; s <= T; ++s) {
    for (int t = 0; t <= T; ++t) {
      double want = (s == t && s <= 1) ? 1.0 : 0.0;
      if (std::abs(rep.K(s, t).real() - want) > 1e-15 ||
          std::abs(rep.K(s, t).imag()) > 1e-15)
        rep.diag_ok = false;
    }
  }
  rep.kernel_psd = min_eigenvalue(rep.K) >= -1e-12;
  KernelMatrix km;
  km.K = rep.K;
  km.horizon = T;
  rep.defect_psd = radius_defect(km, 1.0).min_eig >= -1e-12;

  // Moment system on a radial grid: sum w = 1, sum w r^2 = 1, sum w r^4 = 0.
  std::vector<double> grid;
  for (double r = 0.0; r <= 1.0 + 1e-12; r += grid_step) grid.push_back(r);
  Eigen::MatrixXd G(3, static_cast<int>(grid.size()));
  for (int k = 0; k < static_cast<int>(grid.size()); ++k) {
    double r2 = grid[static_cast<std::size_t>(k)] * grid[static_cast<std::size_t>(k)];
    G(0, k) = 1.0;
    G(1, k) = r2;
    G(2, k) = r2 * r2;
  }
  Eigen::Vector3d target(1.0, 1.0, 0.0);
  Eigen::VectorXd w = nnls(G, target);
  rep.lp_residual = (G * w - target).norm();
  rep.lp_infeasible = rep.lp_residual > 1e-6;
  return rep;
}

void PickData::validate() const {
  if (nodes.size() != values.size() || nodes.empty())
    throw ConfigError("interpolation nodes/values size mismatch");
  for (const Complex& z : nodes)
    if (!(std::abs(z) < 1.0))
      throw ConfigError("interpolation node outside the open unit disk");
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      if (nodes[i] == nodes[j]) throw ConfigError("repeated interpolation node");
}

PickResult pick_matrix(const PickData& data) {
  data.validate();
  const int n = static_cast<int>(data.nodes.size());
  PickResult out;
  out.P.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.P(i, j) =
          (1.0 - data.values[static_cast<std::size_t>(i)] *
                     std::conj(data.values[static_cast<std::size_t>(j)])) /
          (1.0 - data.nodes[static_cast<std::size_t>(i)] *
                     std::conj(data.nodes[static_cast<std::size_t>(j)]));
  out.min_eig = min_eigenvalue(out.P);
  double scale = std::max(1.0, std::abs(out.P.trace()));
  out.psd = out.min_eig >= -1e-10 * scale;
  return out;
}

NormalizedKernel normalized_kernel(const KernelMatrix& K, double rho,
                                   double gamma) {
  if (!(rho > 0.0) || !(gamma > 0.0))
    throw ConfigError("normalization needs rho > 0 and gamma > 0");
  const int T = K.horizon;
  NormalizedKernel out;
  out.K.horizon = T;
  out.K.provenance = K.provenance;
  out.K.K.resize(T + 1, T + 1);
  std::vector<double> rp(static_cast<std::size_t>(2 * T + 1));
  rp[0] = 1.0;
  for (int k = 1; k <= 2 * T; ++k) rp[static_cast<std::size_t>(k)] = rp[static_cast<std::size_t>(k - 1)] * rho;
  const double g2 = gamma * gamma;
  for (int s = 0; s <= T; ++s)
    for (int t = 0; t <= T; ++t)
      out.K.K(s, t) = K.K(s, t) / (g2 * rp[static_cast<std::size_t>(s + t)]);

  double dev = 0.0;
  for (int s = 0; s < T; ++s) {
    for (int t = 0; t < T; ++t) {
      Complex lhs = out.K.K(s, t) - out.K.K(s + 1, t + 1);
      Complex rhs = (rho * rho * K.K(s, t) - K.K(s + 1, t + 1)) /
                    (g2 * rp[static_cast<std::size_t>(s + t)] * rho * rho);
      dev = std::max(dev, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
    }
  }
  out.max_identity_dev = dev;
  return out;
}

}  // namespace raf
