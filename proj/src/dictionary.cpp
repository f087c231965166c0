#include "raf/dictionary.hpp"

#include <algorithm>
#include <cmath>

namespace raf {

void TimeSeries::validate() const {
  if (u.size() != y.size() && y.size() != 0)
    throw ConfigError("time series u and y must have equal length");
  if (u.size() < 1) throw ConfigError("time series is empty");
  if (!u.allFinite() || (y.size() && !y.allFinite()))
    throw ConfigError("time series contains non-finite values");
}

Eigen::MatrixXcd vandermonde(const PoleSet& ps, int T) {
  if (T < 1) throw ConfigError("horizon must be >= 1");
  const int n = ps.size();
  Eigen::MatrixXcd V(T, n);
  for (int m = 0; m < n; ++m) {
    Complex acc(1.0, 0.0);  // p^0 = 1, also for p = 0
    for (int t = 0; t < T; ++t) {
      V(t, m) = acc;
      acc *= ps.poles[m];
    }
  }
  return V;
}

namespace {

// Columns of the real split from the complex single-pole responses.
// resp holds one column per group representative.
Dictionary assemble_split(const PoleSet& ps, const Eigen::MatrixXcd& resp,
                          int T, bool convolved) {
  auto pairing = validate_pairing(ps);
  if (!pairing.valid())
    throw ConfigError("pole set has unpaired complex poles");

  Dictionary d;
  d.pole_set = ps;
  d.horizon = T;
  d.convolved = convolved;
  const auto reps = ps.group_reps();
  int n_real_cols = 0;
  for (int r : reps) n_real_cols += ps.is_real(r) ? 1 : 2;
  d.columns.resize(T, n_real_cols);

  int col = 0;
  for (size_t g = 0; g < reps.size(); ++g) {
    const int r = reps[g];
    d.group_rep.push_back(r);
    if (ps.is_real(r)) {
      d.columns.col(col) = resp.col(g).real();
      d.groups.push_back({col});
      ++col;
    } else {
      d.columns.col(col) = 2.0 * resp.col(g).real();
      d.columns.col(col + 1) = -2.0 * resp.col(g).imag();
      d.groups.push_back({col, col + 1});
      col += 2;
    }
  }
  d.norms.assign(d.groups.size(), 1.0);
  return d;
}

}  // namespace

Dictionary real_split(const PoleSet& ps, int T) {
  if (T < 1) throw ConfigError("horizon must be >= 1");
  const auto reps = ps.group_reps();
  Eigen::MatrixXcd resp(T, reps.size());
  for (size_t g = 0; g < reps.size(); ++g) {
    Complex acc(1.0, 0.0);
    for (int t = 0; t < T; ++t) {
      resp(t, g) = acc;
      acc *= ps.poles[reps[g]];
    }
  }
  return assemble_split(ps, resp, T, false);
}

Dictionary convolved_design(const PoleSet& ps, const Eigen::VectorXd& u) {
  const int N = static_cast<int>(u.size());
  if (N < 1) throw ConfigError("input sequence is empty");
  const auto reps = ps.group_reps();
  Eigen::MatrixXcd resp(N, reps.size());
  for (size_t g = 0; g < reps.size(); ++g) {
    const Complex p = ps.poles[reps[g]];
    Complex x(u(0), 0.0);
    resp(0, g) = x;
    for (int t = 1; t < N; ++t) {
      x = p * x + u(t);
      resp(t, g) = x;
    }
  }
  return assemble_split(ps, resp, N, true);
}

Dictionary normalize_columns(Dictionary d) {
  if (d.normalized) return d;
  for (int g = 0; g < d.n_groups(); ++g) {
    double sq = 0.0;
    for (int c : d.groups[g]) sq += d.columns.col(c).squaredNorm();
    double eta = std::sqrt(sq);
    if (!(eta > 1e-300))
      throw NumericalError("zero dictionary column group (degenerate input)");
    for (int c : d.groups[g]) d.columns.col(c) /= eta;
    d.norms[g] = eta;
  }
  d.normalized = true;
  return d;
}

Dictionary subset_groups(const Dictionary& d, const std::vector<int>& keep) {
  std::vector<int> ks = keep;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  if (ks.empty()) throw ConfigError("group subset is empty");
  for (int g : ks)
    if (g < 0 || g >= d.n_groups())
      throw ConfigError("group subset index out of range");

  Dictionary out;
  out.horizon = d.horizon;
  out.convolved = d.convolved;
  out.normalized = d.normalized;
  out.pole_set.seed = d.pole_set.seed;
  out.pole_set.region = d.pole_set.region;

  int n_cols = 0;
  for (int g : ks) n_cols += static_cast<int>(d.groups[g].size());
  out.columns.resize(d.horizon, n_cols);

  int col = 0;
  for (int g : ks) {
    const int rep = d.group_rep[g];
    const auto& cols = d.groups[g];
    const int pole_idx = out.pole_set.size();
    out.group_rep.push_back(pole_idx);
    out.norms.push_back(d.norms[g]);
    if (d.pole_set.is_real(rep)) {
      out.pole_set.poles.push_back(d.pole_set.poles[rep]);
      out.pole_set.pair_index.push_back(pole_idx);
      out.columns.col(col) = d.columns.col(cols[0]);
      out.groups.push_back({col});
      ++col;
    } else {
      const Complex p = d.pole_set.poles[rep];
      out.pole_set.poles.push_back(p);
      out.pole_set.poles.push_back(std::conj(p));
      out.pole_set.pair_index.push_back(pole_idx + 1);
      out.pole_set.pair_index.push_back(pole_idx);
      out.columns.col(col) = d.columns.col(cols[0]);
      out.columns.col(col + 1) = d.columns.col(cols[1]);
      out.groups.push_back({col, col + 1});
      col += 2;
    }
  }
  return out;
}

std::vector<Complex> denormalize_residues(const Dictionary& d,
                                          const Eigen::VectorXd& coeffs) {
  if (coeffs.size() != d.n_cols())
    throw ConfigError("coefficient vector does not match dictionary");
  std::vector<Complex> res(d.n_groups());
  for (int g = 0; g < d.n_groups(); ++g) {
    const auto& cols = d.groups[g];
    const double eta = d.norms[g];
    if (cols.size() == 1)
      res[g] = Complex(coeffs(cols[0]) / eta, 0.0);
    else
      res[g] = Complex(coeffs(cols[0]) / eta, coeffs(cols[1]) / eta);
  }
  return res;
}

}  // namespace raf
