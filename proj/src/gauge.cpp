#include "raf/dictionary.hpp"
#include "raf/solver.hpp"

#include <limits>

namespace raf {

GaugeResult atomic_gauge(const Eigen::VectorXd& h, const Dictionary& d_in,
                         double reconstruction_tol) {
  Dictionary d = d_in.normalized ? d_in : normalize_columns(d_in);
  if (static_cast<int>(h.size()) != d.horizon)
    throw ConfigError("target length does not match dictionary horizon");
  if (!(reconstruction_tol >= 0.0))
    throw ConfigError("reconstruction tolerance must be nonnegative");

  GaugeResult res;
  const int T = d.horizon;
  const int n = d.n_cols();
  const double hn = h.norm();

  Eigen::VectorXd xls = d.columns.colPivHouseholderQr().solve(h);
  double span_resid = (d.columns * xls - h).norm();
  if (span_resid > reconstruction_tol * hn) {
    res.out_of_span = true;
    res.value = std::numeric_limits<double>::infinity();
    return res;
  }

  // min sum_g ||x_g||_2  s.t.  ||columns x - h|| <= tol ||h||
  ConicProblem cp;
  cp.lambda1 = 1.0;
  cp.lambda2 = 0.0;
  cp.pole_set = d.pole_set;
  cp.group_rep = d.group_rep;
  cp.norms = d.norms;
  cp.groups = d.groups;
  cp.group_weights.assign(d.groups.size(), 1.0);
  cp.layout.n_coeff = n;
  cp.layout.n_groups = d.n_groups();
  cp.layout.total = n;
  cp.B = Eigen::MatrixXd::Zero(1, n);
  cp.y = Eigen::VectorXd::Zero(1);
  if (reconstruction_tol <= 1e-6) {
    // A ball this small is numerical slack, not optimization freedom; the
    // equality cone avoids a second-order cone with a degenerate radius.
    cp.n_zero = T;
    cp.H = -d.columns;
    cp.h = h;
  } else {
    cp.soc_dims = {T + 1};
    cp.H.resize(T + 1, n);
    cp.h.resize(T + 1);
    cp.H.row(0).setZero();
    cp.h(0) = reconstruction_tol * hn;
    cp.H.bottomRows(T) = -d.columns;
    cp.h.tail(T) = h;
  }
  cp.validate();

  AdmmSettings st;
  st.eps_rel = 1e-10;
  st.max_iter = 200000;
  SolveResult r = solve_conic(cp, st, &xls);

  res.coefficients = r.x;
  res.value = 0.0;
  for (int g = 0; g < d.n_groups(); ++g) {
    const auto& cols = d.groups[static_cast<std::size_t>(g)];
    Complex dw = cols.size() == 1
                     ? Complex(r.x(cols[0]), 0.0)
                     : Complex(r.x(cols[0]), r.x(cols[1]));
    res.atom_weights.push_back(dw);
    res.value += std::abs(dw);
  }
  res.residues = denormalize_residues(d, r.x);
  return res;
}

}  // namespace raf
