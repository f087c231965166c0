#include "raf/solver.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <deque>

namespace raf {

namespace {

struct ScaledCones {
  Eigen::MatrixXd H;
  Eigen::VectorXd h;
};

// Row equilibration that preserves cone membership: zero/nonneg rows scale
// individually, each SOC block by one uniform factor.
ScaledCones equilibrate(const ConicProblem& cp) {
  ScaledCones sc{cp.H, cp.h};
  auto clamp = [](double v) { return std::clamp(v, 1e-6, 1e6); };
  int r = 0;
  for (; r < cp.n_zero + cp.n_nonneg; ++r) {
    double nrm = sc.H.row(r).norm();
    if (nrm > 1e-12) {
      double d = clamp(1.0 / nrm);
      sc.H.row(r) *= d;
      sc.h(r) *= d;
    }
  }
  for (int dim : cp.soc_dims) {
    double nrm = sc.H.middleRows(r, dim).norm();
    if (nrm > 1e-12) {
      double d = clamp(1.0 / nrm);
      sc.H.middleRows(r, dim) *= d;
      sc.h.segment(r, dim) *= d;
    }
    r += dim;
  }
  return sc;
}

void project_cones(const ConicProblem& cp, Eigen::VectorXd& v) {
  v.head(cp.n_zero).setZero();
  for (int i = cp.n_zero; i < cp.n_zero + cp.n_nonneg; ++i)
    v(i) = std::max(0.0, v(i));
  int r = cp.n_zero + cp.n_nonneg;
  for (int dim : cp.soc_dims) {
    double t = v(r);
    double nrm = v.segment(r + 1, dim - 1).norm();
    if (nrm <= t) {
      // inside
    } else if (nrm <= -t) {
      v.segment(r, dim).setZero();
    } else {
      double tau = 0.5 * (t + nrm);
      v(r) = tau;
      v.segment(r + 1, dim - 1) *= tau / nrm;
    }
    r += dim;
  }
}

double group_penalty(const ConicProblem& cp, const Eigen::VectorXd& x) {
  double s = 0.0;
  for (std::size_t g = 0; g < cp.groups.size(); ++g) {
    double sq = 0.0;
    for (int c : cp.groups[g]) sq += x(c) * x(c);
    s += cp.group_weights[g] * std::sqrt(sq);
  }
  return s;
}

double objective_value(const ConicProblem& cp, const Eigen::VectorXd& x) {
  double fit = 0.5 * (cp.y - cp.B * x).squaredNorm();
  double ridge = cp.lambda2 * x.head(cp.layout.n_coeff).squaredNorm();
  return fit + ridge + cp.lambda1 * group_penalty(cp, x);
}

double cone_violation(const ConicProblem& cp, const Eigen::VectorXd& x) {
  if (cp.cone_rows() == 0) return 0.0;
  Eigen::VectorXd v = cp.H * x + cp.h;
  double worst = 0.0;
  for (int i = 0; i < cp.n_zero; ++i) worst = std::max(worst, std::abs(v(i)));
  for (int i = cp.n_zero; i < cp.n_zero + cp.n_nonneg; ++i)
    worst = std::max(worst, -v(i));
  int r = cp.n_zero + cp.n_nonneg;
  for (int dim : cp.soc_dims) {
    worst = std::max(worst, v.segment(r + 1, dim - 1).norm() - v(r));
    r += dim;
  }
  return std::max(worst, 0.0);
}

struct Checkpoint {
  int iter;
  double rel_pri;
  double dual2_norm;  // unscaled cone multiplier norm rho * ||u2||
};

// Unconstrained ridge: solved in closed form, no iteration.
SolveResult solve_direct(const ConicProblem& cp) {
  SolveResult out;
  if (cp.lambda2 > 0.0) {
    Eigen::MatrixXd P = cp.B.transpose() * cp.B;
    for (int i = 0; i < cp.layout.n_coeff; ++i) P(i, i) += 2.0 * cp.lambda2;
    out.x = P.ldlt().solve(cp.B.transpose() * cp.y);
  } else {
    out.x = cp.B.colPivHouseholderQr().solve(cp.y);
  }
  out.info.status = "solved";
  out.info.iterations = 0;
  out.info.objective = objective_value(cp, out.x);
  return out;
}

}  // namespace

SolveResult solve_conic(const ConicProblem& cp, const AdmmSettings& st,
                        const Eigen::VectorXd* warm) {
  cp.validate();
  const int n = cp.layout.total;
  const int m = cp.cone_rows();
  const bool use_z1 = cp.lambda1 > 0.0;

  if (!use_z1 && m == 0) return solve_direct(cp);

  Eigen::MatrixXd P = cp.B.transpose() * cp.B;
  for (int i = 0; i < cp.layout.n_coeff; ++i) P(i, i) += 2.0 * cp.lambda2;
  Eigen::VectorXd q = -cp.B.transpose() * cp.y;

  ScaledCones sc = equilibrate(cp);
  const Eigen::MatrixXd HtH =
      m > 0 ? Eigen::MatrixXd(sc.H.transpose() * sc.H)
            : Eigen::MatrixXd::Zero(n, n);

  // proximal regularizer keeping the factorization well posed when the
  // group prox split (and its rho I term) is absent
  const double sigma =
      use_z1 ? 0.0 : 1e-6 * (1.0 + P.trace() / static_cast<double>(n));

  double rho = st.rho;
  Eigen::LDLT<Eigen::MatrixXd> fac;
  auto refactor = [&] {
    Eigen::MatrixXd M = P + rho * HtH;
    M.diagonal().array() += use_z1 ? rho : sigma;
    fac.compute(M);
  };
  refactor();

  Eigen::VectorXd x = warm ? *warm : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z1 = x;
  Eigen::VectorXd u1 = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z2(m), u2 = Eigen::VectorXd::Zero(m);
  if (m > 0) {
    z2 = sc.H * x + sc.h;
    project_cones(cp, z2);
  }

  SolveResult out;
  out.info.status = "max_iterations";

  std::deque<Checkpoint> history;
  const int stall_window = 1000;
  const int adapt_every = 50;

  Eigen::VectorXd w(m), xhat(n), what(m), x_old(n), z1_old(n), z2_old(m);
  int iter = 0;
  for (; iter < st.max_iter; ++iter) {
    x_old = x;
    Eigen::VectorXd rhs = -q;
    rhs += use_z1 ? Eigen::VectorXd(rho * (z1 - u1))
                  : Eigen::VectorXd(sigma * x_old);
    if (m > 0) rhs += rho * (sc.H.transpose() * (z2 - u2 - sc.h));
    x = fac.solve(rhs);
    if (m > 0) w = sc.H * x + sc.h;

    z1_old = z1;
    z2_old = z2;
    if (use_z1) {
      xhat = st.alpha * x + (1.0 - st.alpha) * z1;
      // prox of the group penalty on coefficient blocks, identity elsewhere
      z1 = xhat + u1;
      for (std::size_t g = 0; g < cp.groups.size(); ++g) {
        double kappa = cp.lambda1 * cp.group_weights[g] / rho;
        double sq = 0.0;
        for (int c : cp.groups[g]) sq += z1(c) * z1(c);
        double nrm = std::sqrt(sq);
        double scale = nrm <= kappa ? 0.0 : 1.0 - kappa / nrm;
        for (int c : cp.groups[g]) z1(c) *= scale;
      }
      u1 += xhat - z1;
    }
    if (m > 0) {
      what = st.alpha * w + (1.0 - st.alpha) * z2;
      z2 = what + u2;
      project_cones(cp, z2);
      u2 += what - z2;
    }

    // residuals on the unrelaxed point
    double pri_sq = use_z1 ? (x - z1).squaredNorm() : 0.0;
    if (m > 0) pri_sq += (w - z2).squaredNorm();
    double pri = std::sqrt(pri_sq);
    double ax_sq = (use_z1 ? x.squaredNorm() : 0.0) +
                   (m > 0 ? w.squaredNorm() : 0.0);
    double z_sq = (use_z1 ? z1.squaredNorm() : 0.0) +
                  (m > 0 ? z2.squaredNorm() : 0.0);
    double pri_den = std::max(1.0, std::sqrt(std::max(ax_sq, z_sq)));

    Eigen::VectorXd dvec = use_z1 ? Eigen::VectorXd(rho * (z1 - z1_old))
                                  : Eigen::VectorXd(sigma * (x - x_old));
    if (m > 0) dvec += rho * (sc.H.transpose() * (z2 - z2_old));
    double dual = dvec.norm();
    Eigen::VectorXd atu = use_z1 ? Eigen::VectorXd(rho * u1)
                                 : Eigen::VectorXd(Eigen::VectorXd::Zero(n));
    if (m > 0) atu += rho * (sc.H.transpose() * u2);
    double dual_den = std::max(1.0, atu.norm());

    double rel_pri = pri / pri_den;
    double rel_dual = dual / dual_den;
    out.info.primal_residual = rel_pri;
    out.info.dual_residual = rel_dual;

    double eps_pri = st.eps_abs * std::sqrt(static_cast<double>(n + m)) +
                     st.eps_rel * pri_den;
    double eps_dual = st.eps_abs * std::sqrt(static_cast<double>(n)) +
                      st.eps_rel * dual_den;
    if (pri <= eps_pri && dual <= eps_dual) {
      out.info.status = "solved";
      ++iter;
      break;
    }

    if ((iter + 1) % st.check_every == 0) {
      if (std::getenv("RAF_ADMM_TRACE")) std::fprintf(stderr, "trace iter=%d rel_pri=%.6e y2=%.6e rho=%.3e\n", iter + 1, rel_pri, m > 0 ? rho * u2.norm() : 0.0, rho);
      history.push_back({iter + 1, rel_pri, m > 0 ? rho * u2.norm() : 0.0});
      while (history.size() > 2u * stall_window / st.check_every + 2u)
        history.pop_front();

      // Heuristic infeasibility certificate: the scaled primal residual has
      // stopped improving across two consecutive long windows while the cone
      // multipliers diverge and the iterates stay bounded. Divergence means
      // clearly outgrowing every multiplier norm seen a window ago; slowly
      // converging feasible problems plateau instead and must not trip this.
      if (m > 0 && iter + 1 >= 2 * stall_window) {
        double cur_min = 1e300, prev_min = 1e300;
        double dual2_prev_max = 0.0;
        for (const auto& c : history) {
          if (c.iter > iter + 1 - stall_window) {
            cur_min = std::min(cur_min, c.rel_pri);
          } else if (c.iter > iter + 1 - 2 * stall_window) {
            prev_min = std::min(prev_min, c.rel_pri);
            dual2_prev_max = std::max(dual2_prev_max, c.dual2_norm);
          }
        }
        if (prev_min < 1e299 && cur_min > 0.99 * prev_min &&
            cur_min > 1e-5 && dual2_prev_max > 0.0 &&
            rho * u2.norm() > 2.0 * dual2_prev_max && x.norm() < 1e10) {
          out.info.status = "infeasible";
          out.info.message =
              "primal residual stalled with diverging cone multipliers";
          ++iter;
          break;
        }
      }
    }

    if (st.adaptive_rho && (iter + 1) % adapt_every == 0) {
      double ratio = std::sqrt((rel_pri + 1e-30) / (rel_dual + 1e-30));
      if (ratio > 1.2 || ratio < 1.0 / 1.2) {
        double rho_new = std::clamp(rho * ratio, 1e-6, 1e6);
        if (rho_new != rho) {
          double rescale = rho / rho_new;
          u1 *= rescale;
          u2 *= rescale;
          rho = rho_new;
          refactor();
        }
      }
    }
  }

  // the prox point carries exact group sparsity
  out.x = use_z1 ? z1 : x;
  out.info.iterations = iter;
  out.info.rho_final = rho;
  out.info.objective = objective_value(cp, out.x);
  out.info.max_violation = cone_violation(cp, out.x);
  return out;
}

Eigen::VectorXd pack_solution(const ConicProblem& cp,
                              const std::vector<Complex>& residues,
                              double feedthrough) {
  if (residues.size() != cp.groups.size())
    throw ConfigError("residue count does not match problem groups");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(cp.layout.total);
  for (std::size_t g = 0; g < cp.groups.size(); ++g) {
    const auto& cols = cp.groups[g];
    const double eta = cp.norms[g];
    x(cols[0]) = residues[g].real() * eta;
    if (cols.size() > 1) x(cols[1]) = residues[g].imag() * eta;
    if (cp.layout.a_offset >= 0)
      x(cp.layout.a_offset + static_cast<int>(g)) = std::abs(residues[g]);
  }
  if (cp.layout.d_index >= 0) x(cp.layout.d_index) = feedthrough;
  return x;
}

RafModel assemble_model(const ConicProblem& cp, const Eigen::VectorXd& x,
                        const SolveInfo& info) {
  RafModel mod;
  mod.poles = cp.pole_set;
  mod.group_rep = cp.group_rep;
  mod.residues.reserve(cp.groups.size());
  for (std::size_t g = 0; g < cp.groups.size(); ++g) {
    const auto& cols = cp.groups[g];
    const double eta = cp.norms[g];
    if (cols.size() == 1)
      mod.residues.emplace_back(x(cols[0]) / eta, 0.0);
    else
      mod.residues.emplace_back(x(cols[0]) / eta, x(cols[1]) / eta);
  }
  mod.feedthrough = cp.layout.d_index >= 0 ? x(cp.layout.d_index) : 0.0;
  mod.diagnostics.status = info.status;
  mod.diagnostics.objective = info.objective;
  mod.diagnostics.primal_residual = info.primal_residual;
  mod.diagnostics.dual_residual = info.dual_residual;
  mod.diagnostics.iterations = info.iterations;
  mod.diagnostics.warning = info.status != "solved";
  mod.diagnostics.message = info.message;
  return mod;
}

FitReport fit(const ConicProblem& cp, const AdmmSettings& st,
              const Eigen::VectorXd* warm) {
  SolveResult r = solve_conic(cp, st, warm);
  FitReport rep;
  rep.info = r.info;
  if (r.info.status == "infeasible") {
    rep.feasible = false;
    return rep;
  }
  rep.model = assemble_model(cp, r.x, r.info);
  if (r.info.max_violation > st.feas_tol) {
    rep.model.diagnostics.warning = true;
    rep.model.diagnostics.message = "constraint violation above tolerance";
  }
  return rep;
}

FitReport fit_reweighted(ConicProblem cp, const AdmmSettings& st,
                         const Eigen::VectorXd* warm) {
  SolveResult first = solve_conic(cp, st, warm);
  if (first.info.status == "infeasible") {
    FitReport rep;
    rep.feasible = false;
    rep.info = first.info;
    return rep;
  }
  for (std::size_t g = 0; g < cp.groups.size(); ++g) {
    double sq = 0.0;
    for (int c : cp.groups[g]) sq += first.x(c) * first.x(c);
    cp.group_weights[g] = 1.0 / (std::sqrt(sq) + 1e-4);
  }
  FitReport rep = fit(cp, st, &first.x);
  if (rep.feasible) {
    rep.model.diagnostics.message =
        rep.model.diagnostics.message.empty()
            ? "reweighted group penalty (heuristic)"
            : rep.model.diagnostics.message + "; reweighted (heuristic)";
  }
  return rep;
}

double default_lambda2(const Dictionary& dict) {
  if (dict.n_cols() == 0) return 0.0;
  return 1e-8 * dict.columns.squaredNorm() / dict.n_cols();
}

PruneResult prune(const RafModel& model, const Dictionary& dict,
                  const TimeSeries& data, const ConstraintSet& cs,
                  double rel_tol, double lambda2, bool fit_d,
                  const AdmmSettings& st) {
  if (model.group_count() != dict.n_groups())
    throw ConfigError("model does not match dictionary group structure");
  PruneResult out;
  if (rel_tol == 0.0) {
    out.model = model;
    out.active_groups.resize(static_cast<std::size_t>(dict.n_groups()));
    for (int g = 0; g < dict.n_groups(); ++g)
      out.active_groups[static_cast<std::size_t>(g)] = g;
    return out;
  }

  double top = 0.0;
  for (const Complex& c : model.residues) top = std::max(top, std::abs(c));
  for (int g = 0; g < model.group_count(); ++g)
    if (std::abs(model.residues[static_cast<std::size_t>(g)]) >= rel_tol * top &&
        top > 0.0)
      out.active_groups.push_back(g);

  if (out.active_groups.empty()) {
    out.empty_model = true;
    out.model.feedthrough = model.feedthrough;
    out.model.diagnostics = model.diagnostics;
    out.model.diagnostics.warning = true;
    out.model.diagnostics.message = "all groups pruned";
    return out;
  }

  Dictionary sub = subset_groups(dict, out.active_groups);
  ConicProblem cp = compile(sub, data, 0.0, lambda2, cs, fit_d);
  std::vector<Complex> kept;
  for (int g : out.active_groups)
    kept.push_back(model.residues[static_cast<std::size_t>(g)]);
  Eigen::VectorXd warm = pack_solution(cp, kept, model.feedthrough);
  FitReport refit = fit(cp, st, &warm);
  if (!refit.feasible) {
    // refit cannot be infeasible on a shrunk feasible set unless pruning
    // removed mass a constraint needed; fall back to the unpruned model
    out.model = model;
    out.model.diagnostics.warning = true;
    out.model.diagnostics.message = "refit infeasible; pruning skipped";
    out.active_groups.resize(static_cast<std::size_t>(dict.n_groups()));
    for (int g = 0; g < dict.n_groups(); ++g)
      out.active_groups[static_cast<std::size_t>(g)] = g;
    return out;
  }
  out.model = refit.model;
  return out;
}

}  // namespace raf
