#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "raf/conic.hpp"
#include "raf/rng.hpp"
#include "raf/sampling.hpp"
#include "raf/solver.hpp"

using namespace raf;
using doctest::Approx;

namespace {

PoleSet mixed_poles(int M, std::uint64_t seed) {
  PoleRegion rg;
  rg.rho_min = 0.3;
  rg.rho_max = 0.9;
  rg.angle_bands = {{0.3, 2.2}};
  rg.include_real_axis = true;
  return sample_poles(rg, M, seed);
}

PoleSet real_poles(std::vector<double> ps) {
  PoleSet out;
  for (double p : ps) {
    out.pair_index.push_back(out.size());
    out.poles.emplace_back(p, 0.0);
  }
  return out;
}

TimeSeries impulse_data(const RafModel& truth, int T) {
  TimeSeries ts;
  ts.u = Eigen::VectorXd::Zero(T);
  ts.u(0) = 1.0;
  ts.y = impulse_response(truth, T);
  return ts;
}

double pg_objective(const ConicProblem& cp, const Eigen::VectorXd& x) {
  return 0.5 * (cp.y - cp.B * x).squaredNorm() +
         cp.lambda2 * x.head(cp.layout.n_coeff).squaredNorm();
}

double full_objective(const ConicProblem& cp, const Eigen::VectorXd& x) {
  double pen = 0.0;
  for (std::size_t g = 0; g < cp.groups.size(); ++g) {
    double sq = 0.0;
    for (int c : cp.groups[g]) sq += x(c) * x(c);
    pen += cp.group_weights[g] * std::sqrt(sq);
  }
  return pg_objective(cp, x) + cp.lambda1 * pen;
}

// Reference projected-gradient solver for lambda1 = 0 problems whose cone
// block reduces to a simple feasible set (componentwise bounds or one affine
// equality), with a fixed 1/L step.
template <class Projector>
Eigen::VectorXd pg_solve(const ConicProblem& cp, int iters, Projector project) {
  Eigen::MatrixXd Q = cp.B.transpose() * cp.B;
  for (int i = 0; i < cp.layout.n_coeff; ++i) Q(i, i) += 2.0 * cp.lambda2;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q, Eigen::EigenvaluesOnly);
  const double L = es.eigenvalues().maxCoeff();
  const double step = 1.0 / L;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(cp.layout.total);
  project(x);
  for (int k = 0; k < iters; ++k) {
    Eigen::VectorXd grad = cp.B.transpose() * (cp.B * x - cp.y);
    grad.head(cp.layout.n_coeff) += 2.0 * cp.lambda2 * x.head(cp.layout.n_coeff);
    x -= step * grad;
    project(x);
  }
  return x;
}

// Reference proximal-gradient solver for unconstrained group-lasso problems.
Eigen::VectorXd proxgrad_solve(const ConicProblem& cp, int iters) {
  Eigen::MatrixXd Q = cp.B.transpose() * cp.B;
  for (int i = 0; i < cp.layout.n_coeff; ++i) Q(i, i) += 2.0 * cp.lambda2;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q, Eigen::EigenvaluesOnly);
  const double step = 1.0 / es.eigenvalues().maxCoeff();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(cp.layout.total);
  for (int k = 0; k < iters; ++k) {
    Eigen::VectorXd grad = cp.B.transpose() * (cp.B * x - cp.y);
    grad.head(cp.layout.n_coeff) += 2.0 * cp.lambda2 * x.head(cp.layout.n_coeff);
    x -= step * grad;
    for (std::size_t g = 0; g < cp.groups.size(); ++g) {
      double nrm = 0.0;
      for (int c : cp.groups[g]) nrm += x(c) * x(c);
      nrm = std::sqrt(nrm);
      double thr = step * cp.lambda1 * cp.group_weights[g];
      double scale = nrm <= thr ? 0.0 : (nrm - thr) / nrm;
      for (int c : cp.groups[g]) x(c) *= scale;
    }
  }
  return x;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("plain ridge matches the normal equations") {
  PoleSet ps = mixed_poles(10, 81);
  RafModel truth;
  truth.poles = ps;
  for (int i : ps.group_reps()) {
    truth.group_rep.push_back(i);
    truth.residues.emplace_back(0.1 * (i + 1), ps.is_real(i) ? 0.0 : -0.05);
  }
  TimeSeries data = impulse_data(truth, 60);
  Dictionary dict = normalize_columns(real_split(ps, 60));
  const double l2 = 1e-6;
  ConicProblem cp = compile(dict, data, 0.0, l2, ConstraintSet{}, false);

  FitReport rep = fit(cp);
  REQUIRE(rep.feasible);
  CHECK(rep.info.iterations == 0);  // direct path, no splitting

  Eigen::MatrixXd Q = dict.columns.transpose() * dict.columns;
  Q += 2.0 * l2 * Eigen::MatrixXd::Identity(Q.rows(), Q.cols());
  Eigen::VectorXd want = Q.ldlt().solve(dict.columns.transpose() * data.y);
  auto rec = denormalize_residues(dict, want);
  for (size_t g = 0; g < rec.size(); ++g)
    CHECK(std::abs(rep.model.residues[g] - rec[g]) <=
          1e-8 * std::max(1.0, std::abs(rec[g])));
  CHECK(rep.info.objective ==
        Approx(0.5 * (data.y - dict.columns * want).squaredNorm() +
               l2 * want.squaredNorm())
            .epsilon(1e-10));
}

TEST_CASE("group lasso solution satisfies the stationarity conditions") {
  Rng rng(82);
  int checked_inactive = 0;
  for (int rep = 0; rep < 20; ++rep) {
    PoleSet ps = mixed_poles(8, 100 + rep);
    Dictionary dict = normalize_columns(real_split(ps, 40));
    // Sparse ground truth plus noise.
    Eigen::VectorXd w = Eigen::VectorXd::Zero(dict.n_cols());
    for (int g = 0; g < 3; ++g)
      w(dict.groups[static_cast<size_t>(g)][0]) = rng.uniform(0.5, 1.5);
    TimeSeries data;
    data.u = Eigen::VectorXd::Zero(40);
    data.u(0) = 1.0;
    data.y = dict.columns * w;
    for (int t = 0; t < 40; ++t) data.y(t) += 0.02 * rng.gaussian();

    double lmax = 0.0;
    for (const auto& g : dict.groups) {
      double nrm = 0.0;
      for (int c : g) nrm += std::pow(dict.columns.col(c).dot(data.y), 2);
      lmax = std::max(lmax, std::sqrt(nrm));
    }
    const double l1 = 0.3 * lmax;
    const double l2 = 1e-8;
    ConicProblem cp = compile(dict, data, l1, l2, ConstraintSet{}, false);
    AdmmSettings st;
    st.eps_rel = 1e-10;
    SolveResult r = solve_conic(cp, st);
    REQUIRE(r.info.status == "solved");

    Eigen::VectorXd resid = data.y - dict.columns * r.x;
    for (int g = 0; g < dict.n_groups(); ++g) {
      const auto& cols = dict.groups[static_cast<size_t>(g)];
      Eigen::VectorXd xg(static_cast<int>(cols.size()));
      Eigen::VectorXd corr(static_cast<int>(cols.size()));
      for (size_t k = 0; k < cols.size(); ++k) {
        xg(static_cast<int>(k)) = r.x(cols[k]);
        corr(static_cast<int>(k)) = dict.columns.col(cols[k]).dot(resid);
      }
      if (xg.norm() < 1e-9) {
        CHECK(corr.norm() <= l1 + 1e-5);
        ++checked_inactive;
      } else {
        Eigen::VectorXd kkt = corr - 2.0 * l2 * xg - l1 * xg / xg.norm();
        CHECK(kkt.cwiseAbs().maxCoeff() <= 1e-5 * std::max(1.0, lmax));
      }
    }
  }
  CHECK(checked_inactive > 0);  // the threshold must actually bite
}

TEST_CASE("matches proximal gradient on an unconstrained group lasso") {
  PoleSet ps = mixed_poles(4, 91);
  Dictionary dict = normalize_columns(real_split(ps, 30));
  Rng rng(92);
  TimeSeries data;
  data.u = Eigen::VectorXd::Zero(30);
  data.u(0) = 1.0;
  data.y.resize(30);
  for (int t = 0; t < 30; ++t) data.y(t) = rng.uniform(-1.0, 1.0);
  ConicProblem cp = compile(dict, data, 0.05, 1e-6, ConstraintSet{}, false);

  AdmmSettings st;
  st.eps_rel = 1e-12;
  SolveResult r = solve_conic(cp, st);
  Eigen::VectorXd ref = proxgrad_solve(cp, 100000);
  double f_admm = full_objective(cp, r.x);
  double f_ref = full_objective(cp, ref);
  CHECK(std::abs(f_admm - f_ref) <= 1e-6 * std::max(1.0, std::abs(f_ref)));
}

TEST_CASE("matches projected gradient on a sign-constrained instance") {
  PoleSet ps = real_poles({0.2, 0.45, 0.7, 0.85});
  Rng rng(93);
  TimeSeries data;
  data.u = Eigen::VectorXd::Zero(40);
  data.u(0) = 1.0;
  RafModel truth;
  truth.poles = real_poles({0.5, 0.8});
  truth.group_rep = {0, 1};
  truth.residues = {Complex(1.0, 0.0), Complex(0.5, 0.0)};
  data.y = impulse_response(truth, 40);
  for (int t = 0; t < 40; ++t) data.y(t) += 0.01 * rng.gaussian();

  Dictionary dict = normalize_columns(real_split(ps, 40));
  ConstraintSet cs;
  cs.monotone = true;
  ConicProblem cp = compile(dict, data, 0.0, 1e-6, cs, false);

  AdmmSettings st;
  st.eps_rel = 1e-12;
  SolveResult r = solve_conic(cp, st);
  REQUIRE(r.info.status == "solved");
  // Sign rows ask for nonnegative coefficients; clamp is the exact projector.
  Eigen::VectorXd ref = pg_solve(cp, 100000, [](Eigen::VectorXd& x) {
    x = x.cwiseMax(0.0);
  });
  double f_admm = pg_objective(cp, r.x);
  double f_ref = pg_objective(cp, ref);
  CHECK(std::abs(f_admm - f_ref) <= 1e-6 * std::max(1.0, std::abs(f_ref)));
  CHECK(r.x.minCoeff() >= -1e-8);
}

TEST_CASE("matches projected gradient on an equality-constrained instance") {
  PoleSet ps = real_poles({0.3, 0.6, 0.9});
  Rng rng(94);
  TimeSeries data;
  data.u = Eigen::VectorXd::Zero(35);
  data.u(0) = 1.0;
  data.y.resize(35);
  for (int t = 0; t < 35; ++t) data.y(t) = rng.uniform(-0.5, 0.5);
  Dictionary dict = normalize_columns(real_split(ps, 35));
  ConstraintSet cs;
  cs.dc_equal = DcEqual{2.0};
  ConicProblem cp = compile(dict, data, 0.0, 1e-6, cs, false);
  REQUIRE(cp.n_zero == 1);

  AdmmSettings st;
  st.eps_rel = 1e-12;
  SolveResult r = solve_conic(cp, st);
  REQUIRE(r.info.status == "solved");

  Eigen::RowVectorXd a = cp.H.row(0);
  const double b = -cp.h(0);
  const double an2 = a.squaredNorm();
  Eigen::VectorXd ref = pg_solve(cp, 100000, [&](Eigen::VectorXd& x) {
    x -= a.transpose() * ((a * x)(0) - b) / an2;
  });
  double f_admm = pg_objective(cp, r.x);
  double f_ref = pg_objective(cp, ref);
  CHECK(std::abs(f_admm - f_ref) <= 1e-6 * std::max(1.0, std::abs(f_ref)));
  RafModel m = assemble_model(cp, r.x, r.info);
  CHECK(budgets(m, 0, 0).dc_gain == Approx(2.0).epsilon(1e-7));
}

TEST_CASE("a lone atom is recovered with almost all the energy") {
  PoleSet ps = mixed_poles(12, 95);
  Dictionary dict = normalize_columns(real_split(ps, 50));
  TimeSeries data;
  data.u = Eigen::VectorXd::Zero(50);
  data.u(0) = 1.0;
  const int target = 5;
  data.y = 2.0 * dict.columns.col(dict.groups[target][0]);
  ConicProblem cp = compile(dict, data, 0.05, 1e-8, ConstraintSet{}, false);
  SolveResult r = solve_conic(cp);
  double total = 0.0, on_target = 0.0;
  for (int g = 0; g < dict.n_groups(); ++g) {
    double sq = 0.0;
    for (int c : dict.groups[static_cast<size_t>(g)]) sq += r.x(c) * r.x(c);
    total += sq;
    if (g == target) on_target = sq;
  }
  CHECK(on_target / total >= 0.99);
}

TEST_CASE("contradictory priors are reported infeasible") {
  PoleSet ps = real_poles({0.5});
  TimeSeries data;
  data.u = Eigen::VectorXd::Zero(30);
  data.u(0) = 1.0;
  data.y = Eigen::VectorXd::Zero(30);
  Dictionary dict = normalize_columns(real_split(ps, 30));
  ConstraintSet cs;
  cs.dc_equal = DcEqual{10.0};  // forces c = 5
  cs.bibo = Bibo{1.0};          // but the l1 budget allows at most 0.5
  ConicProblem cp = compile(dict, data, 0.1, 1e-8, cs, false);
  FitReport rep = fit(cp);
  CHECK_FALSE(rep.feasible);
  CHECK(rep.info.status == "infeasible");
  CHECK_FALSE(rep.info.message.empty());
}

TEST_CASE("the same priors with a loose budget are feasible and exact") {
  PoleSet ps = real_poles({0.5});
  TimeSeries data;
  data.u = Eigen::VectorXd::Zero(30);
  data.u(0) = 1.0;
  data.y = Eigen::VectorXd::Zero(30);
  Dictionary dict = normalize_columns(real_split(ps, 30));
  ConstraintSet cs;
  cs.dc_equal = DcEqual{10.0};
  cs.bibo = Bibo{30.0};
  ConicProblem cp = compile(dict, data, 0.1, 1e-8, cs, false);
  FitReport rep = fit(cp);
  REQUIRE(rep.feasible);
  CHECK(rep.info.status == "solved");
  CHECK(rep.model.residues[0].real() == Approx(5.0).epsilon(1e-6));
  CHECK(prior_violation(rep.model, cs) <= 1e-6);
}

TEST_CASE("solutions scale linearly with the data and budgets") {
  PoleSet ps = mixed_poles(6, 96);
  Rng rng(97);
  TimeSeries data;
  data.u = Eigen::VectorXd::Zero(40);
  data.u(0) = 1.0;
  data.y.resize(40);
  for (int t = 0; t < 40; ++t) data.y(t) = rng.uniform(-1.0, 1.0);
  Dictionary dict = normalize_columns(real_split(ps, 40));
  ConstraintSet cs;
  cs.bibo = Bibo{3.0};
  const double l1 = 0.1, l2 = 1e-8;
  ConicProblem cp = compile(dict, data, l1, l2, cs, false);
  AdmmSettings st;
  st.eps_rel = 1e-11;
  FitReport base = fit(cp, st);
  REQUIRE(base.feasible);

  const double alpha = 3.7;
  TimeSeries scaled = data;
  scaled.y *= alpha;
  ConstraintSet cs2;
  cs2.bibo = Bibo{3.0 * alpha};
  ConicProblem cp2 = compile(dict, scaled, l1 * alpha, l2, cs2, false);
  FitReport big = fit(cp2, st);
  REQUIRE(big.feasible);

  double cmax = 0.0;
  for (const Complex& c : base.model.residues) cmax = std::max(cmax, std::abs(c));
  for (size_t g = 0; g < base.model.residues.size(); ++g)
    CHECK(std::abs(big.model.residues[g] - alpha * base.model.residues[g]) <=
          1e-5 * std::max(1.0, alpha * cmax));
  CHECK(big.info.objective ==
        Approx(alpha * alpha * base.info.objective).epsilon(1e-5));
}

TEST_CASE("warm starts reach the same optimum") {
  PoleSet ps = mixed_poles(6, 98);
  TimeSeries data;
  data.u = Eigen::VectorXd::Zero(35);
  data.u(0) = 1.0;
  Rng rng(99);
  data.y.resize(35);
  for (int t = 0; t < 35; ++t) data.y(t) = rng.uniform(-1.0, 1.0);
  Dictionary dict = normalize_columns(real_split(ps, 35));
  ConstraintSet cs;
  cs.bibo = Bibo{5.0};
  ConicProblem cp = compile(dict, data, 0.05, 1e-8, cs, false);
  SolveResult cold = solve_conic(cp);
  REQUIRE(cold.info.status == "solved");
  SolveResult warm = solve_conic(cp, AdmmSettings{}, &cold.x);
  REQUIRE(warm.info.status == "solved");
  CHECK(std::abs(warm.info.objective - cold.info.objective) <=
        1e-7 * std::max(1.0, std::abs(cold.info.objective)));
  CHECK(warm.info.iterations <= cold.info.iterations);
}

TEST_CASE("iteration cap surfaces as a warning") {
  PoleSet ps = mixed_poles(8, 101);
  TimeSeries data;
  data.u = Eigen::VectorXd::Zero(40);
  data.u(0) = 1.0;
  Rng rng(102);
  data.y.resize(40);
  for (int t = 0; t < 40; ++t) data.y(t) = rng.uniform(-1.0, 1.0);
  Dictionary dict = normalize_columns(real_split(ps, 40));
  ConstraintSet cs;
  cs.bibo = Bibo{1.0};
  ConicProblem cp = compile(dict, data, 0.05, 1e-8, cs, false);
  AdmmSettings st;
  st.max_iter = 3;
  st.check_every = 1;
  FitReport rep = fit(cp, st);
  if (rep.feasible) {
    CHECK(rep.info.status == "max_iterations");
    CHECK(rep.model.diagnostics.warning);
  }
}

TEST_CASE("default ridge weight follows the design scale") {
  PoleSet ps = mixed_poles(5, 103);
  Dictionary dict = real_split(ps, 20);
  CHECK(default_lambda2(dict) ==
        Approx(1e-8 * dict.columns.squaredNorm() / dict.n_cols()).epsilon(1e-12));
  Dictionary scaled = dict;
  scaled.columns *= 10.0;
  CHECK(default_lambda2(scaled) == Approx(100.0 * default_lambda2(dict)));
}

TEST_CASE("pruning drops negligible groups and refits") {
  PoleSet ps = real_poles({0.4, 0.4, 0.75});
  TimeSeries data;
  data.u = Eigen::VectorXd::Zero(30);
  data.u(0) = 1.0;
  Dictionary dict = normalize_columns(real_split(ps, 30));
  RafModel model;
  model.poles = ps;
  model.group_rep = {0, 1, 2};
  model.residues = {Complex(3.0, 0.0), Complex(1e-8, 0.0), Complex(5e-9, 0.0)};
  data.y = simulate(model, data.u);
  model.diagnostics.objective = 0.0;

  PruneResult pr = prune(model, dict, data, ConstraintSet{}, 1e-3, 1e-10, false);
  REQUIRE(pr.active_groups.size() == 1);
  CHECK(pr.active_groups[0] == 0);
  CHECK_FALSE(pr.empty_model);
  double before = (data.y - simulate(model, data.u)).norm();
  double after = (data.y - simulate(pr.model, data.u)).norm();
  CHECK(std::abs(after - before) <= 1e-6);
  // The kept duplicate absorbs the dropped twin's mass.
  CHECK(std::abs(pr.model.residues[0] - Complex(3.0 + 1e-8, 0.0)) < 1e-7);
}

TEST_CASE("prune with zero tolerance is the identity") {
  PoleSet ps = real_poles({0.4, 0.7});
  TimeSeries data;
  data.u = Eigen::VectorXd::Zero(20);
  data.u(0) = 1.0;
  data.y = Eigen::VectorXd::Ones(20);
  Dictionary dict = normalize_columns(real_split(ps, 20));
  RafModel model;
  model.poles = ps;
  model.group_rep = {0, 1};
  model.residues = {Complex(1.0, 0.0), Complex(0.5, 0.0)};
  PruneResult pr = prune(model, dict, data, ConstraintSet{}, 0.0, 1e-8, false);
  CHECK(pr.active_groups.size() == 2);
  CHECK(std::abs(pr.model.residues[0] - model.residues[0]) == 0.0);
}

TEST_CASE("pruning everything flags an empty model") {
  PoleSet ps = real_poles({0.4, 0.7});
  TimeSeries data;
  data.u = Eigen::VectorXd::Zero(20);
  data.u(0) = 1.0;
  data.y = Eigen::VectorXd::Zero(20);
  Dictionary dict = normalize_columns(real_split(ps, 20));
  RafModel model;
  model.poles = ps;
  model.group_rep = {0, 1};
  model.residues = {Complex(0.0, 0.0), Complex(0.0, 0.0)};
  PruneResult pr = prune(model, dict, data, ConstraintSet{}, 1e-3, 1e-8, false);
  CHECK(pr.empty_model);
  CHECK(pr.active_groups.empty());
}

TEST_CASE("reweighting sharpens a split between duplicate atoms") {
  PoleSet ps = real_poles({0.6, 0.6, 0.3});
  TimeSeries data;
  data.u = Eigen::VectorXd::Zero(40);
  data.u(0) = 1.0;
  Dictionary dict = normalize_columns(real_split(ps, 40));
  data.y = 2.0 * dict.columns.col(0);
  ConicProblem cp = compile(dict, data, 0.02, 1e-10, ConstraintSet{}, false);
  FitReport rep = fit_reweighted(cp);
  REQUIRE(rep.feasible);
  CHECK(rep.model.diagnostics.message.find("reweighted") != std::string::npos);
  // Duplicate columns make the plain solution non-unique; the reweighted
  // fit still reproduces the target up to the shrinkage bias.
  CHECK((simulate(rep.model, data.u) - data.y).norm() <= 0.02 * data.y.norm());
}

TEST_CASE("solve rejects an inconsistent problem structure") {
  ConicProblem cp;
  cp.B = Eigen::MatrixXd::Zero(4, 3);
  cp.y = Eigen::VectorXd::Zero(4);
  cp.layout.total = 2;  // mismatch
  CHECK_THROWS_AS(solve_conic(cp), ConfigError);
}

}  // TEST_SUITE
