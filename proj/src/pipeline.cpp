#include "raf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "raf/rng.hpp"
#include "raf/sampling.hpp"

namespace raf {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kMergeDedupTol = 1e-3;
}

void PipelineConfig::validate() const {
  region.validate();
  if (m_groups < 1) throw ConfigError("pipeline needs at least one group");
  if (lambda1_grid.empty())
    throw ConfigError("lambda1 grid must not be empty");
  for (double l : lambda1_grid)
    if (!(l >= 0.0)) throw ConfigError("lambda1 must be nonnegative");
  if (lambda1_grid.size() > 1 && !(validation_fraction > 0.0))
    throw ConfigError("lambda1 grid selection needs a validation split");
  if (rounds < 0) throw ConfigError("rounds must be nonnegative");
  if (!(local_radius > 0.0 && local_radius < 1.0))
    throw ConfigError("local radius must lie in (0, 1)");
  if (m_local < 0) throw ConfigError("local sample count must be nonnegative");
  if (!(prune_rel_tol >= 0.0 && prune_rel_tol <= 1.0))
    throw ConfigError("prune tolerance must lie in [0, 1]");
  if (!(cluster_threshold > 0.0 && cluster_threshold < 1.0))
    throw ConfigError("cluster threshold must lie in (0, 1)");
  if (!(validation_fraction >= 0.0 && validation_fraction <= 0.5))
    throw ConfigError("validation fraction must lie in [0, 0.5]");
}

namespace {

Dictionary build_design(const PoleSet& ps, const Eigen::VectorXd& u) {
  return normalize_columns(convolved_design(ps, u));
}

double pick_lambda1(const PipelineConfig& cfg, const PoleSet& ps,
                    const TimeSeries& data, double lambda2) {
  if (cfg.lambda1_grid.size() == 1) return cfg.lambda1_grid[0];
  const int N = data.length();
  const int n_val = std::max(1, static_cast<int>(std::lround(
                                    cfg.validation_fraction * N)));
  const int n_train = N - n_val;
  if (n_train < 2) throw ConfigError("validation split leaves no training data");

  TimeSeries train;
  train.u = data.u.head(n_train);
  train.y = data.y.head(n_train);
  Dictionary dict = build_design(ps, train.u);

  double best_l1 = cfg.lambda1_grid[0];
  double best_err = std::numeric_limits<double>::infinity();
  for (double l1 : cfg.lambda1_grid) {
    ConicProblem cp = compile(dict, train, l1, lambda2, cfg.constraints,
                              cfg.fit_feedthrough);
    FitReport rep = fit(cp, cfg.solver);
    if (!rep.feasible) continue;
    Eigen::VectorXd yhat = simulate(rep.model, data.u);
    double err = (data.y.tail(n_val) - yhat.tail(n_val)).norm();
    if (err < best_err) {
      best_err = err;
      best_l1 = l1;
    }
  }
  return best_l1;
}

std::vector<int> active_set(const RafModel& model, double rel_tol) {
  double top = 0.0;
  for (const Complex& c : model.residues) top = std::max(top, std::abs(c));
  std::vector<int> act;
  if (top <= 0.0) return act;
  for (int g = 0; g < model.group_count(); ++g)
    if (std::abs(model.residues[static_cast<std::size_t>(g)]) >= rel_tol * top)
      act.push_back(g);
  return act;
}

// Draw inside the pseudo-hyperbolic ball around `center` via the disk
// automorphism w -> (center + w) / (1 + conj(center) w).
Complex draw_local(Complex center, double radius, Rng& rng) {
  double r = radius * std::sqrt(rng.uniform());
  double th = 2.0 * kPi * rng.uniform();
  Complex w = std::polar(r, th);
  Complex p = (center + w) / (1.0 + std::conj(center) * w);
  if (std::abs(p.imag()) < kRealAxisSnap) p = Complex(p.real(), 0.0);
  return p;
}

void append_group(PoleSet& ps, Complex p) {
  const int idx = ps.size();
  if (p.imag() == 0.0) {
    ps.poles.push_back(p);
    ps.pair_index.push_back(idx);
  } else {
    if (p.imag() < 0.0) p = std::conj(p);
    ps.poles.push_back(p);
    ps.poles.push_back(std::conj(p));
    ps.pair_index.push_back(idx + 1);
    ps.pair_index.push_back(idx);
  }
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg, const TimeSeries& data) {
  cfg.validate();
  data.validate();
  if (data.y.size() == 0) throw ConfigError("pipeline needs measured outputs");

  PipelineResult out;
  PoleSet poles = sample_poles(cfg.region, cfg.m_groups, cfg.seed);
  Dictionary dict = build_design(poles, data.u);
  const double lambda2 =
      cfg.lambda2 < 0.0 ? default_lambda2(dict) : cfg.lambda2;
  const double lambda1 = pick_lambda1(cfg, poles, data, lambda2);
  out.chosen_lambda1 = lambda1;

  RafModel model;
  Dictionary fit_dict = dict;  // dictionary the current model was fitted on
  bool have_prev = false;
  for (int round = 0;; ++round) {
    ConicProblem cp = compile(dict, data, lambda1, lambda2, cfg.constraints,
                              cfg.fit_feedthrough);
    // warm start from the previous round; merged dictionaries keep earlier
    // groups as a prefix
    Eigen::VectorXd warm;
    const Eigen::VectorXd* wp = nullptr;
    if (have_prev) {
      std::vector<Complex> padded = model.residues;
      padded.resize(cp.groups.size(), Complex(0.0, 0.0));
      warm = pack_solution(cp, padded, model.feedthrough);
      wp = &warm;
    }
    FitReport rep = cfg.reweight ? fit_reweighted(cp, cfg.solver, wp)
                                 : fit(cp, cfg.solver, wp);
    RoundReport rr;
    rr.round = round;
    rr.dict_groups = dict.n_groups();
    rr.lambda1 = lambda1;
    rr.solve = rep.info;
    if (!rep.feasible) {
      out.rounds.push_back(rr);
      if (!have_prev) {
        out.feasible = false;
        return out;
      }
      // Merged dictionaries only grow the feasible set, so an infeasibility
      // report on a refinement round is solver noise. Finalize from the last
      // solved round; the failed attempt stays in the report.
      break;
    }
    model = rep.model;
    fit_dict = dict;
    have_prev = true;
    rr.objective = rep.info.objective;
    rr.budgets = budgets(model, 0, 0);

    std::vector<int> act = active_set(model, cfg.prune_rel_tol);
    rr.active_groups = static_cast<int>(act.size());
    if (act.empty()) {
      out.rounds.push_back(rr);
      out.empty_model = true;
      out.full_model = model;
      out.model = model;
      out.model.diagnostics.warning = true;
      out.model.diagnostics.message = "empty active set";
      return out;
    }

    std::vector<Complex> act_poles;
    std::vector<double> act_w;
    for (int g : act) {
      act_poles.push_back(
          dict.pole_set.poles[static_cast<std::size_t>(
              dict.group_rep[static_cast<std::size_t>(g)])]);
      act_w.push_back(std::abs(model.residues[static_cast<std::size_t>(g)]));
    }
    auto clusters =
        cluster_active(act_poles, act_w, cfg.cluster_threshold);
    for (const auto& c : clusters) rr.cluster_reps.push_back(c.representative);
    out.rounds.push_back(rr);

    if (round == cfg.rounds) break;

    // local resampling around cluster representatives, hard priors kept by
    // rejection into the original region
    Rng rng(Rng::derive(cfg.seed, 1000 + static_cast<std::uint64_t>(round)));
    const int nc = static_cast<int>(clusters.size());
    for (int k = 0; k < cfg.m_local; ++k) {
      Complex center = clusters[static_cast<std::size_t>(k % nc)].representative;
      for (int attempt = 0; attempt < 200; ++attempt) {
        Complex p = draw_local(center, cfg.local_radius, rng);
        if (!cfg.region.contains(p)) continue;
        bool dup = false;
        for (const Complex& q : poles.poles)
          if (pseudo_hyperbolic(p, q) < kMergeDedupTol) {
            dup = true;
            break;
          }
        if (dup) continue;
        append_group(poles, p);
        break;
      }
    }
    dict = build_design(poles, data.u);
  }

  PruneResult pr = prune(model, fit_dict, data, cfg.constraints,
                         cfg.prune_rel_tol, lambda2, cfg.fit_feedthrough,
                         cfg.solver);
  out.model = pr.model;
  out.full_model = model;
  out.active_groups = pr.active_groups;
  out.empty_model = pr.empty_model;
  return out;
}

Score score(const RafModel& model, const RafModel& truth, int horizon,
            const Eigen::VectorXd& u, const ConstraintSet* cs) {
  if (horizon < 1) throw ConfigError("score horizon must be positive");
  Score s;
  Eigen::VectorXd hm = impulse_response(model, horizon);
  Eigen::VectorXd ht = impulse_response(truth, horizon);
  s.impulse_rmse = std::sqrt((hm - ht).squaredNorm() / horizon);
  Eigen::VectorXd ym = simulate(model, u);
  Eigen::VectorXd yt = simulate(truth, u);
  double denom = (yt.array() - yt.mean()).matrix().norm();
  s.sim_fit_pct = 100.0 * (1.0 - (ym - yt).norm() / std::max(denom, 1e-12));
  if (cs) s.prior_violation = raf::prior_violation(model, *cs);
  return s;
}

}  // namespace raf
