#include "raf/conic.hpp"

#include <cmath>
#include <numeric>

namespace raf {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

bool ConstraintSet::empty() const {
  return !time_box && windows.empty() && !freq_mask && !settling && !l1_tail &&
         !bibo && !relative_degree && !dc_equal && !dc_bound && !monotone;
}

bool ConstraintSet::needs_epigraph() const {
  return settling.has_value() || l1_tail.has_value() || bibo.has_value();
}

void ConstraintSet::validate(int horizon) const {
  if (time_box) {
    const auto& e = time_box->eps;
    if (e.size() != 1 && static_cast<int>(e.size()) != horizon)
      throw ConfigError("time box needs one tolerance or one per sample");
    for (double v : e)
      if (!(v >= 0.0)) throw ConfigError("time box tolerance must be nonnegative");
  }
  for (const auto& w : windows) {
    if (w.lo < 0 || w.hi <= w.lo || w.hi > horizon)
      throw ConfigError("window index range out of bounds");
    if (!w.weights.empty() &&
        static_cast<int>(w.weights.size()) != w.hi - w.lo)
      throw ConfigError("window weight length mismatch");
    for (double v : w.weights)
      if (!(v >= 0.0)) throw ConfigError("window weights must be nonnegative");
    if (!(w.eta >= 0.0)) throw ConfigError("window budget must be nonnegative");
  }
  if (freq_mask) {
    if (freq_mask->omega.empty() ||
        freq_mask->omega.size() != freq_mask->gamma.size())
      throw ConfigError("frequency mask grid/bound size mismatch");
    for (double w : freq_mask->omega)
      if (!(w >= 0.0 && w <= kPi))
        throw ConfigError("frequency grid point outside [0, pi]");
    for (double g : freq_mask->gamma)
      if (!(g >= 0.0)) throw ConfigError("frequency bound must be nonnegative");
  }
  if (settling && (settling->t_s < 0 || !(settling->eps_h >= 0.0)))
    throw ConfigError("settling budget must be nonnegative");
  if (l1_tail && (l1_tail->t_s < 0 || !(l1_tail->budget >= 0.0)))
    throw ConfigError("l1 tail budget must be nonnegative");
  if (bibo && !(bibo->h_max >= 0.0))
    throw ConfigError("bibo budget must be nonnegative");
  if (step_tail && (step_tail->t < 0 || !(step_tail->budget >= 0.0)))
    throw ConfigError("step tail budget must be nonnegative");
  if (relative_degree &&
      (relative_degree->r_d < 0 || relative_degree->r_d >= horizon))
    throw ConfigError("relative degree must lie in [0, horizon)");
  if (dc_bound && !(dc_bound->g_max >= 0.0))
    throw ConfigError("dc bound must be nonnegative");
}

int ConicProblem::cone_rows() const {
  return n_zero + n_nonneg +
         std::accumulate(soc_dims.begin(), soc_dims.end(), 0);
}

void ConicProblem::validate() const {
  if (B.cols() != layout.total || H.cols() != layout.total)
    throw ConfigError("conic problem variable count mismatch");
  if (H.rows() != cone_rows() || h.size() != H.rows())
    throw ConfigError("conic problem cone rows mismatch");
  if (static_cast<int>(groups.size()) != layout.n_groups ||
      group_weights.size() != groups.size() || norms.size() != groups.size())
    throw ConfigError("conic problem group metadata mismatch");
}

namespace {

struct RowBuilder {
  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> offsets;

  void add(Eigen::RowVectorXd row, double offset) {
    rows.push_back(std::move(row));
    offsets.push_back(offset);
  }
  int size() const { return static_cast<int>(rows.size()); }
};

}  // namespace

ConicProblem compile(const Dictionary& dict_in, const TimeSeries& data,
                     double lambda1, double lambda2, const ConstraintSet& cs,
                     bool fit_d) {
  const Dictionary dict =
      dict_in.normalized ? dict_in : normalize_columns(dict_in);
  const int T = dict.horizon;
  if (T != data.length())
    throw ConfigError("dictionary horizon does not match data length");
  data.validate();
  cs.validate(T);
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0))
    throw ConfigError("penalty weights must be nonnegative");

  const int n_groups = static_cast<int>(dict.groups.size());
  if (cs.monotone) {
    for (int g = 0; g < n_groups; ++g) {
      int rep = dict.group_rep[static_cast<std::size_t>(g)];
      Complex p = dict.pole_set.poles[static_cast<std::size_t>(rep)];
      if (!dict.pole_set.is_real(rep) || !(p.real() > 0.0))
        throw ConfigError("monotone prior requires real poles in (0, 1)");
    }
  }

  ConicProblem cp;
  cp.lambda1 = lambda1;
  cp.lambda2 = lambda2;
  cp.pole_set = dict.pole_set;
  cp.group_rep = dict.group_rep;
  cp.norms = dict.norms;
  cp.groups = dict.groups;
  cp.group_weights.assign(static_cast<std::size_t>(n_groups), 1.0);

  VariableLayout& lay = cp.layout;
  lay.n_coeff = static_cast<int>(dict.columns.cols());
  lay.n_groups = n_groups;
  int next = lay.n_coeff;
  if (fit_d) lay.d_index = next++;
  if (cs.needs_epigraph()) {
    lay.a_offset = next;
    next += n_groups;
  }
  lay.total = next;

  cp.y = data.y;
  cp.B = Eigen::MatrixXd::Zero(T, lay.total);
  cp.B.leftCols(lay.n_coeff) = dict.columns;
  if (fit_d) cp.B.col(lay.d_index) = data.u;

  auto group_pole = [&](int g) {
    return dict.pole_set.poles[static_cast<std::size_t>(
        dict.group_rep[static_cast<std::size_t>(g)])];
  };
  auto group_real = [&](int g) {
    return dict.pole_set.is_real(dict.group_rep[static_cast<std::size_t>(g)]);
  };
  auto zero_row = [&] { return Eigen::RowVectorXd::Zero(lay.total).eval(); };

  // Row of the dc gain D + sum_m c_m / (1 - p_m) over solver variables.
  auto dc_row = [&] {
    Eigen::RowVectorXd row = zero_row();
    for (int g = 0; g < n_groups; ++g) {
      double eta = dict.norms[static_cast<std::size_t>(g)];
      const auto& cols = dict.groups[static_cast<std::size_t>(g)];
      Complex p = group_pole(g);
      if (group_real(g)) {
        row(cols[0]) += 1.0 / ((1.0 - p.real()) * eta);
      } else {
        Complex zeta = 1.0 / (1.0 - p);
        row(cols[0]) += 2.0 * zeta.real() / eta;
        row(cols[1]) -= 2.0 * zeta.imag() / eta;
      }
    }
    if (fit_d) row(lay.d_index) = 1.0;
    return row;
  };

  // Re/Im rows of G(e^{i omega}) over solver variables.
  auto freq_rows = [&](double omega) {
    Eigen::RowVectorXd re = zero_row();
    Eigen::RowVectorXd im = zero_row();
    Complex z{std::cos(omega), -std::sin(omega)};
    for (int g = 0; g < n_groups; ++g) {
      double eta = dict.norms[static_cast<std::size_t>(g)];
      const auto& cols = dict.groups[static_cast<std::size_t>(g)];
      Complex p = group_pole(g);
      if (group_real(g)) {
        Complex zeta = 1.0 / (1.0 - p * z);
        re(cols[0]) += zeta.real() / eta;
        im(cols[0]) += zeta.imag() / eta;
      } else {
        Complex z1 = 1.0 / (1.0 - p * z);
        Complex z2 = 1.0 / (1.0 - std::conj(p) * z);
        re(cols[0]) += (z1 + z2).real() / eta;
        re(cols[1]) -= (z1 - z2).imag() / eta;
        im(cols[0]) += (z1 + z2).imag() / eta;
        im(cols[1]) += (z1 - z2).real() / eta;
      }
    }
    if (fit_d) re(lay.d_index) = 1.0;
    return std::make_pair(re, im);
  };

  // Row of h(k) = sum_m c_m p_m^k; the feedthrough joins the k = 0 tap.
  auto tap_row = [&](int k) {
    Eigen::RowVectorXd row = zero_row();
    for (int g = 0; g < n_groups; ++g) {
      double eta = dict.norms[static_cast<std::size_t>(g)];
      const auto& cols = dict.groups[static_cast<std::size_t>(g)];
      Complex pk = std::pow(group_pole(g), k);
      if (group_real(g)) {
        row(cols[0]) += pk.real() / eta;
      } else {
        row(cols[0]) += 2.0 * pk.real() / eta;
        row(cols[1]) -= 2.0 * pk.imag() / eta;
      }
    }
    if (k == 0 && fit_d) row(lay.d_index) = 1.0;
    return row;
  };

  RowBuilder zero, nonneg, soc;

  if (cs.relative_degree) {
    for (int k = 0; k < cs.relative_degree->r_d; ++k) zero.add(tap_row(k), 0.0);
  }
  if (cs.dc_equal) zero.add(dc_row(), -cs.dc_equal->g0);

  if (cs.time_box) {
    const auto& e = cs.time_box->eps;
    for (int t = 0; t < T; ++t) {
      double eps = e.size() == 1 ? e[0] : e[static_cast<std::size_t>(t)];
      nonneg.add(cp.B.row(t), eps - data.y(t));
      nonneg.add(-cp.B.row(t), eps + data.y(t));
    }
  }
  if (cs.dc_bound) {
    Eigen::RowVectorXd row = dc_row();
    nonneg.add(-row, cs.dc_bound->g_max);
    nonneg.add(row, cs.dc_bound->g_max);
  }

  auto budget_row = [&](auto weight_of) {
    Eigen::RowVectorXd row = zero_row();
    for (int g = 0; g < n_groups; ++g) {
      double mult = group_real(g) ? 1.0 : 2.0;
      row(lay.a_offset + g) = -mult * weight_of(std::abs(group_pole(g)));
    }
    return row;
  };
  if (cs.settling) {
    int ts = cs.settling->t_s;
    nonneg.add(budget_row([&](double r) { return std::pow(r, ts); }),
               cs.settling->eps_h);
  }
  if (cs.bibo)
    nonneg.add(budget_row([](double r) { return 1.0 / (1.0 - r); }),
               cs.bibo->h_max);
  if (cs.l1_tail) {
    int ts = cs.l1_tail->t_s;
    nonneg.add(
        budget_row([&](double r) { return std::pow(r, ts) / (1.0 - r); }),
        cs.l1_tail->budget);
  }
  if (cs.monotone) {
    for (int g = 0; g < n_groups; ++g) {
      Eigen::RowVectorXd row = zero_row();
      row(dict.groups[static_cast<std::size_t>(g)][0]) = 1.0;
      nonneg.add(row, 0.0);
    }
  }

  for (const auto& w : cs.windows) {
    cp.soc_dims.push_back(1 + (w.hi - w.lo));
    soc.add(zero_row(), w.eta);
    for (int t = w.lo; t < w.hi; ++t) {
      double wt = w.weights.empty()
                      ? 1.0
                      : w.weights[static_cast<std::size_t>(t - w.lo)];
      soc.add(-wt * cp.B.row(t), wt * data.y(t));
    }
  }
  if (cs.freq_mask) {
    for (std::size_t k = 0; k < cs.freq_mask->omega.size(); ++k) {
      auto [re, im] = freq_rows(cs.freq_mask->omega[k]);
      cp.soc_dims.push_back(3);
      soc.add(zero_row(), cs.freq_mask->gamma[k]);
      soc.add(re, 0.0);
      soc.add(im, 0.0);
    }
  }
  if (cs.needs_epigraph()) {
    for (int g = 0; g < n_groups; ++g) {
      double eta = dict.norms[static_cast<std::size_t>(g)];
      const auto& cols = dict.groups[static_cast<std::size_t>(g)];
      cp.soc_dims.push_back(1 + static_cast<int>(cols.size()));
      Eigen::RowVectorXd head = zero_row();
      head(lay.a_offset + g) = 1.0;
      soc.add(head, 0.0);
      for (int c : cols) {
        Eigen::RowVectorXd row = zero_row();
        row(c) = 1.0 / eta;
        soc.add(row, 0.0);
      }
    }
  }

  cp.n_zero = zero.size();
  cp.n_nonneg = nonneg.size();
  const int rows = zero.size() + nonneg.size() + soc.size();
  cp.H.resize(rows, lay.total);
  cp.h.resize(rows);
  int r = 0;
  for (const RowBuilder* b : {&zero, &nonneg, &soc}) {
    for (int i = 0; i < b->size(); ++i, ++r) {
      cp.H.row(r) = b->rows[static_cast<std::size_t>(i)];
      cp.h(r) = b->offsets[static_cast<std::size_t>(i)];
    }
  }
  cp.validate();
  return cp;
}

double prior_violation(const RafModel& model, const ConstraintSet& cs,
                       const TimeSeries* data) {
  double worst = 0.0;
  auto hit = [&](double v) { worst = std::max(worst, v); };

  if (cs.settling)
    hit(budgets(model, cs.settling->t_s, 0).settling - cs.settling->eps_h);
  if (cs.bibo) hit(budgets(model, 0, 0).bibo - cs.bibo->h_max);
  if (cs.l1_tail)
    hit(budgets(model, cs.l1_tail->t_s, 0).l1_tail - cs.l1_tail->budget);
  if (cs.dc_equal || cs.dc_bound) {
    double dc = budgets(model, 0, 0).dc_gain;
    if (cs.dc_equal) hit(std::abs(dc - cs.dc_equal->g0));
    if (cs.dc_bound) hit(std::abs(dc) - cs.dc_bound->g_max);
  }
  if (cs.freq_mask) {
    auto g = frequency_response(model, cs.freq_mask->omega);
    for (std::size_t k = 0; k < g.size(); ++k)
      hit(std::abs(g[k]) - cs.freq_mask->gamma[k]);
  }
  if (cs.relative_degree && cs.relative_degree->r_d > 0) {
    Eigen::VectorXd taps =
        impulse_response(model, cs.relative_degree->r_d);
    hit(taps.cwiseAbs().maxCoeff());
  }
  if (cs.monotone)
    for (const Complex& c : model.residues) hit(-c.real());

  if (data && (cs.time_box || !cs.windows.empty())) {
    Eigen::VectorXd residual = data->y - simulate(model, data->u);
    if (cs.time_box) {
      const auto& e = cs.time_box->eps;
      for (int t = 0; t < residual.size(); ++t) {
        double eps = e.size() == 1 ? e[0] : e[static_cast<std::size_t>(t)];
        hit(std::abs(residual(t)) - eps);
      }
    }
    for (const auto& w : cs.windows) {
      double sq = 0.0;
      for (int t = w.lo; t < w.hi; ++t) {
        double wt = w.weights.empty()
                        ? 1.0
                        : w.weights[static_cast<std::size_t>(t - w.lo)];
        sq += wt * wt * residual(t) * residual(t);
      }
      hit(std::sqrt(sq) - w.eta);
    }
  }
  return std::max(worst, 0.0);
}

}  // namespace raf
