#include "raf/model.hpp"

#include <cmath>

namespace raf {

void RafModel::validate() const {
  if (group_rep.size() != residues.size())
    throw ConfigError("model group/residue size mismatch");
  for (int g = 0; g < group_count(); ++g) {
    Complex p = group_pole(g);
    if (!(std::abs(p) < 1.0)) throw ConfigError("model pole outside the open disk");
    if (group_is_real(g) && residues[static_cast<std::size_t>(g)].imag() != 0.0)
      throw ConfigError("real pole carries a complex residue");
  }
}

BudgetReport budgets(const RafModel& model, int t_s, int t_step) {
  BudgetReport rep;
  rep.dc_gain = model.feedthrough;
  for (int g = 0; g < model.group_count(); ++g) {
    Complex p = model.group_pole(g);
    Complex c = model.residues[static_cast<std::size_t>(g)];
    double mult = model.group_is_real(g) ? 1.0 : 2.0;
    double r = std::abs(p);
    double a = std::abs(c);
    rep.settling += mult * a * std::pow(r, t_s);
    rep.l1_tail += mult * a * std::pow(r, t_s) / (1.0 - r);
    rep.bibo += mult * a / (1.0 - r);
    rep.step_tail += mult * a * std::pow(r, t_step + 1) / std::abs(1.0 - p);
    rep.dc_gain += mult * (c / (1.0 - p)).real();
  }
  return rep;
}

std::vector<Complex> frequency_response(const RafModel& model,
                                        const std::vector<double>& omega) {
  std::vector<Complex> out;
  out.reserve(omega.size());
  for (double w : omega) {
    Complex z{std::cos(w), -std::sin(w)};  // e^{-i omega}
    Complex g{model.feedthrough, 0.0};
    for (int k = 0; k < model.group_count(); ++k) {
      Complex p = model.group_pole(k);
      Complex c = model.residues[static_cast<std::size_t>(k)];
      g += c / (1.0 - p * z);
      if (!model.group_is_real(k)) g += std::conj(c) / (1.0 - std::conj(p) * z);
    }
    out.push_back(g);
  }
  return out;
}

Eigen::VectorXd impulse_response(const RafModel& model, int length) {
  if (length < 1) throw ConfigError("impulse length must be positive");
  Eigen::VectorXd h = Eigen::VectorXd::Zero(length);
  for (int g = 0; g < model.group_count(); ++g) {
    Complex p = model.group_pole(g);
    Complex c = model.residues[static_cast<std::size_t>(g)];
    double mult = model.group_is_real(g) ? 1.0 : 2.0;
    Complex pw{1.0, 0.0};
    for (int t = 0; t < length; ++t) {
      h(t) += mult * (c * pw).real();
      pw *= p;
    }
  }
  h(0) += model.feedthrough;
  return h;
}

Eigen::VectorXd simulate(const RafModel& model, const Eigen::VectorXd& u) {
  const int T = static_cast<int>(u.size());
  Eigen::VectorXd y = model.feedthrough * u;
  for (int g = 0; g < model.group_count(); ++g) {
    Complex p = model.group_pole(g);
    Complex c = model.residues[static_cast<std::size_t>(g)];
    double mult = model.group_is_real(g) ? 1.0 : 2.0;
    Complex state{0.0, 0.0};
    for (int t = 0; t < T; ++t) {
      state = p * state + u(t);
      y(t) += mult * (c * state).real();
    }
  }
  return y;
}

}  // namespace raf
