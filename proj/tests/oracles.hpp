// Independent reference implementations the tests check library results
// against.  Everything here is deliberately naive: direct sums, dense
// quadrature, O(N^2) convolution.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "raf/model.hpp"
#include "raf/pole.hpp"
#include "raf/rng.hpp"

namespace oracle {

using raf::Complex;

inline Complex gram_direct(Complex p_i, Complex p_j, int T) {
  Complex s(0.0, 0.0);
  Complex a(1.0, 0.0), b(1.0, 0.0);
  for (int t = 0; t < T; ++t) {
    s += std::conj(a) * b;
    a *= p_i;
    b *= p_j;
  }
  return s;
}

// h(t) = D delta(t) + sum_g mult_g Re(c_g p_g^t), each power taken directly
// rather than by the library's running recursion.
inline Eigen::VectorXd impulse_direct(const raf::RafModel& m, int length) {
  Eigen::VectorXd h = Eigen::VectorXd::Zero(length);
  if (length > 0) h(0) += m.feedthrough;
  for (int g = 0; g < m.group_count(); ++g) {
    const Complex p = m.group_pole(g);
    const Complex c = m.residues[static_cast<size_t>(g)];
    const double mult = m.group_is_real(g) ? 1.0 : 2.0;
    for (int t = 0; t < length; ++t) {
      Complex pt = t == 0 ? Complex(1.0, 0.0) : std::pow(p, t);
      h(t) += mult * (c * pt).real();
    }
  }
  return h;
}

inline Eigen::VectorXd convolve_direct(const Eigen::VectorXd& h,
                                       const Eigen::VectorXd& u) {
  const int n = static_cast<int>(u.size());
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (int t = 0; t < n; ++t)
    for (int tau = 0; tau <= t; ++tau)
      y(t) += h(tau) * u(t - tau);
  return y;
}

// Random stable model: n_pairs conjugate pairs plus n_real real poles, with
// radii bounded away from 1.
inline raf::RafModel random_model(raf::Rng& rng, int n_pairs, int n_real,
                                  double rho_max = 0.95) {
  raf::RafModel m;
  for (int k = 0; k < n_pairs; ++k) {
    double r = rho_max * std::sqrt(rng.uniform());
    double th = rng.uniform(0.05, 3.0);
    Complex p = std::polar(r, th);
    int i = m.poles.size();
    m.poles.poles.push_back(p);
    m.poles.poles.push_back(std::conj(p));
    m.poles.pair_index.push_back(i + 1);
    m.poles.pair_index.push_back(i);
    m.group_rep.push_back(i);
    m.residues.emplace_back(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  }
  for (int k = 0; k < n_real; ++k) {
    double p = rng.uniform(-rho_max, rho_max);
    int i = m.poles.size();
    m.poles.poles.emplace_back(p, 0.0);
    m.poles.pair_index.push_back(i);
    m.group_rep.push_back(i);
    m.residues.emplace_back(rng.uniform(-1.0, 1.0), 0.0);
  }
  return m;
}

// E[p^s conj(p)^t] of a sampling law by dense trapezoid quadrature over the
// radius (law-weighted) and the angle bands (uniform), symmetrized over
// conjugation: the integrand reduces to r^{s+t} cos((s-t) theta).
inline double region_moment_quadrature(const raf::PoleRegion& rg, int s, int t,
                                       int nr = 4000, int nth = 4000) {
  const int k = s + t;
  const int d = std::abs(s - t);

  auto radial_mean = [&](auto f) {
    const double lo = rg.rho_min, hi = rg.rho_max;
    if (hi == lo) return f(lo);
    double acc = 0.0;
    if (rg.radial_law == raf::RadialLaw::LogTimeConstant) {
      const double a_lo = -std::log(hi), a_hi = -std::log(lo);
      for (int i = 0; i <= nr; ++i) {
        double a = a_lo + (a_hi - a_lo) * i / nr;
        double w = (i == 0 || i == nr) ? 0.5 : 1.0;
        acc += w * f(std::exp(-a));
      }
      return acc / nr;
    }
    for (int i = 0; i <= nr; ++i) {
      double r = lo + (hi - lo) * i / nr;
      double w = (i == 0 || i == nr) ? 0.5 : 1.0;
      if (rg.radial_law == raf::RadialLaw::UniformArea) w *= 2.0 * r;
      acc += w * f(r);
    }
    double norm = 0.0;
    for (int i = 0; i <= nr; ++i) {
      double r = lo + (hi - lo) * i / nr;
      double w = (i == 0 || i == nr) ? 0.5 : 1.0;
      if (rg.radial_law == raf::RadialLaw::UniformArea) w *= 2.0 * r;
      norm += w;
    }
    return acc / norm;
  };

  const double rmom = radial_mean([&](double r) { return std::pow(r, k); });

  const auto bands = rg.effective_bands();
  double total_len = 0.0;
  for (const auto& b : bands) total_len += b[1] - b[0];
  double cmom = 0.0;
  if (total_len <= 0.0) {
    for (const auto& b : bands) cmom += std::cos(d * b[0]);
    cmom /= static_cast<double>(bands.size());
  } else {
    for (const auto& b : bands) {
      if (b[1] == b[0]) continue;
      double acc = 0.0;
      for (int i = 0; i <= nth; ++i) {
        double th = b[0] + (b[1] - b[0]) * i / nth;
        double w = (i == 0 || i == nth) ? 0.5 : 1.0;
        acc += w * std::cos(d * th);
      }
      cmom += acc * (b[1] - b[0]) / nth;
    }
    cmom /= total_len;
  }
  return rmom * cmom;
}

}  // namespace oracle
