#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "raf/model.hpp"
#include "raf/rng.hpp"

using namespace raf;
using doctest::Approx;

namespace {

RafModel one_real(double p, double c, double d = 0.0) {
  RafModel m;
  m.poles.poles = {Complex(p, 0.0)};
  m.poles.pair_index = {0};
  m.group_rep = {0};
  m.residues = {Complex(c, 0.0)};
  m.feedthrough = d;
  return m;
}

RafModel one_pair(Complex p, Complex c, double d = 0.0) {
  RafModel m;
  m.poles.poles = {p, std::conj(p)};
  m.poles.pair_index = {1, 0};
  m.group_rep = {0};
  m.residues = {c};
  m.feedthrough = d;
  return m;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("budget hand values for a single real pole") {
  BudgetReport b = budgets(one_real(0.5, 1.0), 0, 0);
  CHECK(b.settling == Approx(1.0).epsilon(1e-15));
  CHECK(b.bibo == Approx(2.0).epsilon(1e-15));
  CHECK(b.l1_tail == Approx(2.0).epsilon(1e-15));
  CHECK(b.dc_gain == Approx(2.0).epsilon(1e-15));
  CHECK(b.step_tail == Approx(1.0).epsilon(1e-15));

  BudgetReport later = budgets(one_real(0.5, 1.0), 3, 0);
  CHECK(later.settling == Approx(0.125).epsilon(1e-15));
  CHECK(later.l1_tail == Approx(0.25).epsilon(1e-15));
  CHECK(later.bibo == Approx(2.0).epsilon(1e-15));
}

TEST_CASE("budgets count a conjugate pair twice") {
  Complex p = std::polar(0.9, 0.4);
  Complex c(0.3, -0.2);
  BudgetReport b = budgets(one_pair(p, c, 0.7), 5, 2);
  double a = std::abs(c);
  CHECK(b.settling == Approx(2.0 * a * std::pow(0.9, 5)).epsilon(1e-13));
  CHECK(b.bibo == Approx(2.0 * a / 0.1).epsilon(1e-13));
  CHECK(b.l1_tail == Approx(2.0 * a * std::pow(0.9, 5) / 0.1).epsilon(1e-13));
  CHECK(b.step_tail ==
        Approx(2.0 * a * std::pow(0.9, 3) / std::abs(1.0 - p)).epsilon(1e-13));
  CHECK(b.dc_gain == Approx(0.7 + 2.0 * (c / (1.0 - p)).real()).epsilon(1e-13));
}

TEST_CASE("bibo budget dominates the l1 norm of the impulse response") {
  Rng rng(61);
  for (int rep = 0; rep < 200; ++rep) {
    RafModel m = oracle::random_model(rng, 2, 1, 0.9);
    BudgetReport b = budgets(m, 0, 0);
    Eigen::VectorXd h = impulse_response(m, 2000);
    CHECK(h.cwiseAbs().sum() <= b.bibo + 1e-9);
  }
}

TEST_CASE("settling budget bounds the tail envelope") {
  Rng rng(62);
  for (int rep = 0; rep < 100; ++rep) {
    RafModel m = oracle::random_model(rng, 2, 1, 0.9);
    int t_s = 10 + static_cast<int>(rng.uniform() * 20);
    BudgetReport b = budgets(m, t_s, 0);
    Eigen::VectorXd h = impulse_response(m, t_s + 200);
    for (int t = t_s; t < t_s + 200; ++t)
      CHECK(std::abs(h(t)) <= b.settling + 1e-12);
  }
}

TEST_CASE("step tail bounds the distance to the final value") {
  Rng rng(63);
  for (int rep = 0; rep < 1000; ++rep) {
    RafModel m = oracle::random_model(rng, 2, 1, 0.85);
    m.feedthrough = rng.uniform(-1.0, 1.0);
    int t = 1 + static_cast<int>(rng.uniform() * 30);
    BudgetReport b = budgets(m, 0, t);
    Eigen::VectorXd u = Eigen::VectorXd::Ones(t + 1);
    Eigen::VectorXd y = simulate(m, u);
    double s_inf = budgets(m, 0, 0).dc_gain;
    CHECK(std::abs(s_inf - y(t)) <= b.step_tail + 1e-9);
  }
}

TEST_CASE("frequency response hand values and symmetry") {
  RafModel m = one_real(0.5, 1.0);
  auto g = frequency_response(m, {0.0, 3.14159265358979323846});
  CHECK(g[0].real() == Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(g[0].imag()) < 1e-15);
  CHECK(g[1].real() == Approx(2.0 / 3.0).epsilon(1e-14));

  RafModel d_only = one_real(0.0, 0.0, 1.0);
  auto gd = frequency_response(d_only, {0.0, 1.0, 2.0});
  for (const Complex& v : gd) CHECK(std::abs(v - Complex(1.0, 0.0)) < 1e-15);

  // A conjugate-closed model has a real response at omega = 0 and pi.
  RafModel pair = one_pair(std::polar(0.8, 1.2), Complex(0.4, 0.3));
  auto gp = frequency_response(pair, {0.0, 3.14159265358979323846});
  CHECK(std::abs(gp[0].imag()) < 1e-14);
  CHECK(std::abs(gp[1].imag()) < 1e-14);
  // And matches the dc gain at omega = 0.
  CHECK(gp[0].real() == Approx(budgets(pair, 0, 0).dc_gain).epsilon(1e-13));
}

TEST_CASE("frequency response matches a long dft of the impulse response") {
  Rng rng(64);
  for (int rep = 0; rep < 20; ++rep) {
    RafModel m = oracle::random_model(rng, 2, 1, 0.8);
    m.feedthrough = rng.uniform(-1.0, 1.0);
    double w = rng.uniform(0.0, 3.14159);
    Complex g = frequency_response(m, {w})[0];
    Eigen::VectorXd h = impulse_response(m, 400);
    Complex dft(0.0, 0.0);
    for (int t = 0; t < 400; ++t)
      dft += h(t) * std::exp(Complex(0.0, -w * t));
    CHECK(std::abs(g - dft) < 1e-10);
  }
}

TEST_CASE("impulse response equals the direct power sum") {
  Rng rng(65);
  for (int rep = 0; rep < 100; ++rep) {
    RafModel m = oracle::random_model(rng, 3, 2, 0.95);
    m.feedthrough = rng.uniform(-1.0, 1.0);
    Eigen::VectorXd h = impulse_response(m, 60);
    Eigen::VectorXd want = oracle::impulse_direct(m, 60);
    CHECK((h - want).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(impulse_response(one_real(0.5, 1.0), 0), ConfigError);
}

TEST_CASE("simulation is convolution with the impulse response") {
  Rng rng(66);
  for (int rep = 0; rep < 100; ++rep) {
    RafModel m = oracle::random_model(rng, 2, 1, 0.9);
    m.feedthrough = rng.uniform(-1.0, 1.0);
    const int N = 50;
    Eigen::VectorXd u(N);
    for (int t = 0; t < N; ++t) u(t) = rng.uniform(-1.0, 1.0);
    Eigen::VectorXd y = simulate(m, u);
    Eigen::VectorXd want = oracle::convolve_direct(impulse_response(m, N), u);
    double scale = std::max(1.0, want.cwiseAbs().maxCoeff());
    CHECK((y - want).cwiseAbs().maxCoeff() < 1e-11 * scale);
  }
}

TEST_CASE("simulating an impulse returns the impulse response") {
  Rng rng(67);
  RafModel m = oracle::random_model(rng, 2, 2, 0.9);
  m.feedthrough = 0.3;
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(40);
  delta(0) = 1.0;
  CHECK((simulate(m, delta) - impulse_response(m, 40)).cwiseAbs().maxCoeff() <
        1e-13);
}

TEST_CASE("step response of a single real pole: closed form") {
  RafModel m = one_real(0.5, 1.0, 0.25);
  Eigen::VectorXd y = simulate(m, Eigen::VectorXd::Ones(6));
  for (int t = 0; t < 6; ++t) {
    double want = (1.0 - std::pow(0.5, t + 1)) / 0.5 + 0.25;
    CHECK(y(t) == Approx(want).epsilon(1e-14));
  }
}

TEST_CASE("zero model simulates to zero") {
  RafModel m;
  Eigen::VectorXd y = simulate(m, Eigen::VectorXd::Ones(5));
  CHECK(y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("model validation") {
  RafModel m = one_real(0.5, 1.0);
  CHECK_NOTHROW(m.validate());
  m.residues[0] = Complex(1.0, 0.5);
  CHECK_THROWS_AS(m.validate(), ConfigError);
  RafModel loud = one_real(1.0, 1.0);
  CHECK_THROWS_AS(loud.validate(), ConfigError);
  RafModel mismatch = one_real(0.5, 1.0);
  mismatch.residues.push_back(Complex(0.0, 0.0));
  CHECK_THROWS_AS(mismatch.validate(), ConfigError);
}

}  // TEST_SUITE
