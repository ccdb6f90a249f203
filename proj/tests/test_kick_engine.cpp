#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "zeno/kick_engine.hpp"
#include "zeno/observables.hpp"

using namespace zeno;
using C = std::complex<double>;
using State = QuantumState<double>;

namespace {

State random_state(BasisWindow w, std::uint64_t seed, long halfspread) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  State::Amplitudes a = State::Amplitudes::Zero(w.size());
  for (long m = w.m0 - halfspread; m <= w.m0 + halfspread; ++m) a(w.index_of(m)) = C(g(gen), g(gen));
  a /= a.norm();
  return State(w, a);
}

// Dense oracle: the kick as an explicit matrix K_{mn} = J_{m-n}(k).
Eigen::MatrixXd dense_kick(const BasisWindow& w, double k) {
  Eigen::MatrixXd K(w.size(), w.size());
  for (Eigen::Index r = 0; r < w.size(); ++r) {
    for (Eigen::Index c = 0; c < w.size(); ++c) {
      K(r, c) = std::cyl_bessel_j(static_cast<double>(std::abs(r - c)), k) * ((r - c) < 0 && (c - r) % 2 ? -1.0 : 1.0);
    }
  }
  return K;
}

}  // namespace

TEST_CASE("BasisWindow validation") {
  CHECK_NOTHROW(BasisWindow::make(0, 15, 3));
  CHECK_THROWS_AS(BasisWindow::make(0, 14, 3), InvalidArgument);
  CHECK_THROWS_AS(BasisWindow::make(0, 20, 21), InvalidArgument);
  const auto w = BasisWindow::centered(500, 2000);
  CHECK(w.m_min == -1500);
  CHECK(w.size() == 4001);
  CHECK(w.index_of(500) == 2000);
}

TEST_CASE("apply_kick with k = 0 leaves the state unchanged") {
  const auto w = BasisWindow::centered(0, 40);
  const State s = random_state(w, 3, 10);
  const State kicked = apply_kick(s, build_kernel(0.0));
  CHECK((kicked.amplitudes() - s.amplitudes()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a kicked delta state spreads with squared Bessel weights") {
  const auto w = BasisWindow::centered(500, 200);
  const auto kernel = build_kernel(10.0);
  const State kicked = apply_kick(State::delta(w), kernel);
  for (long d = -60; d <= 60; ++d) {
    const double expected = std::pow(std::cyl_bessel_j(static_cast<double>(std::abs(d)), 10.0), 2);
    REQUIRE(std::abs(kicked.occupation(500 + d) - expected) < 1e-15);
  }
  CHECK(dispersion(kicked) == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(std::abs(kicked.norm() - 1.0) < 10 * kernel.epsilon);
}

TEST_CASE("banded convolution matches the dense kick matrix") {
  const auto w = BasisWindow::make(-30, 30, 0);
  const double k = 3.0;
  const State s = random_state(w, 8, 6);
  const Eigen::VectorXcd expected = dense_kick(w, k).cast<C>() * s.amplitudes();
  const State kicked = apply_kick(s, build_kernel(k));
  CHECK((kicked.amplitudes() - expected).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("apply_free multiplies by the spectrum phases") {
  const auto w = BasisWindow::centered(0, 30);
  const State s = random_state(w, 5, 12);

  const SpectrumModel<double> flat(Linear{0.0}, 1.0, w);
  CHECK((apply_free(s, flat).amplitudes() - s.amplitudes()).cwiseAbs().maxCoeff() == 0.0);

  const SpectrumModel<double> rotator(Rotator{}, 1.0, w);
  const State delta2 = State::delta(w, 2);
  const State freed = apply_free(delta2, rotator);
  CHECK(std::abs(freed.amplitude(2) - std::polar(1.0, -2.0)) < 1e-15);

  for (const SpectrumModel<double>& spec :
       {rotator, SpectrumModel<double>(RandomLevels{4}, 1.0, w), SpectrumModel<double>(Linear{0.7}, 0.3, w)}) {
    const State out = apply_free(s, spec);
    CHECK((out.occupations() - s.occupations()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(apply_free(State::delta(w), spec).occupation(0) == doctest::Approx(1.0).epsilon(1e-15));
  }

  const SpectrumModel<double> other(Rotator{}, 1.0, BasisWindow::centered(1, 30));
  CHECK_THROWS_AS(apply_free(s, other), InvalidArgument);
}

TEST_CASE("spectrum phase tables") {
  const auto w = BasisWindow::centered(500, 100);
  const double two_pi = 2 * std::numbers::pi;

  const SpectrumModel<double> rotator(Rotator{}, 1.0, w);
  CHECK(SpectrumModel<double>::level_phase(Rotator{}, 1.0, 2) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(SpectrumModel<double>::level_phase(Rotator{}, 1.0, 3) == doctest::Approx(4.5).epsilon(1e-15));
  CHECK(rotator.phase(500) == doctest::Approx(std::fmod(125000.0, two_pi)).epsilon(1e-12));

  const SpectrumModel<double> linear(Linear{0.25}, 2.0, w);
  CHECK(linear.phase(410) == doctest::Approx(std::fmod(0.25 * 410 * 2.0, two_pi)).epsilon(1e-14));

  const SpectrumModel<double> random_a(RandomLevels{17}, 1.0, w);
  const SpectrumModel<double> random_b(RandomLevels{17}, 1.0, BasisWindow::centered(480, 300));
  const SpectrumModel<double> random_c(RandomLevels{18}, 1.0, w);
  double mean = 0;
  int differing = 0;
  for (long m = w.m_min; m <= w.m_max; ++m) {
    const double p = random_a.phase(m);
    REQUIRE(p >= 0.0);
    REQUIRE(p < two_pi);
    REQUIRE(p == random_b.phase(m));
    differing += p != random_c.phase(m);
    mean += p / static_cast<double>(w.size());
  }
  CHECK(differing == w.size());
  CHECK(mean == doctest::Approx(std::numbers::pi).epsilon(0.15));

  for (const auto& spec : {rotator, linear, random_a}) {
    CHECK(spec.phase_table().minCoeff() >= 0.0);
    CHECK(spec.phase_table().maxCoeff() < two_pi);
  }
  CHECK_THROWS_AS(SpectrumModel<double>(Rotator{}, 0.0, w), InvalidArgument);
}

TEST_CASE("step is identity when there is neither kick nor phase") {
  const auto w = BasisWindow::centered(10, 20);
  const State s = random_state(w, 1, 5);
  const State out = step(s, build_kernel(0.0), SpectrumModel<double>(Linear{0.0}, 1.0, w));
  CHECK(out.time_index() == s.time_index() + 1);
  CHECK((out.amplitudes() - s.amplitudes()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("early rotator dynamics stay below the quasilinear rate") {
  const auto w = BasisWindow::centered(500, 2000);
  const auto kernel = build_kernel(10.0);
  const SpectrumModel<double> spectrum(Rotator{}, 1.0, w);
  State s = State::delta(w);
  for (int j = 0; j < 20; ++j) s = step(s, kernel, spectrum);
  CHECK(s.time_index() == 20);
  // Kick-to-kick correlations at k = 10 cut the rate to roughly half of k^2/2.
  CHECK(dispersion(s) > 0.3 * 1000.0);
  CHECK(dispersion(s) < 1000.0);
}

TEST_CASE("norm drift over 1000 rotator kicks") {
  const auto w = BasisWindow::centered(500, 2000);
  const auto kernel = build_kernel(10.0);
  const SpectrumModel<double> spectrum(Rotator{}, 1.0, w);
  State s = State::delta(w);
  State::Amplitudes work;
  for (int j = 0; j < 1000; ++j) step_in_place(s, kernel, spectrum, work);
  CHECK(std::abs(s.norm() - 1.0) < 1e-8);
}

TEST_CASE("kicks commute with translations of the window") {
  const auto kernel = build_kernel(6.0);
  const auto w1 = BasisWindow::centered(0, 200);
  const auto w2 = BasisWindow::centered(737, 200);
  State a = random_state(w1, 21, 15);
  State b(w2, a.amplitudes());
  for (int i = 0; i < 4; ++i) {
    a = apply_kick(a, kernel);
    b = apply_kick(b, kernel);
  }
  CHECK((a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("step is linear") {
  const auto w = BasisWindow::centered(0, 150);
  const auto kernel = build_kernel(10.0);
  const SpectrumModel<double> spectrum(Rotator{}, 1.0, w);
  const State u = random_state(w, 31, 20);
  const State v = random_state(w, 32, 25);
  const C alpha(0.3, -1.1), beta(-0.7, 0.2);
  const State combo(w, alpha * u.amplitudes() + beta * v.amplitudes());
  const Eigen::VectorXcd lhs = step(combo, kernel, spectrum).amplitudes();
  const Eigen::VectorXcd rhs =
      alpha * step(u, kernel, spectrum).amplitudes() + beta * step(v, kernel, spectrum).amplitudes();
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("adjoint steps retrace the unmeasured evolution") {
  const auto w = BasisWindow::centered(500, 2000);
  const auto kernel = build_kernel(10.0);
  const SpectrumModel<double> spectrum(Rotator{}, 1.0, w);
  const State start = State::delta(w);
  State s = start;
  State::Amplitudes work;
  for (int j = 0; j < 100; ++j) step_in_place(s, kernel, spectrum, work);
  for (int j = 0; j < 100; ++j) step_adjoint_in_place(s, kernel, spectrum, work);
  CHECK(s.time_index() == 0);
  const double fidelity = std::norm(start.amplitudes().dot(s.amplitudes()));
  CHECK(fidelity > 1.0 - 1e-8);
}

TEST_CASE("narrow window triggers truncation overflow at the reached edge") {
  const auto kernel = build_kernel(10.0);
  const SpectrumModel<double> spectrum(Rotator{}, 1.0, BasisWindow::centered(0, 60));
  State s = State::delta(BasisWindow::centered(0, 60));
  bool thrown = false;
  try {
    for (int j = 0; j < 50; ++j) s = step(s, kernel, spectrum);
  } catch (const TruncationOverflow& e) {
    thrown = true;
    CHECK((e.edge_index() == -60 || e.edge_index() == 60));
    CHECK(std::string(e.what()).find("widen") != std::string::npos);
  }
  CHECK(thrown);

  // Probability near only the upper edge names the upper edge.
  const auto w = BasisWindow::make(0, 99, 50);
  State edge = State::delta(w, 95);
  try {
    edge = apply_kick(edge, build_kernel(2.0));
    FAIL("expected overflow");
  } catch (const TruncationOverflow& e) {
    CHECK(e.edge() == Edge::Upper);
    CHECK(e.edge_index() == 99);
  }
}

TEST_CASE("random level spectrum still localizes") {
  const auto w = BasisWindow::centered(500, 2000);
  const auto kernel = build_kernel(10.0);
  const SpectrumModel<double> spectrum(RandomLevels{3}, 1.0, w);
  State s = State::delta(w);
  State::Amplitudes work;
  DispersionSeries series;
  series.push_back(record(s));
  for (int j = 1; j <= 800; ++j) {
    step_in_place(s, kernel, spectrum, work);
    series.push_back(record(s));
  }
  // Far below the 50 per kick of unsuppressed diffusion.
  CHECK(std::abs(diffusion_slope(series, 400, 800)) < 5.0);
  CHECK(series.back().dispersion < 0.2 * 50.0 * 800);
}
