#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "zeno/measurement.hpp"
#include "zeno/observables.hpp"

using namespace zeno;
using C = std::complex<double>;
using State = QuantumState<double>;

namespace {

State random_state(BasisWindow w, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  State::Amplitudes a(w.size());
  for (auto& x : a) x = C(g(gen), g(gen));
  a /= a.norm();
  return State(w, a);
}

}  // namespace

TEST_CASE("should_measure follows the schedule period") {
  const auto every200 = MeasurementSchedule::all(200);
  CHECK(should_measure(every200, 200));
  CHECK_FALSE(should_measure(every200, 201));
  CHECK(should_measure(every200, 400));
  for (std::int64_t j : {1, 2, 200, 1000}) CHECK_FALSE(should_measure(MeasurementSchedule::none(), j));
  CHECK(should_measure(MeasurementSchedule::of_levels({5}, 1), 7));
  CHECK_THROWS_AS(should_measure(every200, 0), InvalidArgument);
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(MeasurementSchedule::all(0), InvalidArgument);
  CHECK_THROWS_AS(MeasurementSchedule::of_levels({}, 1), InvalidArgument);
  const auto s = MeasurementSchedule::of_levels({7, 3, 7}, 1);
  CHECK(s.subset == std::vector<long>{3, 7});
}

TEST_CASE("no measurement leaves the state untouched") {
  const auto w = BasisWindow::centered(0, 20);
  const State s = random_state(w, 1);
  PhaseRandomizer rng(4);
  const State out = apply_measurement(s, MeasurementSchedule::none(), rng);
  CHECK((out.amplitudes() - s.amplitudes()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("full measurement keeps every occupation") {
  const auto w = BasisWindow::centered(0, 50);
  PhaseRandomizer rng(9);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const State s = random_state(w, seed);
    const State out = apply_measurement(s, MeasurementSchedule::all(1), rng);
    const Eigen::ArrayXd rel = (out.occupations() - s.occupations()).array().abs() / s.occupations().array();
    REQUIRE(rel.maxCoeff() < 1e-15);
    REQUIRE(dispersion(out) == doctest::Approx(dispersion(s)).epsilon(1e-15));
    // Phases did change.
    REQUIRE((out.amplitudes() - s.amplitudes()).cwiseAbs().maxCoeff() > 1e-3);
  }
}

TEST_CASE("measuring a delta state only changes its global phase") {
  const auto w = BasisWindow::centered(0, 20);
  PhaseRandomizer rng(2);
  const State out = apply_measurement(State::delta(w), MeasurementSchedule::all(1), rng);
  CHECK(std::abs(out.amplitude(0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(out.amplitudes().cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("subset measurement touches only the listed levels") {
  const auto w = BasisWindow::centered(0, 20);
  const State s = random_state(w, 3);
  PhaseRandomizer rng(5);
  const auto schedule = MeasurementSchedule::of_levels({-4, 0, 9}, 1);
  const State out = apply_measurement(s, schedule, rng);
  for (long m = w.m_min; m <= w.m_max; ++m) {
    const bool measured = m == -4 || m == 0 || m == 9;
    if (measured) {
      CHECK(std::abs(out.amplitude(m) - s.amplitude(m)) > 0.0);
      CHECK(out.occupation(m) == doctest::Approx(s.occupation(m)).epsilon(1e-15));
    } else {
      CHECK(out.amplitude(m) == s.amplitude(m));
    }
  }

  PhaseRandomizer rng2(5);
  CHECK_THROWS_AS(apply_measurement(s, MeasurementSchedule::of_levels({21}, 1), rng2), InvalidArgument);
}

TEST_CASE("identical seeds and event sequences give identical draws") {
  const auto w = BasisWindow::centered(0, 30);
  const State s = random_state(w, 6);
  PhaseRandomizer a(123), b(123), c(124);
  State x = s, y = s, z = s;
  for (int e = 0; e < 5; ++e) {
    x = apply_measurement(x, MeasurementSchedule::all(1), a);
    y = apply_measurement(y, MeasurementSchedule::all(1), b);
    z = apply_measurement(z, MeasurementSchedule::all(1), c);
  }
  CHECK((x.amplitudes() - y.amplitudes()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((x.amplitudes() - z.amplitudes()).cwiseAbs().maxCoeff() > 0.0);

  auto r0 = PhaseRandomizer::for_realization(1, 0);
  auto r1 = PhaseRandomizer::for_realization(1, 1);
  CHECK(r0.next_phase() != r1.next_phase());
}

TEST_CASE("successive phases on one level are uncorrelated") {
  const auto w = BasisWindow::centered(0, 20);
  const auto schedule = MeasurementSchedule::of_levels({3}, 1);
  PhaseRandomizer rng(77);
  State s = State::delta(w, 3);
  const int events = 10000;
  std::vector<double> beta(events);
  C previous = s.amplitude(3);
  for (int e = 0; e < events; ++e) {
    s = apply_measurement(s, schedule, rng);
    beta[static_cast<std::size_t>(e)] = std::arg(s.amplitude(3) / previous);
    previous = s.amplitude(3);
  }
  for (int lag = 1; lag <= 10; ++lag) {
    C acc(0);
    for (int e = 0; e + lag < events; ++e) {
      acc += std::polar(1.0, beta[static_cast<std::size_t>(e)] - beta[static_cast<std::size_t>(e + lag)]);
    }
    CAPTURE(lag);
    CHECK(std::abs(acc) / (events - lag) < 0.05);
  }
}

TEST_CASE("measured superposition loses its interference contribution on average") {
  const auto w = BasisWindow::centered(0, 80);
  const auto kernel = build_kernel(10.0);
  const SpectrumModel<double> spectrum(Rotator{}, 1.0, w);
  State::Amplitudes a = State::Amplitudes::Zero(w.size());
  a(w.index_of(0)) = C(1 / std::sqrt(2.0), 0);
  a(w.index_of(1)) = C(1 / std::sqrt(2.0), 0);
  const State pair(w, a);

  // First term: incoherent sum over the two occupied levels.
  double incoherent = 0;
  for (long n : {0L, 1L}) {
    for (long d = -kernel.d_max; d <= kernel.d_max; ++d) {
      const double m = static_cast<double>(n + d);
      incoherent += 0.5 * m * m * kernel(d) * kernel(d);
    }
  }
  CHECK(incoherent == doctest::Approx(50.5).epsilon(1e-12));

  const double coherent = dispersion(step(pair, kernel, spectrum)) - incoherent;
  CHECK(std::abs(coherent) > 1e-3);  // interference is present without measurement

  const int seeds = 20000;
  double interference = 0;
  for (int s = 0; s < seeds; ++s) {
    auto rng = PhaseRandomizer::for_realization(55, static_cast<std::uint64_t>(s));
    const State measured = apply_measurement(pair, MeasurementSchedule::all(1), rng);
    interference += dispersion(step(measured, kernel, spectrum)) - incoherent;
  }
  CHECK(std::abs(interference / seeds) < 0.01 * incoherent);
}

TEST_CASE("fixed level phases localize, fresh measurement phases do not") {
  const auto w = BasisWindow::centered(0, 1500);
  const auto kernel = build_kernel(10.0);
  const SpectrumModel<double> spectrum(RandomLevels{9}, 1.0, w);
  State fixed = State::delta(w);
  State measured = State::delta(w);
  PhaseRandomizer rng(10);
  State::Amplitudes work;
  for (int j = 1; j <= 400; ++j) {
    step_in_place(fixed, kernel, spectrum, work);
    step_in_place(measured, kernel, spectrum, work);
    measure_in_place(measured, MeasurementSchedule::all(1), rng);
  }
  CHECK(dispersion(measured) > 5.0 * dispersion(fixed));
}
