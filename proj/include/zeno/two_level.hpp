#pragma once

// Two-level system driven at resonance, with and without intermediate
// measurements. Measurements are modeled as randomization of the amplitude
// phases; averaging over those phases yields a stochastic matrix acting on
// the occupation probabilities.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

#include "zeno/errors.hpp"
#include "zeno/parallel.hpp"
#include "zeno/random.hpp"

namespace zeno {

template <typename Scalar>
using TwoLevelState = Eigen::Matrix<std::complex<Scalar>, 2, 1>;

template <typename Scalar>
using ProbabilityPair = Eigen::Matrix<Scalar, 2, 1>;

/// Rabi frequency and measurement interval; `phi` is the rotation angle
/// accumulated between consecutive measurements.
template <typename Scalar>
struct RabiParams {
  Scalar omega;
  Scalar tau;
  Scalar phi;

  static RabiParams make(Scalar omega, Scalar tau) {
    if (!(tau > Scalar(0))) throw InvalidArgument("RabiParams: tau must be positive");
    return {omega, tau, omega * tau / Scalar(2)};
  }
};

namespace detail {

template <typename Scalar>
void require_normalized(const TwoLevelState<Scalar>& state) {
  const Scalar deviation = std::abs(state.squaredNorm() - Scalar(1));
  if (!(deviation <= Scalar(1e-9))) throw InvalidState("two-level state is not normalized");
}

}  // namespace detail

template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 2, 2> evolution_matrix(Scalar phi) {
  using C = std::complex<Scalar>;
  const C c(std::cos(phi), 0);
  const C s(0, std::sin(phi));
  Eigen::Matrix<C, 2, 2> a;
  a << c, s, s, c;
  return a;
}

/// Closed form of evolution_matrix(phi)^n.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 2, 2> evolution_matrix_power(Scalar phi, std::int64_t n) {
  if (n < 0) throw InvalidArgument("evolution_matrix_power: n must be non-negative");
  return evolution_matrix(static_cast<Scalar>(n) * phi);
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> probability_matrix(Scalar phi) {
  const Scalar c2 = std::cos(phi) * std::cos(phi);
  const Scalar s2 = std::sin(phi) * std::sin(phi);
  Eigen::Matrix<Scalar, 2, 2> m;
  m << c2, s2, s2, c2;
  return m;
}

/// Closed form of probability_matrix(phi)^n via its eigen-decomposition
/// (eigenvalues 1 and cos 2φ).
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> probability_matrix_power(Scalar phi, std::int64_t n) {
  if (n < 0) throw InvalidArgument("probability_matrix_power: n must be non-negative");
  const Scalar decay = n == 0 ? Scalar(1) : std::pow(std::cos(Scalar(2) * phi), static_cast<Scalar>(n));
  const Scalar same = (Scalar(1) + decay) / Scalar(2);
  const Scalar other = (Scalar(1) - decay) / Scalar(2);
  Eigen::Matrix<Scalar, 2, 2> m;
  m << same, other, other, same;
  return m;
}

template <typename Scalar>
TwoLevelState<Scalar> coherent_step(const TwoLevelState<Scalar>& state, Scalar phi) {
  detail::require_normalized(state);
  return evolution_matrix(phi) * state;
}

template <typename Scalar>
TwoLevelState<Scalar> coherent_evolve(const TwoLevelState<Scalar>& state, Scalar phi, std::int64_t n) {
  detail::require_normalized(state);
  return evolution_matrix_power(phi, n) * state;
}

template <typename Scalar>
ProbabilityPair<Scalar> measured_probability_step(const ProbabilityPair<Scalar>& p, Scalar phi) {
  return probability_matrix(phi) * p;
}

template <typename Scalar>
ProbabilityPair<Scalar> measured_evolve_closed(const ProbabilityPair<Scalar>& p, Scalar phi, std::int64_t n) {
  return probability_matrix_power(phi, n) * p;
}

/// Occupations after a π-pulse split into n segments with n-1 intermediate
/// measurements, starting from the first level.
template <typename Scalar = double>
ProbabilityPair<Scalar> zeno_survival(std::int64_t n) {
  if (n < 1) throw InvalidArgument("zeno_survival: n must be at least 1");
  const Scalar phi = std::numbers::pi_v<Scalar> / (Scalar(2) * static_cast<Scalar>(n));
  return measured_evolve_closed(ProbabilityPair<Scalar>(Scalar(1), Scalar(0)), phi, n);
}

template <typename Scalar>
struct MonteCarloEstimate {
  ProbabilityPair<Scalar> mean;
  /// Standard error of each component of `mean`.
  ProbabilityPair<Scalar> standard_error;
  std::int64_t trials;
};

/// One phase-randomized trajectory: before each coherent step both amplitude
/// phases are replaced by fresh independent uniform phases.
template <typename Scalar>
TwoLevelState<Scalar> randomized_trajectory(const ProbabilityPair<Scalar>& p0, Scalar phi, std::int64_t n,
                                            Xoshiro256& rng) {
  using C = std::complex<Scalar>;
  const Scalar c = std::cos(phi);
  const Scalar s = std::sin(phi);
  TwoLevelState<Scalar> state(C(std::sqrt(p0(0)), 0), C(std::sqrt(p0(1)), 0));
  for (std::int64_t step = 0; step < n; ++step) {
    const Scalar alpha1 = static_cast<Scalar>(rng.phase());
    const Scalar alpha2 = static_cast<Scalar>(rng.phase());
    // Only the relative phase affects the occupations.
    const Scalar r0 = std::sqrt(std::norm(state(0)));
    const C z = std::sqrt(std::norm(state(1))) * C(std::cos(alpha2 - alpha1), std::sin(alpha2 - alpha1));
    state(0) = C(c * r0 - s * z.imag(), s * z.real());
    state(1) = C(c * z.real(), s * r0 + c * z.imag());
  }
  return state;
}

/// Trial-averaged occupations of phase-randomized trajectories. Trial t uses
/// the substream substream_seed(seed, t), so the result does not depend on
/// the thread count.
template <typename Scalar>
MonteCarloEstimate<Scalar> monte_carlo_measured_evolve_stats(const ProbabilityPair<Scalar>& p0, Scalar phi,
                                                             std::int64_t n, std::int64_t trials,
                                                             std::uint64_t seed, int threads = 0) {
  if (trials < 1) throw InvalidArgument("monte_carlo_measured_evolve: trials must be at least 1");
  if (n < 0) throw InvalidArgument("monte_carlo_measured_evolve: n must be non-negative");

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> upper(trials);
  parallel_for(trials, threads, [&](std::int64_t t) {
    Xoshiro256 rng(substream_seed(seed, static_cast<std::uint64_t>(t)));
    upper(t) = std::norm(randomized_trajectory(p0, phi, n, rng)(1));
  });

  // |a1|^2 = 1 - |a2|^2 per trial, so both components share one variance.
  const Scalar mean2 = upper.mean();
  const Scalar var = trials > 1 ? (upper.array() - mean2).square().sum() / static_cast<Scalar>(trials - 1) : Scalar(0);
  const Scalar se = std::sqrt(var / static_cast<Scalar>(trials));

  MonteCarloEstimate<Scalar> out;
  out.mean = ProbabilityPair<Scalar>(Scalar(1) - mean2, mean2);
  out.standard_error = ProbabilityPair<Scalar>(se, se);
  out.trials = trials;
  return out;
}

template <typename Scalar>
ProbabilityPair<Scalar> monte_carlo_measured_evolve(const ProbabilityPair<Scalar>& p0, Scalar phi, std::int64_t n,
                                                    std::int64_t trials, std::uint64_t seed, int threads = 0) {
  return monte_carlo_measured_evolve_stats(p0, phi, n, trials, seed, threads).mean;
}

}  // namespace zeno
