#pragma once

// Classical ensemble of the kicked rotator (Chirikov standard map):
//   I' = I + k sin(theta),  theta' = theta + tau I'  (mod 2π).

#include <cstdint>
#include <vector>

#include "zeno/observables.hpp"

namespace zeno {

/// Critical stochasticity parameter K = tau k for global chaos.
inline constexpr double kChaosThreshold = 0.9816;

struct ClassicalParticle {
  double action = 0;
  double angle = 0;
};

struct ClassicalEnsemble {
  std::vector<ClassicalParticle> particles;
  double initial_action = 0;
  double tau = 1;
  double k = 0;

  /// `count` particles at action I0 with angles drawn uniformly on [0, 2π);
  /// particle i uses substream i of `seed`.
  static ClassicalEnsemble make(std::int64_t count, double initial_action, double tau, double k,
                                std::uint64_t seed);

  double stochasticity() const noexcept { return tau * k; }
  bool chaotic() const noexcept { return stochasticity() > kChaosThreshold; }
};

ClassicalParticle classical_step(const ClassicalParticle& p, double k, double tau);

struct DiffusionEstimate {
  /// <(I_t - I0)^2> / (2 t) with t = steps * tau.
  double coefficient = 0;
  double standard_error = 0;
};

DiffusionEstimate ensemble_diffusion_stats(const ClassicalEnsemble& ensemble, std::int64_t steps,
                                           std::uint64_t seed, int threads = 0);

/// Diffusion coefficient in action space. Angles are redrawn from `seed`
/// around the ensemble's initial action before evolving.
double ensemble_diffusion(const ClassicalEnsemble& ensemble, std::int64_t steps, std::uint64_t seed,
                          int threads = 0);

/// Per-step ensemble dispersion <(I - I0)^2>, in the same record layout as
/// the quantum runs. `norm` is 1 and `p_m0` is the fraction of particles
/// with |I - I0| < 1/2.
DispersionSeries classical_dispersion_series(const ClassicalEnsemble& ensemble, std::int64_t steps,
                                             std::uint64_t seed, int threads = 0);

}  // namespace zeno
