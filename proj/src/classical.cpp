#include "zeno/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "zeno/errors.hpp"
#include "zeno/parallel.hpp"
#include "zeno/random.hpp"

namespace zeno {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Fixed chunking keeps floating-point sums independent of the thread count.
constexpr std::int64_t kChunk = 256;

double initial_angle(std::uint64_t seed, std::int64_t index) {
  Xoshiro256 rng(substream_seed(seed, static_cast<std::uint64_t>(index)));
  return rng.phase();
}

struct StepSums {
  std::vector<double> squared;  // sum of (I - I0)^2 per step
  std::vector<double> fourth;   // sum of (I - I0)^4 per step
  std::vector<double> near;     // count with |I - I0| < 1/2 per step
};

StepSums evolve_ensemble(const ClassicalEnsemble& ensemble, std::int64_t steps, std::uint64_t seed, int threads) {
  const auto count = static_cast<std::int64_t>(ensemble.particles.size());
  if (count == 0) throw InvalidArgument("classical ensemble is empty");
  if (steps < 1) throw InvalidArgument("classical ensemble: steps must be at least 1");

  const std::int64_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<StepSums> partial(static_cast<std::size_t>(chunks));
  parallel_for(chunks, threads, [&](std::int64_t c) {
    StepSums& out = partial[static_cast<std::size_t>(c)];
    out.squared.assign(static_cast<std::size_t>(steps + 1), 0.0);
    out.fourth.assign(static_cast<std::size_t>(steps + 1), 0.0);
    out.near.assign(static_cast<std::size_t>(steps + 1), 0.0);
    const std::int64_t end = std::min(count, (c + 1) * kChunk);
    for (std::int64_t i = c * kChunk; i < end; ++i) {
      ClassicalParticle p{ensemble.initial_action, initial_angle(seed, i)};
      out.near[0] += 1.0;
      for (std::int64_t s = 1; s <= steps; ++s) {
        p = classical_step(p, ensemble.k, ensemble.tau);
        const double d = p.action - ensemble.initial_action;
        out.squared[static_cast<std::size_t>(s)] += d * d;
        out.fourth[static_cast<std::size_t>(s)] += d * d * d * d;
        if (std::abs(d) < 0.5) out.near[static_cast<std::size_t>(s)] += 1.0;
      }
    }
  });

  StepSums total{std::vector<double>(static_cast<std::size_t>(steps + 1), 0.0),
                 std::vector<double>(static_cast<std::size_t>(steps + 1), 0.0),
                 std::vector<double>(static_cast<std::size_t>(steps + 1), 0.0)};
  for (const auto& part : partial) {
    for (std::size_t s = 0; s < total.squared.size(); ++s) {
      total.squared[s] += part.squared[s];
      total.fourth[s] += part.fourth[s];
      total.near[s] += part.near[s];
    }
  }
  return total;
}

}  // namespace

ClassicalEnsemble ClassicalEnsemble::make(std::int64_t count, double initial_action, double tau, double k,
                                          std::uint64_t seed) {
  if (count < 1) throw InvalidArgument("ClassicalEnsemble: need at least one particle");
  if (!(tau > 0)) throw InvalidArgument("ClassicalEnsemble: tau must be positive");
  if (!(k >= 0)) throw InvalidArgument("ClassicalEnsemble: k must be non-negative");
  ClassicalEnsemble e;
  e.initial_action = initial_action;
  e.tau = tau;
  e.k = k;
  e.particles.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) e.particles.push_back({initial_action, initial_angle(seed, i)});
  return e;
}

ClassicalParticle classical_step(const ClassicalParticle& p, double k, double tau) {
  const double action = p.action + k * std::sin(p.angle);
  double angle = std::fmod(p.angle + tau * action, kTwoPi);
  if (angle < 0) angle += kTwoPi;
  return {action, angle};
}

DiffusionEstimate ensemble_diffusion_stats(const ClassicalEnsemble& ensemble, std::int64_t steps,
                                           std::uint64_t seed, int threads) {
  const StepSums sums = evolve_ensemble(ensemble, steps, seed, threads);
  const auto n = static_cast<double>(ensemble.particles.size());
  const double t = static_cast<double>(steps) * ensemble.tau;
  const double mean = sums.squared.back() / n;
  const double mean_sq = sums.fourth.back() / n;
  const double var = n > 1 ? std::max(0.0, (mean_sq - mean * mean) * n / (n - 1)) : 0.0;
  return {mean / (2.0 * t), std::sqrt(var / n) / (2.0 * t)};
}

double ensemble_diffusion(const ClassicalEnsemble& ensemble, std::int64_t steps, std::uint64_t seed, int threads) {
  return ensemble_diffusion_stats(ensemble, steps, seed, threads).coefficient;
}

DispersionSeries classical_dispersion_series(const ClassicalEnsemble& ensemble, std::int64_t steps,
                                             std::uint64_t seed, int threads) {
  const StepSums sums = evolve_ensemble(ensemble, steps, seed, threads);
  const auto n = static_cast<double>(ensemble.particles.size());
  DispersionSeries series;
  for (std::int64_t s = 0; s <= steps; ++s) {
    const auto i = static_cast<std::size_t>(s);
    series.push_back({s, sums.squared[i] / n, 1.0, sums.near[i] / n});
  }
  return series;
}

}  // namespace zeno
