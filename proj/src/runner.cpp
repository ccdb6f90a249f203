#include <chrono>
#include <cmath>
#include <numbers>

#include "zeno/classical.hpp"
#include "zeno/kick_engine.hpp"
#include "zeno/parallel.hpp"
#include "zeno/runner.hpp"
#include "zeno/two_level.hpp"

namespace zeno {
namespace {

SpectrumVariant spectrum_variant(const ExperimentConfig& c) {
  switch (c.spectrum) {
    case SpectrumKind::Rotator: return Rotator{};
    case SpectrumKind::Linear: return Linear{c.omega};
    case SpectrumKind::Random: return RandomLevels{c.level_seed()};
  }
  return Rotator{};
}

// Two-level π-pulse split into n_kicks segments. Levels are labeled m0 and
// m0 + 1, so the dispersion column is the upper-level occupation.
DispersionSeries run_two_level_realization(const ExperimentConfig& c, std::int64_t realization) {
  using C = std::complex<double>;
  const std::int64_t n = c.n_kicks;
  const double phi = std::numbers::pi / (2.0 * static_cast<double>(n));
  const auto a = evolution_matrix(phi);
  const MeasurementSchedule schedule = c.schedule();
  Xoshiro256 rng(substream_seed(c.seed, static_cast<std::uint64_t>(realization)));

  TwoLevelState<double> state(C(1, 0), C(0, 0));
  DispersionSeries series;
  series.push_back({0, 0.0, 1.0, 1.0});
  for (std::int64_t j = 1; j <= n; ++j) {
    state = a * state;
    if (should_measure(schedule, j)) {
      state(0) = std::polar(std::abs(state(0)), rng.phase());
      state(1) = std::polar(std::abs(state(1)), rng.phase());
    }
    series.push_back({j, std::norm(state(1)), state.squaredNorm(), std::norm(state(0))});
  }
  return series;
}

DispersionSeries run_classical_realization(const ExperimentConfig& c, std::int64_t realization) {
  const std::uint64_t seed = substream_seed(c.seed, static_cast<std::uint64_t>(realization));
  const auto ensemble = ClassicalEnsemble::make(c.particles, static_cast<double>(c.m0), c.tau, c.k, seed);
  return classical_dispersion_series(ensemble, c.n_kicks, seed, 1);
}

DispersionSeries mean_series(const std::vector<DispersionSeries>& runs) {
  DispersionSeries out;
  const auto count = static_cast<double>(runs.size());
  for (std::size_t i = 0; i < runs.front().size(); ++i) {
    DispersionEntry e{runs.front()[i].j, 0.0, 0.0, 0.0};
    for (const auto& r : runs) {
      e.dispersion += r[i].dispersion;
      e.norm += r[i].norm;
      e.p_m0 += r[i].p_m0;
    }
    e.dispersion /= count;
    e.norm /= count;
    e.p_m0 /= count;
    out.push_back(e);
  }
  return out;
}

}  // namespace

DispersionSeries run_kicked_realization(const ExperimentConfig& c, std::int64_t realization) {
  const BasisWindow window = BasisWindow::centered(c.m0, c.window_halfwidth);
  const auto kernel = build_kernel(c.k);
  const SpectrumModel<double> spectrum(spectrum_variant(c), c.tau, window);
  const MeasurementSchedule schedule = c.schedule();
  schedule.validate(window);
  PhaseRandomizer rng = PhaseRandomizer::for_realization(c.seed, static_cast<std::uint64_t>(realization));

  auto state = QuantumState<double>::delta(window);
  QuantumState<double>::Amplitudes workspace;
  DispersionSeries series;
  series.push_back(record(state));
  for (std::int64_t j = 1; j <= c.n_kicks; ++j) {
    step_in_place(state, kernel, spectrum, workspace);
    if (should_measure(schedule, j)) measure_in_place(state, schedule, rng);
    series.push_back(record(state));
  }
  return series;
}

std::vector<RunRecord> run_experiments(std::span<const ExperimentConfig> configs, int threads) {
  struct Task {
    std::size_t config;
    std::int64_t realization;
  };
  std::vector<Task> tasks;
  std::vector<RunRecord> records(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    configs[i].validate();
    records[i].config = configs[i];
    records[i].realizations.resize(static_cast<std::size_t>(configs[i].realizations));
    for (std::int64_t r = 0; r < configs[i].realizations; ++r) tasks.push_back({i, r});
  }

  std::vector<double> seconds(tasks.size(), 0.0);
  parallel_for(static_cast<std::int64_t>(tasks.size()), threads, [&](std::int64_t t) {
    const Task& task = tasks[static_cast<std::size_t>(t)];
    const ExperimentConfig& c = configs[task.config];
    const auto start = std::chrono::steady_clock::now();
    DispersionSeries series;
    switch (c.experiment) {
      case Experiment::Zeno: series = run_two_level_realization(c, task.realization); break;
      case Experiment::Kicked: series = run_kicked_realization(c, task.realization); break;
      case Experiment::Classical: series = run_classical_realization(c, task.realization); break;
    }
    records[task.config].realizations[static_cast<std::size_t>(task.realization)] = std::move(series);
    seconds[static_cast<std::size_t>(t)] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  for (std::size_t t = 0; t < tasks.size(); ++t) records[tasks[t].config].wall_seconds += seconds[t];
  for (auto& r : records) r.aggregate = mean_series(r.realizations);
  return records;
}

RunRecord run_experiment(const ExperimentConfig& config, int threads) {
  return std::move(run_experiments(std::span<const ExperimentConfig>(&config, 1), threads).front());
}

}  // namespace zeno
