#pragma once

// Measurement of level populations, modeled as multiplication of each
// measured amplitude by a fresh uniform random phase. Occupations are kept;
// interference between a measured level and any other level is destroyed.

#include <Eigen/Core>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "zeno/errors.hpp"
#include "zeno/kick_engine.hpp"
#include "zeno/random.hpp"

namespace zeno {

enum class MeasurementMode { None, Subset, All };

struct MeasurementSchedule {
  MeasurementMode mode = MeasurementMode::None;
  /// Measured levels for MeasurementMode::Subset, sorted ascending without duplicates.
  std::vector<long> subset;
  std::int64_t period = 1;

  static MeasurementSchedule none() { return {}; }

  static MeasurementSchedule all(std::int64_t period) {
    MeasurementSchedule s;
    s.mode = MeasurementMode::All;
    s.period = period;
    s.validate();
    return s;
  }

  static MeasurementSchedule of_levels(std::vector<long> levels, std::int64_t period) {
    MeasurementSchedule s;
    s.mode = MeasurementMode::Subset;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    s.subset = std::move(levels);
    s.period = period;
    s.validate();
    return s;
  }

  void validate() const {
    if (period < 1) throw InvalidArgument("MeasurementSchedule: period must be at least 1");
    if (mode == MeasurementMode::Subset && subset.empty()) {
      throw InvalidArgument("MeasurementSchedule: subset mode needs at least one level");
    }
  }

  void validate(const BasisWindow& window) const {
    validate();
    if (mode != MeasurementMode::Subset) return;
    for (long m : subset) {
      if (!window.contains(m)) {
        throw InvalidArgument("MeasurementSchedule: measured level " + std::to_string(m) +
                              " lies outside the basis window");
      }
    }
  }
};

/// Source of measurement phases for one realization.
class PhaseRandomizer {
 public:
  explicit PhaseRandomizer(std::uint64_t master_seed) : master_seed_(master_seed), stream_(master_seed) {}

  /// Substream for realization `index` of an ensemble.
  static PhaseRandomizer for_realization(std::uint64_t master_seed, std::uint64_t index) {
    PhaseRandomizer r(master_seed);
    r.stream_ = Xoshiro256(substream_seed(master_seed, index));
    return r;
  }

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  double next_phase() noexcept { return stream_.phase(); }

 private:
  std::uint64_t master_seed_;
  Xoshiro256 stream_;
};

inline bool should_measure(const MeasurementSchedule& schedule, std::int64_t j) {
  if (j < 1) throw InvalidArgument("should_measure: kick index must be at least 1");
  return schedule.mode != MeasurementMode::None && j % schedule.period == 0;
}

/// Randomizes the phases of the measured amplitudes in place. Draws one phase
/// per measured level in ascending level order.
template <typename Scalar>
void measure_in_place(QuantumState<Scalar>& state, const MeasurementSchedule& schedule, PhaseRandomizer& rng) {
  const BasisWindow& window = state.window();
  auto& a = state.mutable_amplitudes();
  switch (schedule.mode) {
    case MeasurementMode::None:
      return;
    case MeasurementMode::All:
      schedule.validate();
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        a(i) *= std::polar(Scalar(1), static_cast<Scalar>(rng.next_phase()));
      }
      return;
    case MeasurementMode::Subset:
      schedule.validate(window);
      for (long m : schedule.subset) {
        a(window.index_of(m)) *= std::polar(Scalar(1), static_cast<Scalar>(rng.next_phase()));
      }
      return;
  }
}

template <typename Scalar>
QuantumState<Scalar> apply_measurement(QuantumState<Scalar> state, const MeasurementSchedule& schedule,
                                       PhaseRandomizer& rng) {
  measure_in_place(state, schedule, rng);
  return state;
}

}  // namespace zeno
