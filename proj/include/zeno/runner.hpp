#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zeno/measurement.hpp"
#include "zeno/observables.hpp"

namespace zeno {

inline constexpr const char* kVersion = "0.1.0";

enum class Experiment { Zeno, Kicked, Classical };
enum class SpectrumKind { Rotator, Linear, Random };
enum class MeasurementSetting { None, Initial, Subset, All };

/// Validated experiment description. Defaults are the kicked-rotator
/// parameters m0 = 500, tau = 1, k = 10 over 1000 kicks.
struct ExperimentConfig {
  Experiment experiment = Experiment::Kicked;
  SpectrumKind spectrum = SpectrumKind::Rotator;
  long m0 = 500;
  double k = 10.0;
  double tau = 1.0;
  /// Level spacing of the linear spectrum.
  double omega = 1.0;
  std::int64_t n_kicks = 1000;
  long window_halfwidth = 2000;
  MeasurementSetting measurement_mode = MeasurementSetting::None;
  std::int64_t measurement_period = 1;
  std::vector<long> subset;
  std::uint64_t seed = 1;
  /// Seed of the random level spectrum; defaults to `seed`.
  std::optional<std::uint64_t> spectrum_seed;
  std::int64_t realizations = 1;
  /// Ensemble size of classical runs.
  std::int64_t particles = 10000;
  std::string output_path = "zeno_map.csv";
  bool emit_svg = false;
  /// Legend text; derived from the measurement setting when empty.
  std::string label;

  void validate() const;
  MeasurementSchedule schedule() const;
  std::uint64_t level_seed() const { return spectrum_seed.value_or(seed); }
  std::string legend() const;
};

/// Parses the line-based `key = value` format. `#` starts a comment; lists
/// are comma separated. Unknown or repeated keys are rejected.
ExperimentConfig parse_config(std::string_view text);

ExperimentConfig load_config(const std::string& path);

/// Scenario presets: a = no measurement, b = initial level every kick,
/// c = all levels every 200 kicks, d = all levels every kick.
ExperimentConfig apply_preset(ExperimentConfig config, char preset);

std::string_view to_string(Experiment e);
std::string_view to_string(SpectrumKind s);
std::string_view to_string(MeasurementSetting m);

struct RunRecord {
  ExperimentConfig config;
  std::vector<DispersionSeries> realizations;
  /// Mean over realizations, one entry per kick including j = 0.
  DispersionSeries aggregate;
  /// Seconds spent evolving the realizations.
  double wall_seconds = 0;
  std::string version = kVersion;
};

/// Runs every realization of every config. Realization r of a config uses
/// substream r of its seed, so results do not depend on `threads`.
std::vector<RunRecord> run_experiments(std::span<const ExperimentConfig> configs, int threads = 0);

RunRecord run_experiment(const ExperimentConfig& config, int threads = 0);

/// Single realization of a kicked run.
DispersionSeries run_kicked_realization(const ExperimentConfig& config, std::int64_t realization);

/// CSV text of a series: header `j,dispersion,norm,p_m0`, 17 significant digits.
std::string format_csv(const DispersionSeries& series);

/// Writes the aggregate series of `record`.
void write_csv(const RunRecord& record, const std::string& path);

DispersionSeries read_csv(const std::string& path);

/// Standalone SVG line chart of dispersion against j, one polyline per record.
std::string render_chart(std::span<const RunRecord> records);

void emit_chart(std::span<const RunRecord> records, const std::string& path);

}  // namespace zeno
