// zeno_map: command-line driver for the two-level, kicked and classical
// experiments.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 I/O error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "zeno/classical.hpp"
#include "zeno/runner.hpp"
#include "zeno/two_level.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

std::vector<char> parse_presets(const std::string& spec) {
  std::vector<char> out;
  for (char ch : spec) {
    if (ch == ',' || ch == ' ') continue;
    if (ch < 'a' || ch > 'd') throw zeno::ConfigError("preset", 0, std::string("unknown preset '") + ch + "'");
    out.push_back(ch);
  }
  if (out.empty()) throw zeno::ConfigError("preset", 0, "empty preset list");
  return out;
}

std::string with_suffix(const std::string& path, const std::string& suffix, const std::string& extension) {
  std::filesystem::path p(path);
  const std::string stem = p.stem().string() + suffix;
  return (p.parent_path() / (stem + extension)).string();
}

int run_command(const std::string& config_path, const std::string& presets, std::optional<std::uint64_t> seed,
                const std::string& out, bool svg, std::optional<std::int64_t> realizations) {
  zeno::ExperimentConfig base = zeno::load_config(config_path);
  if (seed) base.seed = *seed;
  if (realizations) base.realizations = *realizations;
  if (!out.empty()) base.output_path = out;
  if (svg) base.emit_svg = true;
  base.validate();

  std::vector<zeno::ExperimentConfig> configs;
  if (presets.empty()) {
    configs.push_back(base);
  } else {
    const auto letters = parse_presets(presets);
    for (char p : letters) {
      auto c = zeno::apply_preset(base, p);
      if (letters.size() > 1) c.output_path = with_suffix(base.output_path, std::string("_") + p, ".csv");
      configs.push_back(std::move(c));
    }
  }

  const auto records = zeno::run_experiments(configs);
  for (const auto& r : records) {
    zeno::write_csv(r, r.config.output_path);
    const auto& last = r.aggregate.back();
    std::printf("%-34s j=%lld dispersion=%.6g norm=%.12g  -> %s (%.2fs)\n", r.config.legend().c_str(),
                static_cast<long long>(last.j), last.dispersion, last.norm, r.config.output_path.c_str(),
                r.wall_seconds);
  }
  if (base.emit_svg) {
    const std::string svg_path = with_suffix(base.output_path, "", ".svg");
    zeno::emit_chart(records, svg_path);
    std::printf("chart -> %s\n", svg_path.c_str());
  }
  return 0;
}

int zeno_command(std::int64_t n, std::int64_t trials, std::uint64_t seed) {
  if (n < 1) throw zeno::ConfigError("n", 0, "must be at least 1");
  if (trials < 1) throw zeno::ConfigError("trials", 0, "must be at least 1");
  const double phi = std::numbers::pi / (2.0 * static_cast<double>(n));
  const auto closed = zeno::zeno_survival(n);
  const double smooth = 0.5 * (1.0 - std::exp(-std::numbers::pi * std::numbers::pi / (2.0 * static_cast<double>(n))));
  const double leading = std::numbers::pi * std::numbers::pi / (4.0 * static_cast<double>(n));
  const auto mc = zeno::monte_carlo_measured_evolve_stats(zeno::ProbabilityPair<double>(1.0, 0.0), phi, n, trials, seed);
  std::printf("n = %lld segments of a pi-pulse, %lld intermediate measurements\n", static_cast<long long>(n),
              static_cast<long long>(n - 1));
  std::printf("  p1 closed form            %.12f\n", closed(0));
  std::printf("  p2 closed form            %.12f\n", closed(1));
  std::printf("  p2 exponential estimate   %.12f\n", smooth);
  std::printf("  p2 leading order pi^2/4n  %.12f\n", leading);
  std::printf("  p2 Monte Carlo            %.12f +- %.2e (%lld trials)\n", mc.mean(1), mc.standard_error(1),
              static_cast<long long>(trials));
  return 0;
}

int classical_command(std::int64_t particles, std::int64_t steps, double k, double tau, double m0,
                      std::uint64_t seed, const std::string& out) {
  if (particles < 1) throw zeno::ConfigError("particles", 0, "must be at least 1");
  if (steps < 1) throw zeno::ConfigError("steps", 0, "must be at least 1");
  if (!(k >= 0)) throw zeno::ConfigError("k", 0, "must be non-negative");
  if (!(tau > 0)) throw zeno::ConfigError("tau", 0, "must be positive");
  const auto ensemble = zeno::ClassicalEnsemble::make(particles, m0, tau, k, seed);
  if (!ensemble.chaotic()) {
    std::fprintf(stderr, "warning: K = %.4g is below %.4f; the quasilinear diffusion law does not apply\n",
                 ensemble.stochasticity(), zeno::kChaosThreshold);
  }
  const auto est = zeno::ensemble_diffusion_stats(ensemble, steps, seed);
  std::printf("K = %.6g, %lld particles, %lld steps\n", ensemble.stochasticity(), static_cast<long long>(particles),
              static_cast<long long>(steps));
  std::printf("  B measured     %.6f +- %.6f\n", est.coefficient, est.standard_error);
  std::printf("  B quasilinear  %.6f  (k^2 / 4 tau)\n", k * k / (4.0 * tau));
  if (!out.empty()) {
    zeno::RunRecord record;
    record.config.experiment = zeno::Experiment::Classical;
    record.aggregate = zeno::classical_dispersion_series(ensemble, steps, seed);
    record.realizations.push_back(record.aggregate);
    zeno::write_csv(record, out);
    std::printf("  series -> %s\n", out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measurement effects on two-level and kicked quantum maps"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
  std::string config_path, presets, out;
  std::optional<std::uint64_t> run_seed;
  std::optional<std::int64_t> realizations;
  bool svg = false;
  run->add_option("config", config_path, "Config file (key = value lines)")->required();
  run->add_option("--preset", presets, "Scenario preset a|b|c|d, or a list such as a,b,c,d");
  run->add_option("--seed", run_seed, "Override the master seed");
  run->add_option("--out", out, "Override the CSV output path");
  run->add_option("--realizations", realizations, "Override the realization count");
  run->add_flag("--svg", svg, "Also write an SVG chart next to the CSV");

  auto* zeno_cmd = app.add_subcommand("zeno", "Two-level survival under repeated measurement");
  std::int64_t n = 64, trials = 100000;
  std::uint64_t zeno_seed = 1;
  zeno_cmd->add_option("--n", n, "Segments of the pi-pulse")->capture_default_str();
  zeno_cmd->add_option("--trials", trials, "Monte-Carlo trials")->capture_default_str();
  zeno_cmd->add_option("--seed", zeno_seed, "Seed")->capture_default_str();

  auto* classical = app.add_subcommand("classical", "Standard-map ensemble diffusion");
  std::int64_t particles = 10000, steps = 200;
  double k = 10.0, tau = 1.0, m0 = 500.0;
  std::uint64_t classical_seed = 1;
  std::string classical_out;
  classical->add_option("--particles", particles, "Ensemble size")->capture_default_str();
  classical->add_option("--steps", steps, "Map iterations")->capture_default_str();
  classical->add_option("--k", k, "Kick strength")->capture_default_str();
  classical->add_option("--tau", tau, "Kick period")->capture_default_str();
  classical->add_option("--m0", m0, "Initial action")->capture_default_str();
  classical->add_option("--seed", classical_seed, "Seed")->capture_default_str();
  classical->add_option("--out", classical_out, "Write the dispersion series as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return run_command(config_path, presets, run_seed, out, svg, realizations);
    if (*zeno_cmd) return zeno_command(n, trials, zeno_seed);
    if (*classical) return classical_command(particles, steps, k, tau, m0, classical_seed, classical_out);
  } catch (const zeno::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const zeno::TruncationOverflow& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const zeno::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const zeno::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
