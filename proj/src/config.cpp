#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "zeno/runner.hpp"

namespace zeno {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct Field {
  std::string value;
  int line;
};

template <typename Int>
Int parse_integer(const std::string& key, const Field& f) {
  Int out{};
  const char* first = f.value.data();
  const char* last = first + f.value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw ConfigError(key, f.line, "expected an integer, got '" + f.value + "'");
  return out;
}

double parse_real(const std::string& key, const Field& f) {
  try {
    std::size_t used = 0;
    const double v = std::stod(f.value, &used);
    if (used != f.value.size() || !std::isfinite(v)) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, f.line, "expected a real number, got '" + f.value + "'");
  }
}

bool parse_bool(const std::string& key, const Field& f) {
  std::string v = f.value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError(key, f.line, "expected a boolean, got '" + f.value + "'");
}

std::vector<long> parse_list(const std::string& key, const Field& f) {
  std::vector<long> out;
  std::string_view rest = f.value;
  if (!rest.empty() && rest.front() == '[' && rest.back() == ']') rest = rest.substr(1, rest.size() - 2);
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    if (item.empty()) throw ConfigError(key, f.line, "empty entry in list '" + f.value + "'");
    out.push_back(parse_integer<long>(key, Field{std::string(item), f.line}));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

template <typename Enum>
Enum parse_choice(const std::string& key, const Field& f, std::initializer_list<std::pair<const char*, Enum>> options) {
  for (const auto& [name, value] : options) {
    if (f.value == name) return value;
  }
  std::string allowed;
  for (const auto& [name, value] : options) allowed += (allowed.empty() ? "" : "|") + std::string(name);
  throw ConfigError(key, f.line, "expected one of " + allowed + ", got '" + f.value + "'");
}

int line_of(const std::map<std::string, Field>& fields, const std::string& key) {
  auto it = fields.find(key);
  return it == fields.end() ? 0 : it->second.line;
}

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Zeno: return "zeno";
    case Experiment::Kicked: return "kicked";
    case Experiment::Classical: return "classical";
  }
  return "?";
}

std::string_view to_string(SpectrumKind s) {
  switch (s) {
    case SpectrumKind::Rotator: return "rotator";
    case SpectrumKind::Linear: return "linear";
    case SpectrumKind::Random: return "random";
  }
  return "?";
}

std::string_view to_string(MeasurementSetting m) {
  switch (m) {
    case MeasurementSetting::None: return "none";
    case MeasurementSetting::Initial: return "initial";
    case MeasurementSetting::Subset: return "subset";
    case MeasurementSetting::All: return "all";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (!(k >= 0)) throw ConfigError("k", 0, "kick strength must be non-negative");
  if (!(tau > 0)) throw ConfigError("tau", 0, "period must be positive");
  if (!std::isfinite(omega)) throw ConfigError("omega", 0, "must be finite");
  if (n_kicks < 1) throw ConfigError("n_kicks", 0, "must be at least 1");
  if (window_halfwidth < kMinWindowSize / 2) throw ConfigError("window_halfwidth", 0, "must be at least 8");
  if (measurement_period < 1) throw ConfigError("measurement_period", 0, "must be at least 1");
  if (realizations < 1) throw ConfigError("realizations", 0, "must be at least 1");
  if (particles < 1) throw ConfigError("particles", 0, "must be at least 1");
  if (output_path.empty()) throw ConfigError("output_path", 0, "must not be empty");

  const bool wants_subset = measurement_mode == MeasurementSetting::Subset;
  if (wants_subset && subset.empty()) throw ConfigError("subset", 0, "required when measurement_mode = subset");
  if (!wants_subset && !subset.empty()) throw ConfigError("subset", 0, "only allowed when measurement_mode = subset");
  for (long m : subset) {
    if (m < m0 - window_halfwidth || m > m0 + window_halfwidth) {
      throw ConfigError("subset", 0, "level " + std::to_string(m) + " lies outside the basis window");
    }
  }
  if (experiment == Experiment::Zeno &&
      (measurement_mode == MeasurementSetting::Initial || measurement_mode == MeasurementSetting::Subset)) {
    throw ConfigError("measurement_mode", 0, "two-level runs support only none or all");
  }
}

MeasurementSchedule ExperimentConfig::schedule() const {
  switch (measurement_mode) {
    case MeasurementSetting::None: return MeasurementSchedule::none();
    case MeasurementSetting::Initial: return MeasurementSchedule::of_levels({m0}, measurement_period);
    case MeasurementSetting::Subset: return MeasurementSchedule::of_levels(subset, measurement_period);
    case MeasurementSetting::All: return MeasurementSchedule::all(measurement_period);
  }
  return MeasurementSchedule::none();
}

std::string ExperimentConfig::legend() const {
  if (!label.empty()) return label;
  if (experiment == Experiment::Classical) return "classical";
  if (measurement_mode == MeasurementSetting::None) return "no measurement";
  return std::string(to_string(measurement_mode)) + " every " + std::to_string(measurement_period);
}

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, Field> fields;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("", line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("", line_no, "missing key before '='");
    if (value.empty()) throw ConfigError(key, line_no, "missing value");
    if (!fields.emplace(key, Field{value, line_no}).second) throw ConfigError(key, line_no, "repeated key");
  }

  ExperimentConfig c;
  if (!fields.count("experiment")) throw ConfigError("experiment", 0, "missing required key");

  for (const auto& [key, f] : fields) {
    if (key == "experiment") {
      c.experiment = parse_choice<Experiment>(
          key, f, {{"zeno", Experiment::Zeno}, {"kicked", Experiment::Kicked}, {"classical", Experiment::Classical}});
    } else if (key == "spectrum") {
      c.spectrum = parse_choice<SpectrumKind>(
          key, f, {{"rotator", SpectrumKind::Rotator}, {"linear", SpectrumKind::Linear}, {"random", SpectrumKind::Random}});
    } else if (key == "m0") {
      c.m0 = parse_integer<long>(key, f);
    } else if (key == "k") {
      c.k = parse_real(key, f);
    } else if (key == "tau") {
      c.tau = parse_real(key, f);
    } else if (key == "omega") {
      c.omega = parse_real(key, f);
    } else if (key == "n_kicks") {
      c.n_kicks = parse_integer<std::int64_t>(key, f);
    } else if (key == "window_halfwidth") {
      c.window_halfwidth = parse_integer<long>(key, f);
    } else if (key == "measurement_mode") {
      c.measurement_mode = parse_choice<MeasurementSetting>(key, f,
                                                            {{"none", MeasurementSetting::None},
                                                             {"initial", MeasurementSetting::Initial},
                                                             {"subset", MeasurementSetting::Subset},
                                                             {"all", MeasurementSetting::All}});
    } else if (key == "measurement_period") {
      c.measurement_period = parse_integer<std::int64_t>(key, f);
    } else if (key == "subset") {
      c.subset = parse_list(key, f);
    } else if (key == "seed") {
      c.seed = parse_integer<std::uint64_t>(key, f);
    } else if (key == "spectrum_seed") {
      c.spectrum_seed = parse_integer<std::uint64_t>(key, f);
    } else if (key == "realizations") {
      c.realizations = parse_integer<std::int64_t>(key, f);
    } else if (key == "particles") {
      c.particles = parse_integer<std::int64_t>(key, f);
    } else if (key == "output_path") {
      c.output_path = f.value;
    } else if (key == "emit_svg") {
      c.emit_svg = parse_bool(key, f);
    } else if (key == "label") {
      c.label = f.value;
    } else {
      throw ConfigError(key, f.line, "unknown key");
    }
  }

  try {
    c.validate();
  } catch (const ConfigError& e) {
    // Re-raise with the line of the offending key when it was given explicitly.
    const int line = line_of(fields, e.key());
    if (line == 0) throw;
    const std::string what = e.what();
    const auto colon = what.find(": ");
    throw ConfigError(e.key(), line, colon == std::string::npos ? what : what.substr(colon + 2));
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("failed reading config file '" + path + "'");
  return parse_config(text.str());
}

ExperimentConfig apply_preset(ExperimentConfig config, char preset) {
  config.subset.clear();
  switch (preset) {
    case 'a':
      config.measurement_mode = MeasurementSetting::None;
      config.measurement_period = 1;
      break;
    case 'b':
      config.measurement_mode = MeasurementSetting::Initial;
      config.measurement_period = 1;
      break;
    case 'c':
      config.measurement_mode = MeasurementSetting::All;
      config.measurement_period = 200;
      break;
    case 'd':
      config.measurement_mode = MeasurementSetting::All;
      config.measurement_period = 1;
      break;
    default:
      throw ConfigError("preset", 0, std::string("unknown preset '") + preset + "' (expected a, b, c or d)");
  }
  const char* names[] = {"(a) no measurement", "(b) initial level every kick", "(c) all levels every 200 kicks",
                         "(d) all levels every kick"};
  config.label = names[preset - 'a'];
  config.validate();
  return config;
}

}  // namespace zeno
