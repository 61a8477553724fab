#include "povgini/data_io.hpp"

#include "presets.hpp"

#include "povgini/error.hpp"
#include "povgini/summation.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <random>
#include <sstream>

namespace povgini {

namespace {

class PortableRng {
public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  // [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::mt19937_64 engine_;
};

const std::string& pick(const std::vector<WeightedLabel>& labels, double u) {
  double cumulative = 0.0;
  double total = 0.0;
  for (const auto& l : labels)
    total += l.proportion;
  for (const auto& l : labels) {
    cumulative += l.proportion / total;
    if (u < cumulative)
      return l.label;
  }
  return labels.back().label;
}

void check_labels(const std::vector<WeightedLabel>& labels, const char* what) {
  if (labels.empty())
    throw Error(ErrorKind::Parameter, std::string("synthetic config has no ") + what + " labels");
  double sum = 0.0;
  for (const auto& l : labels) {
    if (l.label.empty())
      throw Error(ErrorKind::Parameter, std::string("empty ") + what + " label");
    if (!std::isfinite(l.proportion) || l.proportion < 0.0)
      throw Error(ErrorKind::Parameter,
                  std::string(what) + " '" + l.label + "' has an invalid proportion");
    sum += l.proportion;
  }
  if (std::fabs(sum - 1.0) > 1e-6)
    throw Error(ErrorKind::Parameter,
                std::string(what) + " proportions sum to " + format_double(sum) + ", not 1");
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_value(const std::string& text, const std::string& key, std::size_t line) {
  T out{};
  std::string_view v = text;
  if constexpr (std::is_floating_point_v<T>) {
    if (!v.empty() && v.front() == '+')
      v.remove_prefix(1);
  }
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size())
    throw Error(ErrorKind::Parameter, "config line " + std::to_string(line) + ": '" + key +
                                          "' has invalid value '" + text + "'");
  return out;
}

} // namespace

void validate(const SynthConfig& config) {
  if (config.n_households < 1)
    throw Error(ErrorKind::Parameter, "n_households must be >= 1");
  if (config.sources.empty())
    throw Error(ErrorKind::Parameter, "synthetic config defines no sources");
  for (const auto& s : config.sources) {
    const std::string where = "source '" + s.name + "': ";
    if (s.name.empty())
      throw Error(ErrorKind::Parameter, "synthetic source with empty name");
    if (!(s.participation >= 0.0 && s.participation <= 1.0))
      throw Error(ErrorKind::Parameter, where + "participation must lie in [0, 1]");
    if (!std::isfinite(s.log_location))
      throw Error(ErrorKind::Parameter, where + "log_location must be finite");
    if (!(std::isfinite(s.log_scale) && s.log_scale >= 0.0))
      throw Error(ErrorKind::Parameter, where + "log_scale must be finite and >= 0");
    if (!(s.latent_loading >= -1.0 && s.latent_loading <= 1.0))
      throw Error(ErrorKind::Parameter, where + "latent_loading must lie in [-1, 1]");
  }
  check_labels(config.districts, "district");
  check_labels(config.strata, "stratum");
}

Dataset generate_synthetic(const SynthConfig& config) {
  validate(config);
  PortableRng rng(config.seed);
  const double scale =
      config.amount_decimals >= 0 ? std::pow(10.0, config.amount_decimals) : 0.0;

  std::vector<SourceId> sources;
  for (const auto& s : config.sources)
    sources.push_back(SourceId{s.name});

  std::vector<HouseholdRecord> households;
  households.reserve(static_cast<std::size_t>(config.n_households));
  const int width = static_cast<int>(std::to_string(config.n_households).size());
  for (std::int64_t i = 0; i < config.n_households; ++i) {
    HouseholdRecord h;
    std::string num = std::to_string(i + 1);
    h.id = "H" + std::string(static_cast<std::size_t>(width) - num.size(), '0') + num;

    const double latent = rng.normal();
    for (std::size_t k = 0; k < config.sources.size(); ++k) {
      const auto& s = config.sources[k];
      const bool participates = rng.uniform() < s.participation;
      const double own = rng.normal();
      const double rho = s.latent_loading;
      const double z = rho * latent + std::sqrt(1.0 - rho * rho) * own;
      double amount = participates ? std::exp(s.log_location + s.log_scale * z) : 0.0;
      if (scale > 0.0)
        amount = std::round(amount * scale) / scale;
      h.incomes[sources[k]] = amount;
    }
    h.district = pick(config.districts, rng.uniform());
    h.stratum = pick(config.strata, rng.uniform());
    households.push_back(std::move(h));
  }
  return Dataset::create(std::move(households), std::move(sources));
}

SynthConfig parse_synth_config(std::istream& in) {
  SynthConfig config;
  config.districts.clear();
  config.strata.clear();

  auto source = [&](const std::string& name) -> SynthSource& {
    for (auto& s : config.sources)
      if (s.name == name)
        return s;
    config.sources.push_back(SynthSource{name});
    return config.sources.back();
  };

  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos)
      raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty())
      continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Parameter,
                  "config line " + std::to_string(line) + ": expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));

    if (key == "n_households") {
      config.n_households = parse_value<std::int64_t>(value, key, line);
    } else if (key == "seed") {
      config.seed = parse_value<std::uint64_t>(value, key, line);
    } else if (key == "amount_decimals") {
      config.amount_decimals = parse_value<int>(value, key, line);
    } else if (key.starts_with("district.")) {
      config.districts.push_back({key.substr(9), parse_value<double>(value, key, line)});
    } else if (key.starts_with("stratum.")) {
      config.strata.push_back({key.substr(8), parse_value<double>(value, key, line)});
    } else if (key.starts_with("source.")) {
      const auto dot = key.rfind('.');
      if (dot <= 7)
        throw Error(ErrorKind::Parameter,
                    "config line " + std::to_string(line) + ": malformed key '" + key + "'");
      const std::string name = key.substr(7, dot - 7);
      const std::string field = key.substr(dot + 1);
      const double v = parse_value<double>(value, key, line);
      SynthSource& s = source(name);
      if (field == "participation")
        s.participation = v;
      else if (field == "log_location")
        s.log_location = v;
      else if (field == "log_scale")
        s.log_scale = v;
      else if (field == "latent_loading")
        s.latent_loading = v;
      else
        throw Error(ErrorKind::Parameter,
                    "config line " + std::to_string(line) + ": unknown source field '" + field + "'");
    } else {
      throw Error(ErrorKind::Parameter,
                  "config line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  if (config.districts.empty())
    config.districts.push_back({"unspecified", 1.0});
  if (config.strata.empty())
    config.strata.push_back({"unspecified", 1.0});
  validate(config);
  return config;
}

SynthConfig load_preset(const std::string& name) {
  for (std::size_t i = 0; i < kEmbeddedPresetCount; ++i) {
    if (name == kEmbeddedPresets[i].name) {
      std::istringstream in(kEmbeddedPresets[i].text);
      return parse_synth_config(in);
    }
  }
  std::string known;
  for (const auto& n : preset_names())
    known += (known.empty() ? "" : ", ") + n;
  throw Error(ErrorKind::Parameter, "unknown preset '" + name + "' (known: " + known + ")");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < kEmbeddedPresetCount; ++i)
    out.emplace_back(kEmbeddedPresets[i].name);
  return out;
}

std::vector<double> realized_shares(const Dataset& data) {
  const auto totals = data.totals();
  CompensatedSum grand;
  for (double t : totals)
    grand += t;
  std::vector<double> out;
  for (const auto& s : data.sources()) {
    CompensatedSum part;
    for (double v : data.column(s))
      part += v;
    out.push_back(part.value() / grand.value());
  }
  return out;
}

} // namespace povgini
