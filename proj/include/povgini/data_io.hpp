#pragma once

#include "povgini/core_model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace povgini {

// CSV layout:
//   household_id, [district], [stratum], <source>_income..., [weight]
// farm_income, nonfarm_income and transfer_income are required; any other
// column ending in "_income" registers an additional source, in header
// order. Total income is never a column.

struct CsvOptions {
  bool allow_negative = false;
};

Dataset parse_csv(std::istream& in, const CsvOptions& options = {});
Dataset parse_csv_file(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes every column (weight included) with shortest round-trip decimals.
void write_dataset(const Dataset& data, std::ostream& out);
void write_dataset_file(const Dataset& data, const std::filesystem::path& path);

/// Formats a double with the shortest decimal that parses back to it.
std::string format_double(double value);

struct SynthSource {
  std::string name;
  double participation = 1.0;  // P(household has this source)
  double log_location = 0.0;   // mean of log amount
  double log_scale = 1.0;      // sd of log amount
  /// Loading on a household-level latent factor shared by all sources, in
  /// [-1, 1]. Positive loadings concentrate the source among households
  /// that are rich in other positively loaded sources.
  double latent_loading = 0.0;
};

struct WeightedLabel {
  std::string label;
  double proportion = 0.0;
};

struct SynthConfig {
  std::int64_t n_households = 381;
  std::uint64_t seed = 42;
  /// Amounts are rounded to this many decimals; negative disables rounding.
  int amount_decimals = 2;
  std::vector<SynthSource> sources;
  std::vector<WeightedLabel> districts;
  std::vector<WeightedLabel> strata;
};

/// Throws a parameter error describing the first invalid field.
void validate(const SynthConfig& config);

/// Deterministic in the config (seed included). Draw order per household:
/// latent normal, then for each source a participation uniform and an
/// amount normal, then a district uniform and a stratum uniform. Uniforms
/// are the top 53 bits of std::mt19937_64; normals use one Box-Muller
/// branch per pair of uniforms.
Dataset generate_synthetic(const SynthConfig& config);

/// Reads the key-value preset format (see presets/*.conf).
SynthConfig parse_synth_config(std::istream& in);
SynthConfig load_preset(const std::string& name);
std::vector<std::string> preset_names();

/// Per-source share of mean total income, in registry order.
std::vector<double> realized_shares(const Dataset& data);

} // namespace povgini
