#pragma once

#include "povgini/core_model.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace povgini {

/// One Foster-Greer-Thorbecke index value.
struct FgtIndex {
  double alpha = 0.0;
  double value = 0.0;          // in [0, 1]
  std::size_t poor_count = 0;  // records with income < z
  std::size_t sample_size = 0;
};

/// Weighted FGT index:
///
///   P_alpha = sum_{y_i < z} w_i ((z - y_i) / z)^alpha / sum_i w_i
///
/// For alpha == 0 every poor record contributes exactly w_i (headcount), so
/// 0^0 never arises. Incomes must be finite and non-negative.
FgtIndex fgt_index(std::span<const double> incomes, std::span<const double> weights,
                   const PovertyLine& line, double alpha);

/// Unit-weight form; identical to the weighted form with all weights 1.
FgtIndex fgt_index(std::span<const double> incomes, const PovertyLine& line, double alpha);

/// 100 * (value - base) / base, or nullopt when base == 0.
std::optional<double> percent_change(double base, double value) noexcept;

struct FgtRow {
  double alpha = 0.0;
  /// One index per bundle, same order as FgtTable::bundles.
  std::vector<FgtIndex> indices;
  /// One entry per non-base bundle (bundles[1..]) against bundles[0].
  std::vector<std::optional<double>> pct_change;
};

/// Poverty indices per (alpha, bundle) plus percentage changes against the
/// base bundle. bundles[0] is always the base.
struct FgtTable {
  PovertyLine line{1.0};
  std::vector<std::string> bundles;
  std::size_t sample_size = 0;
  bool weighted = false;
  std::vector<FgtRow> rows;
};

struct PovertyTableOptions {
  std::string base_bundle = "farm";
  bool weighted = false;
};

/// Builds the bundle-by-alpha table. The bundle labelled
/// `options.base_bundle` is moved to the front; a configuration error is
/// raised if no bundle carries that label.
FgtTable poverty_table(const Dataset& data, const std::vector<IncomeBundle>& bundles,
                       const PovertyLine& line, const std::vector<double>& alphas,
                       const PovertyTableOptions& options = {});

} // namespace povgini
