#include "povgini/poverty_fgt.hpp"

#include "povgini/error.hpp"
#include "povgini/summation.hpp"

#include <algorithm>
#include <cmath>

namespace povgini {

FgtIndex fgt_index(std::span<const double> incomes, std::span<const double> weights,
                   const PovertyLine& line, double alpha) {
  if (incomes.empty())
    throw Error(ErrorKind::EmptyDataset, "FGT index of an empty income list");
  if (weights.size() != incomes.size())
    throw Error(ErrorKind::Parameter, "incomes and weights differ in length");
  if (!std::isfinite(alpha) || alpha < 0.0)
    throw Error(ErrorKind::Parameter, "alpha must be finite and >= 0");

  const double z = line.z();
  CompensatedSum numerator;
  CompensatedSum total_weight;
  std::size_t poor = 0;
  for (std::size_t i = 0; i < incomes.size(); ++i) {
    const double y = incomes[i];
    const double w = weights[i];
    if (!std::isfinite(w) || w < 0.0)
      throw Error(ErrorKind::Parameter, "weights must be finite and >= 0");
    if (!std::isfinite(y) || y < 0.0)
      throw Error(ErrorKind::Parameter, "incomes must be finite and >= 0 for FGT");
    total_weight += w;
    if (classify_poor(y, line) != PovertyStatus::Poor)
      continue;
    ++poor;
    if (alpha == 0.0) {
      numerator += w;
    } else {
      const double gap = (z - y) / z;
      numerator += w * std::pow(gap, alpha);
    }
  }
  if (!(total_weight.value() > 0.0))
    throw Error(ErrorKind::DegenerateWeights, "total weight is zero");

  FgtIndex out;
  out.alpha = alpha;
  out.value = numerator.value() / total_weight.value();
  out.poor_count = poor;
  out.sample_size = incomes.size();
  return out;
}

FgtIndex fgt_index(std::span<const double> incomes, const PovertyLine& line, double alpha) {
  const std::vector<double> unit(incomes.size(), 1.0);
  return fgt_index(incomes, unit, line, alpha);
}

std::optional<double> percent_change(double base, double value) noexcept {
  if (base == 0.0)
    return std::nullopt;
  return 100.0 * (value - base) / base;
}

FgtTable poverty_table(const Dataset& data, const std::vector<IncomeBundle>& bundles,
                       const PovertyLine& line, const std::vector<double>& alphas,
                       const PovertyTableOptions& options) {
  if (alphas.empty())
    throw Error(ErrorKind::Parameter, "at least one alpha is required");
  for (std::size_t i = 0; i < bundles.size(); ++i)
    for (std::size_t j = i + 1; j < bundles.size(); ++j)
      if (bundles[i].label() == bundles[j].label())
        throw Error(ErrorKind::Configuration, "duplicate bundle label '" + bundles[i].label() + "'");
  auto base = std::find_if(bundles.begin(), bundles.end(), [&](const IncomeBundle& b) {
    return b.label() == options.base_bundle;
  });
  if (base == bundles.end())
    throw Error(ErrorKind::Configuration,
                "base bundle '" + options.base_bundle + "' is not among the bundles");

  std::vector<const IncomeBundle*> ordered{&*base};
  for (const auto& b : bundles)
    if (&b != &*base)
      ordered.push_back(&b);

  const std::vector<double> weights = options.weighted ? data.weights() : data.unit_weights();
  std::vector<std::vector<double>> incomes;
  for (const auto* b : ordered)
    incomes.push_back(bundle_incomes(data, *b));

  FgtTable table;
  table.line = line;
  table.sample_size = data.size();
  table.weighted = options.weighted;
  for (const auto* b : ordered)
    table.bundles.push_back(b->label());

  for (double alpha : alphas) {
    FgtRow row;
    row.alpha = alpha;
    for (const auto& inc : incomes)
      row.indices.push_back(fgt_index(inc, weights, line, alpha));
    for (std::size_t j = 1; j < row.indices.size(); ++j)
      row.pct_change.push_back(percent_change(row.indices[0].value, row.indices[j].value));
    table.rows.push_back(std::move(row));
  }
  return table;
}

} // namespace povgini
