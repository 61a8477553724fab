#include "povgini/gini_decomp.hpp"

#include "povgini/error.hpp"
#include "povgini/summation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace povgini {

namespace {

void check_inputs(std::span<const double> values, std::span<const double> weights) {
  if (values.empty())
    throw Error(ErrorKind::EmptyDataset, "no values");
  if (weights.size() != values.size())
    throw Error(ErrorKind::Parameter, "values and weights differ in length");
  for (double v : values)
    if (!std::isfinite(v))
      throw Error(ErrorKind::Parameter, "values must be finite");
  for (double w : weights)
    if (!std::isfinite(w) || w < 0.0)
      throw Error(ErrorKind::Parameter, "weights must be finite and >= 0");
}

double total_weight(std::span<const double> weights) {
  CompensatedSum w;
  for (double x : weights)
    w += x;
  if (!(w.value() > 0.0))
    throw Error(ErrorKind::DegenerateWeights, "total weight is zero");
  return w.value();
}

double weighted_mean(std::span<const double> values, std::span<const double> weights,
                     double total_w) {
  CompensatedSum s;
  for (std::size_t i = 0; i < values.size(); ++i)
    s += weights[i] * values[i];
  return s.value() / total_w;
}

bool is_constant(std::span<const double> values) {
  return std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>{}) ==
         values.end();
}

bool all_zero(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

std::vector<double> unit(std::size_t n) { return std::vector<double>(n, 1.0); }

} // namespace

RankVector fractional_ranks(std::span<const double> values, std::span<const double> weights) {
  check_inputs(values, weights);
  const double w_total = total_weight(weights);
  const std::size_t n = values.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  RankVector out;
  out.ranks.assign(n, 0.0);
  CompensatedSum below;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    CompensatedSum tied;
    while (j < n && values[order[j]] == values[order[i]])
      tied += weights[order[j++]];
    const double rank = (below.value() + 0.5 * tied.value()) / w_total;
    for (std::size_t k = i; k < j; ++k)
      out.ranks[order[k]] = rank;
    below += tied.value();
    i = j;
  }
  return out;
}

RankVector fractional_ranks(std::span<const double> values) {
  const auto w = unit(values.size());
  return fractional_ranks(values, w);
}

double weighted_covariance(std::span<const double> x, std::span<const double> y,
                           std::span<const double> weights) {
  check_inputs(x, weights);
  if (y.size() != x.size())
    throw Error(ErrorKind::Parameter, "covariance inputs differ in length");
  const double w_total = total_weight(weights);
  const double mx = weighted_mean(x, weights, w_total);
  const double my = weighted_mean(y, weights, w_total);
  CompensatedSum s;
  for (std::size_t i = 0; i < x.size(); ++i)
    s += weights[i] * (x[i] - mx) * (y[i] - my);
  return s.value() / w_total;
}

double gini(std::span<const double> values, std::span<const double> weights) {
  check_inputs(values, weights);
  const double w_total = total_weight(weights);
  const double mu = weighted_mean(values, weights, w_total);
  if (!(mu > 0.0))
    throw Error(ErrorKind::NonPositiveMean, "Gini requires a positive mean");
  const auto ranks = fractional_ranks(values, weights);
  return 2.0 * weighted_covariance(values, ranks.ranks, weights) / mu;
}

double gini(std::span<const double> values) {
  const auto w = unit(values.size());
  return gini(values, w);
}

double gini_pairwise_oracle(std::span<const double> values, std::span<const double> weights) {
  check_inputs(values, weights);
  const double w_total = total_weight(weights);
  const double mu = weighted_mean(values, weights, w_total);
  if (!(mu > 0.0))
    throw Error(ErrorKind::NonPositiveMean, "Gini requires a positive mean");
  CompensatedSum s;
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j)
      s += weights[i] * weights[j] * std::fabs(values[i] - values[j]);
  // each unordered pair appears twice in the full double sum
  return 2.0 * s.value() / (2.0 * w_total * w_total * mu);
}

double gini_pairwise_oracle(std::span<const double> values) {
  const auto w = unit(values.size());
  return gini_pairwise_oracle(values, w);
}

std::optional<double> gini_correlation(std::span<const double> source_values,
                                       std::span<const double> total_values,
                                       std::span<const double> weights) {
  if (total_values.size() != source_values.size())
    throw Error(ErrorKind::Parameter, "source and total differ in length");
  check_inputs(source_values, weights);
  check_inputs(total_values, weights);
  if (is_constant(source_values))
    return std::nullopt;
  const auto own = fractional_ranks(source_values, weights);
  const auto by_total = fractional_ranks(total_values, weights);
  const double denom = weighted_covariance(source_values, own.ranks, weights);
  if (!(denom > 0.0))
    return std::nullopt;
  const double num = weighted_covariance(source_values, by_total.ranks, weights);
  return std::clamp(num / denom, -1.0, 1.0);
}

double relative_contribution(double share, double source_gini, double correlation,
                             double total_gini) {
  return share * source_gini * correlation / total_gini;
}

double marginal_effect(double share, double source_gini, double correlation, double total_gini) {
  return relative_contribution(share, source_gini, correlation, total_gini) - share;
}

namespace {

std::vector<std::vector<double>> source_columns(const Dataset& data,
                                                const std::vector<SourceId>& sources) {
  if (sources.empty())
    throw Error(ErrorKind::Configuration, "no sources to decompose");
  std::vector<std::vector<double>> cols;
  for (const auto& s : sources)
    cols.push_back(data.column(s));
  return cols;
}

std::vector<double> sum_columns(const std::vector<std::vector<double>>& cols) {
  std::vector<double> total(cols.front().size(), 0.0);
  for (const auto& c : cols)
    for (std::size_t i = 0; i < c.size(); ++i)
      total[i] += c[i];
  return total;
}

} // namespace

GiniDecomposition decompose(const Dataset& data, const std::vector<SourceId>& sources,
                            const DecomposeOptions& options) {
  const auto cols = source_columns(data, sources);
  const auto total = sum_columns(cols);
  const auto weights = options.weighted ? data.weights() : data.unit_weights();
  const double w_total = total_weight(weights);

  GiniDecomposition out;
  out.sample_size = data.size();
  out.weighted = options.weighted;
  out.mean_total = weighted_mean(total, weights, w_total);
  out.total_gini = gini(total, weights);
  const auto total_ranks = fractional_ranks(total, weights);

  CompensatedSum explained;
  for (std::size_t k = 0; k < sources.size(); ++k) {
    const auto& y = cols[k];
    GiniSourceRow row;
    row.source = sources[k];
    row.mean = weighted_mean(y, weights, w_total);
    row.share = row.mean / out.mean_total;

    if (!all_zero(y) && row.mean != 0.0) {
      const auto own = fractional_ranks(y, weights);
      const double own_cov = weighted_covariance(y, own.ranks, weights);
      row.source_gini = 2.0 * own_cov / row.mean;
      if (!is_constant(y) && own_cov > 0.0) {
        const double cross_cov = weighted_covariance(y, total_ranks.ranks, weights);
        row.gini_correlation = std::clamp(cross_cov / own_cov, -1.0, 1.0);
      }
    }
    if (row.source_gini && row.gini_correlation && out.total_gini > 0.0) {
      row.relative_contribution =
          relative_contribution(row.share, *row.source_gini, *row.gini_correlation, out.total_gini);
      row.marginal_effect =
          marginal_effect(row.share, *row.source_gini, *row.gini_correlation, out.total_gini);
    }
    if (row.source_gini && row.gini_correlation)
      explained += row.share * *row.source_gini * *row.gini_correlation;
    else
      out.excluded.push_back(row.source);
    out.rows.push_back(std::move(row));
  }
  out.residual = explained.value() - out.total_gini;
  return out;
}

GiniDecomposition decompose(const Dataset& data, const DecomposeOptions& options) {
  return decompose(data, data.sources(), options);
}

double marginal_effect_numeric(const Dataset& data, const SourceId& source, double epsilon,
                               const std::vector<SourceId>& sources,
                               const DecomposeOptions& options) {
  if (!(epsilon > 0.0 && epsilon <= 0.01))
    throw Error(ErrorKind::Parameter, "epsilon must lie in (0, 0.01]");
  auto it = std::find(sources.begin(), sources.end(), source);
  if (it == sources.end())
    throw Error(ErrorKind::Configuration,
                "source '" + source.name + "' is not among the decomposed sources");

  auto cols = source_columns(data, sources);
  const auto weights = options.weighted ? data.weights() : data.unit_weights();
  const double base = gini(sum_columns(cols), weights);
  if (!(base > 0.0))
    throw Error(ErrorKind::Parameter, "total Gini is zero; elasticity undefined");

  for (double& v : cols[static_cast<std::size_t>(it - sources.begin())])
    v *= 1.0 + epsilon;
  const double perturbed = gini(sum_columns(cols), weights);
  return (perturbed - base) / (base * epsilon);
}

double marginal_effect_numeric(const Dataset& data, const SourceId& source, double epsilon,
                               const DecomposeOptions& options) {
  return marginal_effect_numeric(data, source, epsilon, data.sources(), options);
}

} // namespace povgini
