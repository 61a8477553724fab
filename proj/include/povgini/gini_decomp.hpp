#pragma once

#include "povgini/core_model.hpp"

#include <optional>
#include <span>
#include <vector>

namespace povgini {

/// Midpoint fractional ranks: F_i = (W_{<y_i} + W_{=y_i} / 2) / W, where
/// W_{<y} and W_{=y} are the weights of records below and tied with y.
/// Tied values share one rank. With unit weights and distinct values the
/// sorted ranks are (i - 0.5) / n.
struct RankVector {
  std::vector<double> ranks;
};

RankVector fractional_ranks(std::span<const double> values, std::span<const double> weights);
RankVector fractional_ranks(std::span<const double> values);

/// Population-form weighted covariance sum_i w_i (x_i - x̄)(y_i - ȳ) / W.
double weighted_covariance(std::span<const double> x, std::span<const double> y,
                           std::span<const double> weights);

/// G = 2 cov_w(y, F(y)) / mu.
double gini(std::span<const double> values, std::span<const double> weights);
double gini(std::span<const double> values);

/// sum_i sum_j w_i w_j |y_i - y_j| / (2 W^2 mu), evaluated literally in
/// O(n^2). Independent check on gini(); not used by the decomposition.
double gini_pairwise_oracle(std::span<const double> values, std::span<const double> weights);
double gini_pairwise_oracle(std::span<const double> values);

/// R = cov(y_k, F(total)) / cov(y_k, F(y_k)), clamped to [-1, 1].
/// nullopt when the source is constant (the denominator vanishes).
std::optional<double> gini_correlation(std::span<const double> source_values,
                                       std::span<const double> total_values,
                                       std::span<const double> weights);

/// S_k G_k R_k / G.
double relative_contribution(double share, double source_gini, double correlation,
                             double total_gini);
/// S_k G_k R_k / G - S_k: elasticity of G with respect to a uniform
/// proportional change in source k.
double marginal_effect(double share, double source_gini, double correlation, double total_gini);

struct GiniSourceRow {
  SourceId source;
  double mean = 0.0;
  double share = 0.0;
  std::optional<double> source_gini;
  std::optional<double> gini_correlation;
  std::optional<double> relative_contribution;
  std::optional<double> marginal_effect;

  bool degenerate() const noexcept { return !relative_contribution.has_value(); }
};

struct GiniDecomposition {
  double total_gini = 0.0;
  double mean_total = 0.0;
  std::size_t sample_size = 0;
  bool weighted = false;
  std::vector<GiniSourceRow> rows;
  /// sum of S_k G_k R_k over non-degenerate rows, minus total_gini.
  double residual = 0.0;
  /// Sources whose rows carry nulls and were left out of `residual`.
  std::vector<SourceId> excluded;
};

struct DecomposeOptions {
  bool weighted = false;
};

/// Source decomposition of the Gini of total income, where total income is
/// the per-record sum of `sources` (in the given order).
GiniDecomposition decompose(const Dataset& data, const std::vector<SourceId>& sources,
                            const DecomposeOptions& options = {});
GiniDecomposition decompose(const Dataset& data, const DecomposeOptions& options = {});

/// Finite-difference elasticity: (G(source * (1 + eps)) - G) / (G * eps),
/// ranks recomputed on the perturbed totals. eps must lie in (0, 0.01].
double marginal_effect_numeric(const Dataset& data, const SourceId& source, double epsilon,
                               const std::vector<SourceId>& sources,
                               const DecomposeOptions& options = {});
double marginal_effect_numeric(const Dataset& data, const SourceId& source, double epsilon,
                               const DecomposeOptions& options = {});

} // namespace povgini
