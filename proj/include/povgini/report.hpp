#pragma once

#include "povgini/core_model.hpp"
#include "povgini/gini_decomp.hpp"
#include "povgini/poverty_fgt.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace povgini {

enum class OutputFormat { Table, Json, Csv, Markdown };

OutputFormat parse_output_format(const std::string& text);

struct AnalysisConfig {
  PovertyLine poverty_line{700.0};
  std::vector<double> alphas{0.0, 1.0, 2.0};
  std::vector<IncomeBundle> bundles = canonical_bundles();
  std::string base_bundle = "farm";
  /// Sources to decompose; empty means every registered source.
  std::vector<SourceId> sources;
  OutputFormat output_format = OutputFormat::Table;
  bool verify = false;
  bool allow_negative = false;
  /// Use the dataset's sampling weights; unweighted by default.
  bool weighted = false;
};

enum class CheckStatus { Pass, Fail, Skipped };

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string detail;
};

/// Oracle checks on one dataset: covariance vs pairwise Gini (1e-12),
/// decomposition residual and marginal-effect sum (1e-10), share sum,
/// analytic vs finite-difference marginal effects (1e-4 at eps = 1e-6) and
/// FGT monotonicity in alpha for every configured bundle.
std::vector<CheckResult> run_verification(const Dataset& data, const AnalysisConfig& config);
bool all_passed(const std::vector<CheckResult>& checks);

enum class SourceEffect { Equalizing, Disequalizing, Neutral, Undefined };

std::string_view to_string(SourceEffect effect);

struct SourceSummary {
  SourceId source;
  std::optional<double> marginal_effect;
  SourceEffect effect = SourceEffect::Undefined;
};

struct PovertySummary {
  double alpha = 0.0;
  /// Non-base bundle with the lowest index, if any non-base bundle exists.
  std::optional<std::string> largest_reduction_bundle;
  std::optional<double> largest_reduction_pct;
  /// Every non-base bundle has index <= the base bundle's.
  bool all_bundles_weakly_reduce = true;
};

struct SignSummary {
  std::vector<SourceSummary> sources;
  std::vector<PovertySummary> poverty;
};

SignSummary summarize(const FgtTable& fgt, const GiniDecomposition& gini);

void render_fgt(const FgtTable& table, const Dataset& data, OutputFormat format,
                std::ostream& out);
void render_gini(const GiniDecomposition& decomposition, OutputFormat format, std::ostream& out,
                 const std::vector<CheckResult>* checks = nullptr);
void render_checks(const std::vector<CheckResult>& checks, OutputFormat format,
                   std::ostream& out);
/// Combined document (markdown or json) with both tables and the summary.
void render_report(const FgtTable& fgt, const GiniDecomposition& gini, const Dataset& data,
                   OutputFormat format, std::ostream& out);

} // namespace povgini
