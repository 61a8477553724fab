#pragma once

#include <compare>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace povgini {

/// Name of a registered income source ("farm", "nonfarm", "transfer", ...).
struct SourceId {
  std::string name;

  friend auto operator<=>(const SourceId&, const SourceId&) = default;
};

namespace sources {
inline const SourceId farm{"farm"};
inline const SourceId nonfarm{"nonfarm"};
inline const SourceId transfer{"transfer"};
} // namespace sources

/// The canonical three-source registry, in column order.
std::vector<SourceId> canonical_sources();

/// One surveyed household. Amounts are RM per month.
struct HouseholdRecord {
  std::string id;
  std::string district = "unspecified";
  std::string stratum = "unspecified";
  std::map<SourceId, double> incomes;
  double weight = 1.0;

  /// Amount for `source`; throws a configuration error if it is not recorded.
  double income(const SourceId& source) const;
};

struct DatasetOptions {
  std::string currency = "RM";
  std::string period = "month";
  /// Permit negative source amounts (net losses). Totals must still be >= 0.
  bool allow_negative = false;
};

/// Validated, immutable collection of households sharing one source registry.
///
/// Construction enforces: at least one household and one source, unique
/// non-empty source names, unique household ids, every record carries
/// exactly the registered sources with finite amounts, non-negative finite
/// weights, non-negative record totals, and a strictly positive mean total.
class Dataset {
public:
  static Dataset create(std::vector<HouseholdRecord> households,
                        std::vector<SourceId> sources,
                        DatasetOptions options = {});

  const std::vector<HouseholdRecord>& households() const noexcept { return households_; }
  const std::vector<SourceId>& sources() const noexcept { return sources_; }
  const std::string& currency() const noexcept { return options_.currency; }
  const std::string& period() const noexcept { return options_.period; }
  bool allow_negative() const noexcept { return options_.allow_negative; }
  std::size_t size() const noexcept { return households_.size(); }
  bool has_source(const SourceId& source) const;

  /// Per-record amounts of one source, in record order.
  std::vector<double> column(const SourceId& source) const;
  /// Per-record totals: sum of the registered sources in registry order.
  std::vector<double> totals() const;
  std::vector<double> weights() const;
  /// All-ones vector of length size().
  std::vector<double> unit_weights() const;

private:
  Dataset(std::vector<HouseholdRecord> households, std::vector<SourceId> sources,
          DatasetOptions options)
      : households_(std::move(households)), sources_(std::move(sources)),
        options_(std::move(options)) {}

  std::vector<HouseholdRecord> households_;
  std::vector<SourceId> sources_;
  DatasetOptions options_;
};

/// A counterfactual income: the sum of a subset of sources.
class IncomeBundle {
public:
  static IncomeBundle make(std::string label, std::vector<SourceId> included);

  const std::string& label() const noexcept { return label_; }
  const std::vector<SourceId>& included_sources() const noexcept { return included_; }

  friend bool operator==(const IncomeBundle&, const IncomeBundle&) = default;

private:
  IncomeBundle(std::string label, std::vector<SourceId> included)
      : label_(std::move(label)), included_(std::move(included)) {}

  std::string label_;
  std::vector<SourceId> included_;
};

/// {farm}, {farm, nonfarm}, {farm, transfer}, {farm, nonfarm, transfer}.
std::vector<IncomeBundle> canonical_bundles();

/// Parses "farm+nonfarm" into a bundle labelled with the same text.
IncomeBundle parse_bundle(const std::string& spec);

class PovertyLine {
public:
  /// Throws a parameter error unless z is finite and strictly positive.
  explicit PovertyLine(double z);

  double z() const noexcept { return z_; }

private:
  double z_;
};

enum class PovertyStatus { Poor, NonPoor };

double bundle_income(const HouseholdRecord& record, const IncomeBundle& bundle);

/// Bundle incomes for every record of `data`, in record order.
std::vector<double> bundle_incomes(const Dataset& data, const IncomeBundle& bundle);

/// Poor iff income < z. Income equal to the line is non-poor.
PovertyStatus classify_poor(double income, const PovertyLine& line) noexcept;

} // namespace povgini
