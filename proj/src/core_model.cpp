#include "povgini/core_model.hpp"

#include "povgini/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace povgini {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::EmptyDataset: return "empty dataset";
  case ErrorKind::DegenerateWeights: return "degenerate weights";
  case ErrorKind::Parameter: return "parameter error";
  case ErrorKind::Configuration: return "configuration error";
  case ErrorKind::NonPositiveMean: return "non-positive mean";
  case ErrorKind::Schema: return "schema error";
  case ErrorKind::Row: return "row error";
  case ErrorKind::Validation: return "validation error";
  case ErrorKind::Io: return "I/O error";
  }
  return "error";
}

std::vector<SourceId> canonical_sources() {
  return {sources::farm, sources::nonfarm, sources::transfer};
}

double HouseholdRecord::income(const SourceId& source) const {
  auto it = incomes.find(source);
  if (it == incomes.end())
    throw Error(ErrorKind::Configuration,
                "household '" + id + "' has no income source '" + source.name + "'");
  return it->second;
}

Dataset Dataset::create(std::vector<HouseholdRecord> households,
                        std::vector<SourceId> sources, DatasetOptions options) {
  if (households.empty())
    throw Error(ErrorKind::EmptyDataset, "dataset has no households");
  if (sources.empty())
    throw Error(ErrorKind::Configuration, "dataset has no income sources");

  std::set<SourceId> registry;
  for (const auto& s : sources) {
    if (s.name.empty())
      throw Error(ErrorKind::Configuration, "income source name is empty");
    if (!registry.insert(s).second)
      throw Error(ErrorKind::Configuration, "duplicate income source '" + s.name + "'");
  }

  std::set<std::string> ids;
  double total_income = 0.0;
  double total_weight = 0.0;
  for (const auto& h : households) {
    auto where = [&] { return "household '" + h.id + "'"; };
    if (!ids.insert(h.id).second)
      throw Error(ErrorKind::Validation, "duplicate household id '" + h.id + "'");
    if (!std::isfinite(h.weight) || h.weight < 0.0)
      throw Error(ErrorKind::Validation, where() + ": weight must be finite and >= 0");

    if (h.incomes.size() != registry.size())
      for (const auto& [src, _] : h.incomes)
        if (!registry.contains(src))
          throw Error(ErrorKind::Validation,
                      where() + ": unregistered income source '" + src.name + "'");

    double total = 0.0;
    for (const auto& s : sources) {
      auto it = h.incomes.find(s);
      if (it == h.incomes.end())
        throw Error(ErrorKind::Validation, where() + ": missing income source '" + s.name + "'");
      const double v = it->second;
      if (!std::isfinite(v))
        throw Error(ErrorKind::Validation, where() + ": " + s.name + " amount is not finite");
      if (v < 0.0 && !options.allow_negative)
        throw Error(ErrorKind::Validation,
                    where() + ": negative " + s.name + " amount (enable allow_negative)");
      total += v;
    }
    if (!std::isfinite(total) || total < 0.0)
      throw Error(ErrorKind::Validation, where() + ": total income must be finite and >= 0");
    total_income += h.weight * total;
    total_weight += h.weight;
  }
  if (!(total_weight > 0.0))
    throw Error(ErrorKind::DegenerateWeights, "total household weight is zero");
  if (!(total_income / total_weight > 0.0))
    throw Error(ErrorKind::NonPositiveMean, "mean total income must be positive");

  return Dataset(std::move(households), std::move(sources), std::move(options));
}

bool Dataset::has_source(const SourceId& source) const {
  return std::find(sources_.begin(), sources_.end(), source) != sources_.end();
}

std::vector<double> Dataset::column(const SourceId& source) const {
  if (!has_source(source))
    throw Error(ErrorKind::Configuration, "unknown income source '" + source.name + "'");
  std::vector<double> out;
  out.reserve(households_.size());
  for (const auto& h : households_)
    out.push_back(h.incomes.at(source));
  return out;
}

std::vector<double> Dataset::totals() const {
  std::vector<double> out;
  out.reserve(households_.size());
  for (const auto& h : households_) {
    double t = 0.0;
    for (const auto& s : sources_)
      t += h.incomes.at(s);
    out.push_back(t);
  }
  return out;
}

std::vector<double> Dataset::weights() const {
  std::vector<double> out;
  out.reserve(households_.size());
  for (const auto& h : households_)
    out.push_back(h.weight);
  return out;
}

std::vector<double> Dataset::unit_weights() const {
  return std::vector<double>(households_.size(), 1.0);
}

IncomeBundle IncomeBundle::make(std::string label, std::vector<SourceId> included) {
  if (included.empty())
    throw Error(ErrorKind::Configuration, "bundle '" + label + "' includes no sources");
  std::set<SourceId> seen;
  for (const auto& s : included) {
    if (s.name.empty())
      throw Error(ErrorKind::Configuration, "bundle '" + label + "' has an empty source name");
    if (!seen.insert(s).second)
      throw Error(ErrorKind::Configuration,
                  "bundle '" + label + "' lists source '" + s.name + "' twice");
  }
  return IncomeBundle(std::move(label), std::move(included));
}

std::vector<IncomeBundle> canonical_bundles() {
  using namespace sources;
  return {
      IncomeBundle::make("farm", {farm}),
      IncomeBundle::make("farm+nonfarm", {farm, nonfarm}),
      IncomeBundle::make("farm+transfer", {farm, transfer}),
      IncomeBundle::make("farm+nonfarm+transfer", {farm, nonfarm, transfer}),
  };
}

IncomeBundle parse_bundle(const std::string& spec) {
  std::vector<SourceId> included;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, '+')) {
    auto b = part.find_first_not_of(" \t");
    auto e = part.find_last_not_of(" \t");
    included.push_back(SourceId{b == std::string::npos ? "" : part.substr(b, e - b + 1)});
  }
  if (!spec.empty() && spec.back() == '+')
    included.push_back(SourceId{""});
  return IncomeBundle::make(spec, std::move(included));
}

PovertyLine::PovertyLine(double z) : z_(z) {
  if (!std::isfinite(z) || z <= 0.0)
    throw Error(ErrorKind::Parameter, "poverty line must be finite and > 0");
}

double bundle_income(const HouseholdRecord& record, const IncomeBundle& bundle) {
  double sum = 0.0;
  for (const auto& s : bundle.included_sources())
    sum += record.income(s);
  return sum;
}

std::vector<double> bundle_incomes(const Dataset& data, const IncomeBundle& bundle) {
  for (const auto& s : bundle.included_sources())
    if (!data.has_source(s))
      throw Error(ErrorKind::Configuration, "bundle '" + bundle.label() +
                                                "' uses unknown income source '" + s.name + "'");
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& h : data.households())
    out.push_back(bundle_income(h, bundle));
  return out;
}

PovertyStatus classify_poor(double income, const PovertyLine& line) noexcept {
  return income < line.z() ? PovertyStatus::Poor : PovertyStatus::NonPoor;
}

} // namespace povgini
