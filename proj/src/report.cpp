#include "povgini/report.hpp"

#include "povgini/data_io.hpp"
#include "povgini/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

namespace povgini {

using Json = nlohmann::ordered_json;

namespace {

constexpr double kPairwiseTol = 1e-12;
constexpr double kIdentityTol = 1e-10;
constexpr double kMarginalTol = 1e-4;
constexpr double kMarginalEpsilon = 1e-6;
constexpr const char* kNullCell = "—";

std::string fixed(double v, int decimals = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  // "-0.0000" reads as a sign claim the value does not support
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos)
    s.erase(0, 1);
  return s;
}

std::string fixed_or_null(const std::optional<double>& v, int decimals = 4) {
  return v ? fixed(*v, decimals) : std::string(kNullCell);
}

Json json_or_null(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string csv_or_empty(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::string alpha_label(double alpha) {
  return alpha == std::floor(alpha) ? fixed(alpha, 0) : format_double(alpha);
}

std::size_t display_width(const std::string& s) {
  // count UTF-8 code points, not bytes
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

using Grid = std::vector<std::vector<std::string>>;

void print_grid(const Grid& grid, std::ostream& out) {
  std::vector<std::size_t> widths;
  for (const auto& row : grid) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c)
      widths[c] = std::max(widths[c], display_width(row[c]));
  }
  for (std::size_t r = 0; r < grid.size(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < grid[r].size(); ++c) {
      if (c)
        line += "  ";
      line += grid[r][c];
      if (c + 1 < grid[r].size())
        line.append(widths[c] - display_width(grid[r][c]), ' ');
    }
    out << line << '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : widths)
        total += w;
      out << std::string(total + 2 * (widths.size() - 1), '-') << '\n';
    }
  }
}

void print_markdown(const Grid& grid, std::ostream& out) {
  for (std::size_t r = 0; r < grid.size(); ++r) {
    out << '|';
    for (const auto& cell : grid[r])
      out << ' ' << cell << " |";
    out << '\n';
    if (r == 0) {
      out << '|';
      for (std::size_t c = 0; c < grid[r].size(); ++c)
        out << (c == 0 ? " --- |" : " ---: |");
      out << '\n';
    }
  }
}

Grid fgt_grid(const FgtTable& table) {
  Grid grid;
  std::vector<std::string> header{"PLI", "alpha"};
  for (std::size_t j = 0; j < table.bundles.size(); ++j)
    header.push_back("(" + std::to_string(j + 1) + ") " + table.bundles[j]);
  for (std::size_t j = 1; j < table.bundles.size(); ++j)
    header.push_back("(" + std::to_string(table.bundles.size() + j) + ") %chg (" +
                     std::to_string(j + 1) + ") vs (1)");
  grid.push_back(std::move(header));
  for (const auto& row : table.rows) {
    std::vector<std::string> cells{format_double(table.line.z()), alpha_label(row.alpha)};
    for (const auto& idx : row.indices)
      cells.push_back(fixed(idx.value));
    for (const auto& pct : row.pct_change)
      cells.push_back(fixed_or_null(pct));
    grid.push_back(std::move(cells));
  }
  return grid;
}

std::optional<double> contribution_sum(const GiniDecomposition& d) {
  if (!d.excluded.empty())
    return std::nullopt;
  double s = 0.0;
  for (const auto& r : d.rows)
    s += *r.relative_contribution;
  return s;
}

Grid gini_grid(const GiniDecomposition& d) {
  Grid grid;
  grid.push_back({"source", "share", "source_gini", "gini_correlation", "relative_contribution",
                  "marginal_effect"});
  double share_sum = 0.0;
  for (const auto& r : d.rows) {
    share_sum += r.share;
    std::string contrib = fixed_or_null(r.relative_contribution);
    if (r.relative_contribution)
      contrib += " (" + fixed(100.0 * *r.relative_contribution, 2) + ")";
    grid.push_back({r.source.name, fixed(r.share), fixed_or_null(r.source_gini),
                    fixed_or_null(r.gini_correlation), contrib,
                    fixed_or_null(r.marginal_effect)});
  }
  const auto csum = contribution_sum(d);
  std::string contrib = fixed_or_null(csum);
  if (csum)
    contrib += " (" + fixed(100.0 * *csum, 2) + ")";
  grid.push_back({"total", fixed(share_sum), fixed(d.total_gini), kNullCell, contrib, kNullCell});
  return grid;
}

Json fgt_json(const FgtTable& table, const Dataset& data) {
  Json doc;
  doc["poverty_line"] = table.line.z();
  doc["currency"] = data.currency();
  doc["period"] = data.period();
  doc["sample_size"] = table.sample_size;
  doc["weighted"] = table.weighted;
  doc["base_bundle"] = table.bundles.front();
  doc["bundles"] = table.bundles;
  Json alphas = Json::array();
  for (const auto& row : table.rows)
    alphas.push_back(row.alpha);
  doc["alphas"] = alphas;
  Json entries = Json::array();
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.indices.size(); ++j) {
      Json e;
      e["alpha"] = row.alpha;
      e["bundle"] = table.bundles[j];
      e["value"] = row.indices[j].value;
      e["poor_count"] = row.indices[j].poor_count;
      e["pct_change"] = j == 0 ? Json(nullptr) : json_or_null(row.pct_change[j - 1]);
      entries.push_back(std::move(e));
    }
  }
  doc["entries"] = std::move(entries);
  return doc;
}

Json checks_json(const std::vector<CheckResult>& checks) {
  Json arr = Json::array();
  for (const auto& c : checks) {
    Json j;
    j["name"] = c.name;
    j["status"] = c.status == CheckStatus::Pass   ? "pass"
                  : c.status == CheckStatus::Fail ? "fail"
                                                  : "skipped";
    j["detail"] = c.detail;
    arr.push_back(std::move(j));
  }
  return arr;
}

Json gini_json(const GiniDecomposition& d, const std::vector<CheckResult>* checks) {
  Json doc;
  doc["sample_size"] = d.sample_size;
  doc["weighted"] = d.weighted;
  doc["total_gini"] = d.total_gini;
  doc["mean_total"] = d.mean_total;
  doc["residual"] = d.residual;
  Json excluded = Json::array();
  for (const auto& s : d.excluded)
    excluded.push_back(s.name);
  doc["excluded"] = std::move(excluded);
  Json rows = Json::array();
  for (const auto& r : d.rows) {
    Json j;
    j["source"] = r.source.name;
    j["mean"] = r.mean;
    j["share"] = r.share;
    j["source_gini"] = json_or_null(r.source_gini);
    j["gini_correlation"] = json_or_null(r.gini_correlation);
    j["relative_contribution"] = json_or_null(r.relative_contribution);
    j["marginal_effect"] = json_or_null(r.marginal_effect);
    // total Gini relative to this source's own Gini, both as a difference
    // and as a percentage of the source Gini
    if (r.source_gini) {
      j["total_minus_source_gini"] = d.total_gini - *r.source_gini;
      j["total_vs_source_gini_pct"] =
          *r.source_gini != 0.0
              ? Json(100.0 * (d.total_gini - *r.source_gini) / *r.source_gini)
              : Json(nullptr);
    } else {
      j["total_minus_source_gini"] = nullptr;
      j["total_vs_source_gini_pct"] = nullptr;
    }
    rows.push_back(std::move(j));
  }
  doc["sources"] = std::move(rows);
  if (checks)
    doc["verification"] = checks_json(*checks);
  return doc;
}

Json summary_json(const SignSummary& s) {
  Json doc;
  Json sources = Json::array();
  for (const auto& src : s.sources) {
    Json j;
    j["source"] = src.source.name;
    j["marginal_effect"] = json_or_null(src.marginal_effect);
    j["effect"] = std::string(to_string(src.effect));
    sources.push_back(std::move(j));
  }
  doc["sources"] = std::move(sources);
  Json poverty = Json::array();
  for (const auto& p : s.poverty) {
    Json j;
    j["alpha"] = p.alpha;
    j["largest_reduction_bundle"] =
        p.largest_reduction_bundle ? Json(*p.largest_reduction_bundle) : Json(nullptr);
    j["largest_reduction_pct"] = json_or_null(p.largest_reduction_pct);
    j["all_bundles_weakly_reduce"] = p.all_bundles_weakly_reduce;
    poverty.push_back(std::move(j));
  }
  doc["poverty"] = std::move(poverty);
  return doc;
}

std::string alpha_name(double alpha) {
  if (alpha == 0.0)
    return "headcount (alpha 0)";
  if (alpha == 1.0)
    return "poverty gap (alpha 1)";
  if (alpha == 2.0)
    return "squared poverty gap (alpha 2)";
  return "alpha " + format_double(alpha);
}

} // namespace

OutputFormat parse_output_format(const std::string& text) {
  if (text == "table")
    return OutputFormat::Table;
  if (text == "json")
    return OutputFormat::Json;
  if (text == "csv")
    return OutputFormat::Csv;
  if (text == "markdown" || text == "md")
    return OutputFormat::Markdown;
  throw Error(ErrorKind::Parameter, "unknown output format '" + text + "'");
}

std::string_view to_string(SourceEffect effect) {
  switch (effect) {
  case SourceEffect::Equalizing: return "equalizing";
  case SourceEffect::Disequalizing: return "dis-equalizing";
  case SourceEffect::Neutral: return "neutral";
  case SourceEffect::Undefined: return "undefined";
  }
  return "undefined";
}

std::vector<CheckResult> run_verification(const Dataset& data, const AnalysisConfig& config) {
  std::vector<CheckResult> checks;
  auto add = [&](std::string name, bool ok, std::string detail) {
    checks.push_back({std::move(name), ok ? CheckStatus::Pass : CheckStatus::Fail,
                      std::move(detail)});
  };

  const auto weights = config.weighted ? data.weights() : data.unit_weights();
  const auto sources = config.sources.empty() ? data.sources() : config.sources;
  std::vector<double> totals(data.size(), 0.0);
  for (const auto& s : sources) {
    const auto col = data.column(s);
    for (std::size_t i = 0; i < col.size(); ++i)
      totals[i] += col[i];
  }
  const DecomposeOptions opts{config.weighted};
  const auto d = decompose(data, sources, opts);

  {
    const double cov_form = gini(totals, weights);
    const double pairwise = gini_pairwise_oracle(totals, weights);
    const double diff = std::fabs(cov_form - pairwise);
    add("gini_pairwise_total", diff <= kPairwiseTol,
        "|covariance - pairwise| = " + format_double(diff));
  }
  for (const auto& row : d.rows) {
    if (!(row.mean > 0.0))
      continue;
    const auto col = data.column(row.source);
    const double diff = std::fabs(gini(col, weights) - gini_pairwise_oracle(col, weights));
    add("gini_pairwise_" + row.source.name, diff <= kPairwiseTol,
        "|covariance - pairwise| = " + format_double(diff));
  }

  const std::string excluded_note =
      d.excluded.empty() ? "" : " (" + std::to_string(d.excluded.size()) + " degenerate sources excluded)";
  add("decomposition_identity", std::fabs(d.residual) <= kIdentityTol,
      "|sum S*G*R - G| = " + format_double(std::fabs(d.residual)) + excluded_note);

  if (d.excluded.empty() && d.total_gini > 0.0) {
    double me_sum = 0.0;
    double share_sum = 0.0;
    for (const auto& r : d.rows) {
      me_sum += *r.marginal_effect;
      share_sum += r.share;
    }
    add("marginal_effect_sum", std::fabs(me_sum) <= kIdentityTol,
        "|sum marginal effects| = " + format_double(std::fabs(me_sum)));
    add("share_sum", std::fabs(share_sum - 1.0) <= kPairwiseTol,
        "|sum shares - 1| = " + format_double(std::fabs(share_sum - 1.0)));
  } else {
    checks.push_back({"marginal_effect_sum", CheckStatus::Skipped,
                      "degenerate sources or zero Gini"});
  }

  std::vector<double> sorted = totals;
  std::sort(sorted.begin(), sorted.end());
  const bool ties = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
  for (const auto& r : d.rows) {
    const std::string name = "marginal_effect_numeric_" + r.source.name;
    if (!r.marginal_effect) {
      checks.push_back({name, CheckStatus::Skipped, "analytic marginal effect undefined"});
      continue;
    }
    const double numeric =
        marginal_effect_numeric(data, r.source, kMarginalEpsilon, sources, opts);
    const double diff = std::fabs(numeric - *r.marginal_effect);
    std::string detail = "|analytic - numeric| = " + format_double(diff);
    if (diff <= kMarginalTol) {
      add(name, true, detail);
    } else if (ties) {
      // G has kinks where totals tie; the one-sided difference need not match
      checks.push_back({name, CheckStatus::Skipped, detail + " (tied totals)"});
    } else {
      add(name, false, detail);
    }
  }

  for (const auto& bundle : config.bundles) {
    bool has_all = std::all_of(bundle.included_sources().begin(), bundle.included_sources().end(),
                               [&](const SourceId& s) { return data.has_source(s); });
    if (!has_all)
      continue;
    const auto inc = bundle_incomes(data, bundle);
    const double p0 = fgt_index(inc, weights, config.poverty_line, 0.0).value;
    const double p1 = fgt_index(inc, weights, config.poverty_line, 1.0).value;
    const double p2 = fgt_index(inc, weights, config.poverty_line, 2.0).value;
    add("fgt_monotone_" + bundle.label(), p2 <= p1 && p1 <= p0,
        "P0 = " + format_double(p0) + ", P1 = " + format_double(p1) + ", P2 = " +
            format_double(p2));
  }
  return checks;
}

bool all_passed(const std::vector<CheckResult>& checks) {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

SignSummary summarize(const FgtTable& fgt, const GiniDecomposition& gini) {
  SignSummary s;
  for (const auto& r : gini.rows) {
    SourceSummary src{r.source, r.marginal_effect, SourceEffect::Undefined};
    if (r.marginal_effect) {
      if (*r.marginal_effect < 0.0)
        src.effect = SourceEffect::Equalizing;
      else if (*r.marginal_effect > 0.0)
        src.effect = SourceEffect::Disequalizing;
      else
        src.effect = SourceEffect::Neutral;
    }
    s.sources.push_back(std::move(src));
  }
  for (const auto& row : fgt.rows) {
    PovertySummary p;
    p.alpha = row.alpha;
    std::optional<std::size_t> best;
    for (std::size_t j = 1; j < row.indices.size(); ++j) {
      if (row.indices[j].value > row.indices[0].value)
        p.all_bundles_weakly_reduce = false;
      if (!best || row.indices[j].value < row.indices[*best].value)
        best = j;
    }
    if (best) {
      p.largest_reduction_bundle = fgt.bundles[*best];
      p.largest_reduction_pct = row.pct_change[*best - 1];
    }
    s.poverty.push_back(std::move(p));
  }
  return s;
}

void render_fgt(const FgtTable& table, const Dataset& data, OutputFormat format,
                std::ostream& out) {
  switch (format) {
  case OutputFormat::Json:
    out << fgt_json(table, data).dump(2) << '\n';
    return;
  case OutputFormat::Csv: {
    out << "alpha";
    for (const auto& b : table.bundles)
      out << ',' << b;
    for (std::size_t j = 1; j < table.bundles.size(); ++j)
      out << ",pct_change_" << table.bundles[j];
    out << '\n';
    for (const auto& row : table.rows) {
      out << format_double(row.alpha);
      for (const auto& idx : row.indices)
        out << ',' << format_double(idx.value);
      for (const auto& pct : row.pct_change)
        out << ',' << csv_or_empty(pct);
      out << '\n';
    }
    return;
  }
  case OutputFormat::Markdown:
    print_markdown(fgt_grid(table), out);
    return;
  case OutputFormat::Table:
    out << "FGT poverty indices (poverty line " << format_double(table.line.z()) << ' '
        << data.currency() << '/' << data.period() << ", n = " << table.sample_size << ", "
        << (table.weighted ? "weighted" : "unweighted") << ")\n\n";
    print_grid(fgt_grid(table), out);
    return;
  }
}

void render_checks(const std::vector<CheckResult>& checks, OutputFormat format,
                   std::ostream& out) {
  if (format == OutputFormat::Json) {
    out << checks_json(checks).dump(2) << '\n';
    return;
  }
  for (const auto& c : checks) {
    const char* tag = c.status == CheckStatus::Pass   ? "PASS"
                      : c.status == CheckStatus::Fail ? "FAIL"
                                                      : "SKIP";
    out << '[' << tag << "] " << c.name << ": " << c.detail << '\n';
  }
}

void render_gini(const GiniDecomposition& d, OutputFormat format, std::ostream& out,
                 const std::vector<CheckResult>* checks) {
  switch (format) {
  case OutputFormat::Json:
    out << gini_json(d, checks).dump(2) << '\n';
    return;
  case OutputFormat::Csv: {
    out << "source,share,source_gini,gini_correlation,relative_contribution,marginal_effect\n";
    double share_sum = 0.0;
    for (const auto& r : d.rows) {
      share_sum += r.share;
      out << r.source.name << ',' << format_double(r.share) << ','
          << csv_or_empty(r.source_gini) << ',' << csv_or_empty(r.gini_correlation) << ','
          << csv_or_empty(r.relative_contribution) << ',' << csv_or_empty(r.marginal_effect)
          << '\n';
    }
    out << "total," << format_double(share_sum) << ',' << format_double(d.total_gini) << ",,"
        << csv_or_empty(contribution_sum(d)) << ",\n";
    if (checks) {
      out << '\n';
      render_checks(*checks, OutputFormat::Table, out);
    }
    return;
  }
  case OutputFormat::Markdown:
  case OutputFormat::Table:
    if (format == OutputFormat::Table)
      out << "Gini decomposition by income source (n = " << d.sample_size << ", "
          << (d.weighted ? "weighted" : "unweighted") << ")\n\n";
    if (format == OutputFormat::Table)
      print_grid(gini_grid(d), out);
    else
      print_markdown(gini_grid(d), out);
    out << "\nresidual (sum S*G*R - G): " << format_double(d.residual) << '\n';
    if (!d.excluded.empty()) {
      out << "excluded degenerate sources:";
      for (const auto& s : d.excluded)
        out << ' ' << s.name;
      out << '\n';
    }
    if (checks) {
      out << '\n';
      render_checks(*checks, OutputFormat::Table, out);
    }
    return;
  }
}

void render_report(const FgtTable& fgt, const GiniDecomposition& gini, const Dataset& data,
                   OutputFormat format, std::ostream& out) {
  const SignSummary summary = summarize(fgt, gini);
  if (format == OutputFormat::Json) {
    Json doc;
    doc["fgt"] = fgt_json(fgt, data);
    doc["gini"] = gini_json(gini, nullptr);
    doc["summary"] = summary_json(summary);
    out << doc.dump(2) << '\n';
    return;
  }
  if (format != OutputFormat::Markdown && format != OutputFormat::Table)
    throw Error(ErrorKind::Parameter, "report supports markdown or json output");

  out << "# Poverty and inequality by income source\n\n";
  out << "Households: " << data.size() << ". Poverty line: " << format_double(fgt.line.z())
      << ' ' << data.currency() << '/' << data.period() << ". "
      << (fgt.weighted ? "Weighted" : "Unweighted") << " estimates.\n\n";
  out << "## FGT poverty indices by income bundle\n\n";
  print_markdown(fgt_grid(fgt), out);
  out << "\n## Gini decomposition by income source\n\n";
  print_markdown(gini_grid(gini), out);
  out << "\nResidual (sum S*G*R - G): " << format_double(gini.residual) << "\n";
  out << "\n## Summary\n\n";
  for (const auto& p : summary.poverty) {
    out << "- " << alpha_name(p.alpha) << ": ";
    if (p.largest_reduction_bundle && p.largest_reduction_pct &&
        *p.largest_reduction_pct == 0.0) {
      out << "no bundle changes the index from `" << fgt.bundles.front() << "`";
    } else if (p.largest_reduction_bundle) {
      out << "largest reduction with `" << *p.largest_reduction_bundle << "`";
      if (p.largest_reduction_pct)
        out << " (" << fixed(*p.largest_reduction_pct) << "% vs `" << fgt.bundles.front()
            << "`)";
      else
        out << " (base index is 0)";
      out << (p.all_bundles_weakly_reduce ? "; no bundle raises poverty above the base"
                                          : "; some bundle raises poverty above the base");
    } else {
      out << "only the base bundle was evaluated";
    }
    out << ".\n";
  }
  for (const auto& s : summary.sources) {
    out << "- `" << s.source.name << "` is " << to_string(s.effect);
    if (s.marginal_effect)
      out << " (marginal effect " << fixed(*s.marginal_effect) << ")";
    out << ".\n";
  }
}

} // namespace povgini
