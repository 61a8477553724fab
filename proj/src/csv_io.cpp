#include "povgini/data_io.hpp"

#include "povgini/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>

namespace povgini {

namespace {

constexpr std::string_view kIncomeSuffix = "_income";

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the record starts
};

// RFC 4180 reader: quoted fields may contain delimiters, doubled quotes and
// newlines. CR before LF is dropped.
std::vector<CsvRecord> read_records(std::string_view text) {
  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = current.fields.size() == 1 && current.fields[0].empty();
    if (!blank)
      records.push_back(std::move(current));
    current = CsvRecord{};
    current.line = line;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n')
          ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
    case '"':
      if (field_started || !field.empty())
        throw Error(ErrorKind::Row, "line " + std::to_string(line) +
                                        ": quote inside an unquoted field");
      in_quotes = true;
      field_started = true;
      break;
    case ',':
      end_field();
      break;
    case '\r':
      if (i + 1 < text.size() && text[i + 1] == '\n')
        break;
      field.push_back(c);
      break;
    case '\n':
      ++line;
      end_record();
      break;
    default:
      field.push_back(c);
    }
  }
  if (in_quotes)
    throw Error(ErrorKind::Row, "line " + std::to_string(current.line) + ": unterminated quote");
  if (!field.empty() || field_started || !current.fields.empty())
    end_record();
  return records;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_number(std::string_view text) {
  std::string s = trim(text);
  std::string_view v = s;
  if (!v.empty() && v.front() == '+')
    v.remove_prefix(1);
  if (v.empty())
    return std::nullopt;
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
    return std::nullopt;
  return out;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

} // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{})
    throw Error(ErrorKind::Parameter, "cannot format number");
  return std::string(buf.data(), ptr);
}

Dataset parse_csv(std::istream& in, const CsvOptions& options) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (text.rfind("\xEF\xBB\xBF", 0) == 0)
    text.erase(0, 3);
  const auto records = read_records(text);
  if (records.empty())
    throw Error(ErrorKind::EmptyDataset, "CSV input is empty (no header row)");

  const auto& header = records.front().fields;
  std::map<std::string, std::size_t> columns;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = trim(header[i]);
    if (name.empty())
      throw Error(ErrorKind::Schema, "header column " + std::to_string(i + 1) + " is empty");
    if (!columns.emplace(name, i).second)
      throw Error(ErrorKind::Schema, "duplicate column '" + name + "'");
  }

  for (const char* required : {"household_id", "farm_income", "nonfarm_income", "transfer_income"})
    if (!columns.contains(required))
      throw Error(ErrorKind::Schema, std::string("missing required column '") + required + "'");

  std::vector<SourceId> sources;
  std::vector<std::size_t> source_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = trim(header[i]);
    if (name.size() > kIncomeSuffix.size() && name.ends_with(kIncomeSuffix)) {
      sources.push_back(SourceId{name.substr(0, name.size() - kIncomeSuffix.size())});
      source_cols.push_back(i);
    }
  }

  auto optional_col = [&](const char* name) -> std::optional<std::size_t> {
    auto it = columns.find(name);
    return it == columns.end() ? std::nullopt : std::optional(it->second);
  };
  const std::size_t id_col = columns.at("household_id");
  const auto district_col = optional_col("district");
  const auto stratum_col = optional_col("stratum");
  const auto weight_col = optional_col("weight");

  std::vector<HouseholdRecord> households;
  std::map<std::string, std::size_t> first_seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where =
        "row " + std::to_string(r) + " (line " + std::to_string(rec.line) + ")";
    if (rec.fields.size() != header.size())
      throw Error(ErrorKind::Row, where + ": expected " + std::to_string(header.size()) +
                                      " fields, found " + std::to_string(rec.fields.size()));

    HouseholdRecord h;
    h.id = trim(rec.fields[id_col]);
    if (h.id.empty())
      throw Error(ErrorKind::Row, where + ", column 'household_id': empty id");
    if (auto [it, inserted] = first_seen.emplace(h.id, r); !inserted)
      throw Error(ErrorKind::Validation, where + ": duplicate household_id '" + h.id +
                                             "' (first seen at row " +
                                             std::to_string(it->second) + ")");
    if (district_col) {
      if (auto d = trim(rec.fields[*district_col]); !d.empty())
        h.district = d;
    }
    if (stratum_col) {
      if (auto s = trim(rec.fields[*stratum_col]); !s.empty())
        h.stratum = s;
    }

    for (std::size_t k = 0; k < sources.size(); ++k) {
      const std::string& cell = rec.fields[source_cols[k]];
      const std::string col = sources[k].name + std::string(kIncomeSuffix);
      auto value = parse_number(cell);
      if (!value)
        throw Error(ErrorKind::Row, where + ", column '" + col + "': cannot parse '" + cell +
                                        "' as a finite decimal");
      if (*value < 0.0 && !options.allow_negative)
        throw Error(ErrorKind::Row, where + ", column '" + col + "': negative amount " +
                                        trim(cell) + " (enable allow_negative)");
      h.incomes[sources[k]] = *value;
    }
    if (weight_col) {
      const std::string& cell = rec.fields[*weight_col];
      auto value = parse_number(cell);
      if (!value || *value < 0.0)
        throw Error(ErrorKind::Row, where + ", column 'weight': '" + cell +
                                        "' is not a finite non-negative decimal");
      h.weight = *value;
    }
    double total = 0.0;
    for (const auto& s : sources)
      total += h.incomes[s];
    if (total < 0.0)
      throw Error(ErrorKind::Row, where + ": total income " + format_double(total) +
                                      " is negative");
    households.push_back(std::move(h));
  }
  if (households.empty())
    throw Error(ErrorKind::EmptyDataset, "CSV input has a header but no data rows");

  DatasetOptions opts;
  opts.allow_negative = options.allow_negative;
  return Dataset::create(std::move(households), std::move(sources), opts);
}

Dataset parse_csv_file(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  try {
    return parse_csv(in, options);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_dataset(const Dataset& data, std::ostream& out) {
  if (data.size() == 0)
    throw Error(ErrorKind::EmptyDataset, "refusing to write a dataset with no households");
  out << "household_id,district,stratum";
  for (const auto& s : data.sources())
    out << ',' << quote_if_needed(s.name + std::string(kIncomeSuffix));
  out << ",weight\n";
  for (const auto& h : data.households()) {
    out << quote_if_needed(h.id) << ',' << quote_if_needed(h.district) << ','
        << quote_if_needed(h.stratum);
    for (const auto& s : data.sources())
      out << ',' << format_double(h.incomes.at(s));
    out << ',' << format_double(h.weight) << '\n';
  }
}

void write_dataset_file(const Dataset& data, const std::filesystem::path& path) {
  if (data.size() == 0)
    throw Error(ErrorKind::EmptyDataset, "refusing to write a dataset with no households");
  std::ostringstream buffer;
  write_dataset(data, buffer);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << buffer.str();
  out.flush();
  if (!out)
    throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

} // namespace povgini
