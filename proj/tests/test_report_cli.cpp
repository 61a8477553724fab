#include "povgini/cli.hpp"
#include "povgini/data_io.hpp"
#include "povgini/error.hpp"
#include "povgini/report.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace povgini;
using Json = nlohmann::ordered_json;

namespace {

const std::string kData = POVGINI_TEST_DATA_DIR;
const std::string kGolden = POVGINI_GOLDEN_DIR;

struct Run {
  int status = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "povgini");
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.status = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("povgini_test_" + name);
}

// Same shape, same keys in the same order, same strings, numbers within tol.
void check_json_matches(const Json& got, const Json& want, const std::string& where = "$") {
  INFO("at ", where);
  if (want.is_number() && got.is_number()) {
    CHECK(std::fabs(got.get<double>() - want.get<double>()) <= 1e-12);
    return;
  }
  REQUIRE(got.type() == want.type());
  if (want.is_object()) {
    REQUIRE(got.size() == want.size());
    auto g = got.begin();
    for (auto w = want.begin(); w != want.end(); ++w, ++g) {
      CHECK(g.key() == w.key());
      check_json_matches(g.value(), w.value(), where + "." + w.key());
    }
  } else if (want.is_array()) {
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i)
      check_json_matches(got[i], want[i], where + "[" + std::to_string(i) + "]");
  } else {
    CHECK(got == want);
  }
}

const Json& entry(const Json& fgt, double alpha, const std::string& bundle) {
  for (const auto& e : fgt["entries"])
    if (e["alpha"].get<double>() == alpha && e["bundle"] == bundle)
      return e;
  FAIL("no entry for ", bundle, " at alpha ", alpha);
  static const Json none;
  return none;
}

const Json& source_row(const Json& gini, const std::string& name) {
  for (const auto& r : gini["sources"])
    if (r["source"] == name)
      return r;
  FAIL("no row for source ", name);
  static const Json none;
  return none;
}

} // namespace

TEST_CASE("fgt on the four-record dataset") {
  const auto r = run({"fgt", "--input", kData + "/small4.csv", "--output-format", "json"});
  REQUIRE(r.status == 0);
  CHECK(r.err.empty());
  const auto doc = Json::parse(r.out);
  CHECK(doc["base_bundle"] == "farm");
  CHECK(entry(doc, 0, "farm")["value"].get<double>() == doctest::Approx(0.5));
  CHECK(entry(doc, 1, "farm")["value"].get<double>() == doctest::Approx(0.325));
  CHECK(entry(doc, 2, "farm")["value"].get<double>() == doctest::Approx(0.2225));
  CHECK(entry(doc, 1, "farm")["pct_change"].is_null());
  for (const auto& e : doc["entries"])
    for (const char* key : {"alpha", "bundle", "value", "pct_change"})
      CHECK(e.contains(key));
}

TEST_CASE("fgt with nobody poor gives zeros and null percentage changes") {
  const auto r = run({"fgt", "--input", kData + "/all_rich.csv", "--output-format", "json"});
  REQUIRE(r.status == 0);
  for (const auto& e : Json::parse(r.out)["entries"]) {
    CHECK(e["value"].get<double>() == 0.0);
    CHECK(e["pct_change"].is_null());
  }
  const auto table = run({"fgt", "--input", kData + "/all_rich.csv"});
  CHECK(table.out.find("—") != std::string::npos);
}

TEST_CASE("fgt csv and table layouts") {
  const auto csv = run({"fgt", "--input", kData + "/small4.csv", "--output-format", "csv"});
  REQUIRE(csv.status == 0);
  CHECK(csv.out.starts_with("alpha,farm,farm+nonfarm,farm+transfer,farm+nonfarm+transfer,"
                            "pct_change_farm+nonfarm,pct_change_farm+transfer,"
                            "pct_change_farm+nonfarm+transfer\n"));
  const auto table = run({"fgt", "--input", kData + "/small4.csv"});
  CHECK(table.out.find("0.3250") != std::string::npos);
  CHECK(table.out.find("-19.7802") != std::string::npos);
}

TEST_CASE("fgt options: custom bundles, base and alphas") {
  const auto r = run({"fgt", "--input", kData + "/small4.csv", "--output-format", "json",
                      "--bundle", "farm+transfer", "--bundle", "farm", "--base-bundle",
                      "farm+transfer", "--alphas", "0.5,3", "--poverty-line", "800"});
  REQUIRE(r.status == 0);
  const auto doc = Json::parse(r.out);
  CHECK(doc["bundles"] == Json::array({"farm+transfer", "farm"}));
  CHECK(doc["alphas"].size() == 2);
  CHECK(doc["poverty_line"].get<double>() == 800.0);

  CHECK(run({"fgt", "--input", kData + "/small4.csv", "--base-bundle", "nonfarm"}).status == 1);
  CHECK(run({"fgt", "--input", kData + "/small4.csv", "--bundle", "farm+rent"}).status == 1);
  CHECK(run({"fgt", "--input", kData + "/small4.csv", "--poverty-line", "0"}).status == 1);
  CHECK(run({"fgt", "--input", kData + "/small4.csv", "--alphas", "-1"}).status == 1);
  const auto dup = run({"fgt", "--input", kData + "/small4.csv", "--bundle", "farm", "--bundle",
                        "farm"});
  CHECK(dup.status == 1);
  CHECK(dup.out.empty());
}

TEST_CASE("gini csv header and total row") {
  const auto r = run({"gini", "--input", kData + "/small4.csv", "--output-format", "csv"});
  REQUIRE(r.status == 0);
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "source,share,source_gini,gini_correlation,relative_contribution,marginal_effect");
  CHECK(r.out.find("\ntotal,") != std::string::npos);
}

TEST_CASE("gini on a single source: full share, full contribution, zero effect") {
  const auto r = run({"gini", "--input", kData + "/small4.csv", "--sources", "farm",
                      "--output-format", "json"});
  REQUIRE(r.status == 0);
  const auto doc = Json::parse(r.out);
  REQUIRE(doc["sources"].size() == 1);
  const auto& row = doc["sources"][0];
  CHECK(row["share"].get<double>() == doctest::Approx(1.0));
  CHECK(row["relative_contribution"].get<double>() == doctest::Approx(1.0));
  CHECK(std::fabs(row["marginal_effect"].get<double>()) < 1e-15);
  CHECK(doc["total_gini"].get<double>() == doctest::Approx(0.34375));
}

TEST_CASE("gini --verify passes and embeds the checks") {
  const auto r = run({"gini", "--input", kData + "/small4.csv", "--verify", "--output-format",
                      "json"});
  CHECK(r.status == 0);
  const auto doc = Json::parse(r.out);
  REQUIRE(doc.contains("verification"));
  for (const auto& c : doc["verification"])
    CHECK(c["status"] != "fail");
}

TEST_CASE("transfers concentrated among the poor are equalizing") {
  const auto r = run({"report", "--input", kData + "/transfer_poor.csv", "--output-format",
                      "json"});
  REQUIRE(r.status == 0);
  const auto doc = Json::parse(r.out);
  CHECK(source_row(doc["gini"], "transfer")["marginal_effect"].get<double>() < 0.0);
  bool found = false;
  for (const auto& s : doc["summary"]["sources"])
    if (s["source"] == "transfer") {
      found = true;
      CHECK(s["effect"] == "equalizing");
    }
  CHECK(found);
}

TEST_CASE("report markdown carries both tables and the summary") {
  const auto r = run({"report", "--input", kData + "/small4.csv"});
  REQUIRE(r.status == 0);
  CHECK(r.out.find("| --- |") != std::string::npos);
  CHECK(r.out.find("farm+nonfarm+transfer") != std::string::npos);
  CHECK(r.out.find("dis-equalizing") != std::string::npos);
  CHECK(run({"report", "--input", kData + "/small4.csv", "--output-format", "csv"}).status == 1);
}

TEST_CASE("summarize classifies effects and poverty reductions") {
  const auto data = parse_csv_file(kData + "/small4.csv");
  const AnalysisConfig config;
  const auto fgt = poverty_table(data, config.bundles, config.poverty_line, config.alphas,
                                 PovertyTableOptions{});
  const auto summary = summarize(fgt, decompose(data));
  REQUIRE(summary.sources.size() == 3);
  CHECK(summary.sources[0].effect == SourceEffect::Equalizing);
  CHECK(summary.sources[1].effect == SourceEffect::Disequalizing);
  CHECK(summary.sources[2].effect == SourceEffect::Equalizing);
  REQUIRE(summary.poverty.size() == 3);
  CHECK(summary.poverty[1].largest_reduction_bundle == "farm+nonfarm+transfer");
  for (const auto& p : summary.poverty)
    CHECK(p.all_bundles_weakly_reduce);
}

TEST_CASE("json output matches the golden documents") {
  const std::vector<std::pair<std::vector<std::string>, std::string>> cases{
      {{"fgt", "--input", kData + "/small4.csv", "--output-format", "json"}, "fgt_small4.json"},
      {{"gini", "--input", kData + "/small4.csv", "--output-format", "json"}, "gini_small4.json"},
      {{"report", "--input", kData + "/small4.csv", "--output-format", "json"},
       "report_small4.json"},
  };
  for (const auto& [args, golden] : cases) {
    INFO(golden);
    const auto r = run(args);
    REQUIRE(r.status == 0);
    check_json_matches(Json::parse(r.out), Json::parse(slurp(kGolden + "/" + golden)));
  }
}

TEST_CASE("errors go to stderr with a nonzero exit and no document") {
  const auto empty = run({"fgt", "--input", kData + "/header_only.csv", "--output-format", "json"});
  CHECK(empty.status == 1);
  CHECK(empty.out.empty());
  CHECK(empty.err.find("empty dataset") != std::string::npos);

  const auto missing = run({"gini", "--input", kData + "/does_not_exist.csv"});
  CHECK(missing.status == 1);
  CHECK(missing.out.empty());

  CHECK(run({"fgt"}).status != 0);
  CHECK(run({}).status != 0);
  CHECK(run({"gini", "--input", kData + "/small4.csv", "--output-format", "yaml"}).status == 1);
}

TEST_CASE("synth writes reproducible files") {
  const auto a = temp_path("synth_a.csv");
  const auto b = temp_path("synth_b.csv");
  const auto ra = run({"synth", "--preset", "kedah-like", "--seed", "7", "--output", a.string()});
  const auto rb = run({"synth", "--seed", "7", "--output", b.string()});
  REQUIRE(ra.status == 0);
  REQUIRE(rb.status == 0);
  CHECK(ra.out.find("wrote 381 households") != std::string::npos);
  CHECK(ra.out.find("seed 7") != std::string::npos);
  CHECK(ra.out.find("share nonfarm ") != std::string::npos);
  CHECK(slurp(a.string()) == slurp(b.string()));

  const auto c = temp_path("synth_c.csv");
  REQUIRE(run({"synth", "--seed", "8", "-n", "50", "--output", c.string()}).status == 0);
  CHECK(parse_csv_file(c.string()).size() == 50);
  CHECK(slurp(c.string()) != slurp(a.string()));

  // report json on the same file is byte-identical across runs
  const auto r1 = run({"report", "--input", a.string(), "--output-format", "json"});
  const auto r2 = run({"report", "--input", a.string(), "--output-format", "json"});
  CHECK(r1.status == 0);
  CHECK(r1.out == r2.out);

  for (const auto& p : {a, b, c})
    std::filesystem::remove(p);
}

TEST_CASE("synth rejects bad parameters without writing") {
  const auto p = temp_path("synth_bad.csv");
  std::filesystem::remove(p);
  const auto zero = run({"synth", "--n", "0", "--output", p.string()});
  CHECK(zero.status != 0);
  CHECK(zero.out.empty());
  CHECK_FALSE(std::filesystem::exists(p));
  CHECK(run({"synth", "--preset", "atlantis", "--output", p.string()}).status == 1);
  CHECK(run({"synth", "--preset", "kedah-like", "--config", "x.conf", "--output", p.string()})
            .status != 0);
}

TEST_CASE("synth from a config file") {
  const auto conf = temp_path("custom.conf");
  const auto csv = temp_path("custom.csv");
  {
    std::ofstream out(conf);
    out << "n_households = 20\nseed = 3\n"
           "source.farm.participation = 1\nsource.farm.log_location = 6\n"
           "source.farm.log_scale = 0.5\n"
           "source.nonfarm.participation = 0.5\nsource.nonfarm.log_location = 6\n"
           "source.nonfarm.log_scale = 0.5\n"
           "source.transfer.participation = 0.5\nsource.transfer.log_location = 5\n"
           "source.transfer.log_scale = 0.5\n";
  }
  const auto r = run({"synth", "--config", conf.string(), "--output", csv.string()});
  REQUIRE(r.status == 0);
  CHECK(parse_csv_file(csv.string()).size() == 20);
  std::filesystem::remove(conf);
  std::filesystem::remove(csv);
}

TEST_CASE("parse_output_format") {
  CHECK(parse_output_format("json") == OutputFormat::Json);
  CHECK(parse_output_format("md") == OutputFormat::Markdown);
  CHECK_THROWS_AS(parse_output_format("xml"), Error);
}

TEST_CASE("kedah-like preset: verify passes and the report has both tables") {
  const auto csv = temp_path("kedah.csv");
  REQUIRE(run({"synth", "--preset", "kedah-like", "--seed", "42", "--output", csv.string()})
              .status == 0);
  const auto g = run({"gini", "--input", csv.string(), "--verify", "--output-format", "json"});
  CHECK(g.status == 0);
  const auto doc = Json::parse(g.out);
  CHECK(std::fabs(doc["residual"].get<double>()) <= 1e-10);
  for (const auto& c : doc["verification"])
    CHECK(c["status"] == "pass");

  const auto md = run({"report", "--input", csv.string()});
  REQUIRE(md.status == 0);
  CHECK(md.out.find("(1) farm") != std::string::npos);
  CHECK(md.out.find("gini_correlation") != std::string::npos);
  CHECK(md.out.find("equalizing") != std::string::npos);
  std::filesystem::remove(csv);
}
