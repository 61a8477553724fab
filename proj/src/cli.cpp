#include "povgini/cli.hpp"

#include "povgini/data_io.hpp"
#include "povgini/error.hpp"
#include "povgini/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <sstream>

namespace povgini {

namespace {

constexpr int kExitError = 1;
constexpr int kExitVerifyFailed = 2;

struct AnalysisFlags {
  std::string input;
  double poverty_line = 700.0;
  std::vector<double> alphas{0.0, 1.0, 2.0};
  std::vector<std::string> bundles;
  std::string base_bundle = "farm";
  std::vector<std::string> sources;
  std::string output_format = "table";
  bool verify = false;
  bool allow_negative = false;
  bool weighted = false;
};

struct SynthFlags {
  std::string preset;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> n;
  std::string output;
};

void add_input_options(CLI::App& cmd, AnalysisFlags& f) {
  cmd.add_option("--input", f.input, "household CSV file")->required();
  cmd.add_flag("--allow-negative", f.allow_negative, "accept negative source amounts");
  cmd.add_flag("--weighted", f.weighted, "use the weight column (unweighted by default)");
}

void add_sources_option(CLI::App& cmd, AnalysisFlags& f) {
  cmd.add_option("--sources", f.sources,
                 "comma-separated sources to decompose (default: all registered)")
      ->delimiter(',');
}

void add_fgt_options(CLI::App& cmd, AnalysisFlags& f) {
  cmd.add_option("--poverty-line", f.poverty_line, "poverty line z (default 700)");
  cmd.add_option("--alphas", f.alphas, "comma-separated alpha list (default 0,1,2)")
      ->delimiter(',');
  cmd.add_option("--bundle", f.bundles,
                 "income bundle such as farm+nonfarm; repeatable (default: the four "
                 "canonical bundles)");
  cmd.add_option("--base-bundle", f.base_bundle, "label of the base bundle (default farm)");
}

AnalysisConfig to_config(const AnalysisFlags& f) {
  AnalysisConfig config;
  config.poverty_line = PovertyLine(f.poverty_line);
  config.alphas = f.alphas;
  if (!f.bundles.empty()) {
    config.bundles.clear();
    for (const auto& b : f.bundles)
      config.bundles.push_back(parse_bundle(b));
  }
  config.base_bundle = f.base_bundle;
  for (const auto& name : f.sources)
    config.sources.push_back(SourceId{name});
  config.output_format = parse_output_format(f.output_format);
  config.verify = f.verify;
  config.allow_negative = f.allow_negative;
  config.weighted = f.weighted;
  return config;
}

Dataset load(const AnalysisFlags& f) {
  return parse_csv_file(f.input, CsvOptions{f.allow_negative});
}

FgtTable fgt_for(const Dataset& data, const AnalysisConfig& config) {
  return poverty_table(data, config.bundles, config.poverty_line, config.alphas,
                       PovertyTableOptions{config.base_bundle, config.weighted});
}

GiniDecomposition decompose_for(const Dataset& data, const AnalysisConfig& config) {
  const DecomposeOptions opts{config.weighted};
  return config.sources.empty() ? decompose(data, opts) : decompose(data, config.sources, opts);
}

int cmd_fgt(const AnalysisFlags& f, std::ostream& out) {
  const auto config = to_config(f);
  if (config.output_format == OutputFormat::Markdown)
    throw Error(ErrorKind::Parameter, "fgt supports table, json or csv output");
  const auto data = load(f);
  render_fgt(fgt_for(data, config), data, config.output_format, out);
  return 0;
}

int cmd_gini(const AnalysisFlags& f, std::ostream& out) {
  const auto config = to_config(f);
  if (config.output_format == OutputFormat::Markdown)
    throw Error(ErrorKind::Parameter, "gini supports table, json or csv output");
  const auto data = load(f);
  const auto d = decompose_for(data, config);
  if (!config.verify) {
    render_gini(d, config.output_format, out);
    return 0;
  }
  const auto checks = run_verification(data, config);
  render_gini(d, config.output_format, out, &checks);
  return all_passed(checks) ? 0 : kExitVerifyFailed;
}

int cmd_verify(const AnalysisFlags& f, std::ostream& out) {
  const auto config = to_config(f);
  const auto data = load(f);
  const auto checks = run_verification(data, config);
  render_checks(checks, config.output_format, out);
  return all_passed(checks) ? 0 : kExitVerifyFailed;
}

int cmd_report(const AnalysisFlags& f, std::ostream& out) {
  const auto config = to_config(f);
  if (config.output_format != OutputFormat::Markdown && config.output_format != OutputFormat::Json)
    throw Error(ErrorKind::Parameter, "report supports markdown or json output");
  const auto data = load(f);
  const auto fgt = fgt_for(data, config);
  const auto d = decompose_for(data, config);
  render_report(fgt, d, data, config.output_format, out);
  return 0;
}

int cmd_synth(const SynthFlags& f, std::ostream& out) {
  SynthConfig config;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in)
      throw Error(ErrorKind::Io, "cannot open '" + f.config + "' for reading");
    config = parse_synth_config(in);
  } else {
    config = load_preset(f.preset.empty() ? "kedah-like" : f.preset);
  }
  if (f.seed)
    config.seed = *f.seed;
  if (f.n)
    config.n_households = *f.n;

  const auto data = generate_synthetic(config);
  write_dataset_file(data, f.output);
  const auto shares = realized_shares(data);
  out << "wrote " << data.size() << " households to " << f.output << '\n';
  out << "seed " << config.seed << '\n';
  for (std::size_t k = 0; k < shares.size(); ++k)
    out << "share " << data.sources()[k].name << ' ' << format_double(shares[k]) << '\n';
  return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Poverty (FGT) and Gini source decomposition for household income data",
               "povgini"};
  app.require_subcommand(1);

  AnalysisFlags fgt_flags;
  auto* fgt = app.add_subcommand("fgt", "FGT indices by income bundle with % changes");
  add_input_options(*fgt, fgt_flags);
  add_fgt_options(*fgt, fgt_flags);
  fgt->add_option("--output-format", fgt_flags.output_format, "table | json | csv");

  AnalysisFlags gini_flags;
  auto* gini_cmd = app.add_subcommand("gini", "Gini decomposition by income source");
  add_input_options(*gini_cmd, gini_flags);
  add_sources_option(*gini_cmd, gini_flags);
  gini_cmd->add_option("--output-format", gini_flags.output_format, "table | json | csv");
  gini_cmd->add_flag("--verify", gini_flags.verify, "also run the oracle checks");

  AnalysisFlags report_flags;
  report_flags.output_format = "markdown";
  auto* report = app.add_subcommand("report", "combined poverty and inequality document");
  add_input_options(*report, report_flags);
  add_fgt_options(*report, report_flags);
  add_sources_option(*report, report_flags);
  report->add_option("--output-format", report_flags.output_format, "markdown | json");

  AnalysisFlags verify_flags;
  auto* verify = app.add_subcommand("verify", "run the oracle checks on a dataset");
  add_input_options(*verify, verify_flags);
  add_fgt_options(*verify, verify_flags);
  add_sources_option(*verify, verify_flags);
  verify->add_option("--output-format", verify_flags.output_format, "table | json");

  SynthFlags synth_flags;
  auto* synth = app.add_subcommand("synth", "write a seeded synthetic survey CSV");
  auto* preset_opt = synth->add_option("--preset", synth_flags.preset,
                                       "built-in preset (default kedah-like)");
  synth->add_option("--config", synth_flags.config, "key-value preset file")
      ->excludes(preset_opt);
  synth->add_option("--seed", synth_flags.seed, "override the preset seed");
  synth->add_option("-n,--n", synth_flags.n, "override the number of households");
  synth->add_option("--output", synth_flags.output, "destination CSV")->required();

  std::vector<const char*> argv;
  for (const auto& a : args)
    argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  std::ostringstream buffer;
  try {
    int status = 0;
    if (*fgt)
      status = cmd_fgt(fgt_flags, buffer);
    else if (*gini_cmd)
      status = cmd_gini(gini_flags, buffer);
    else if (*report)
      status = cmd_report(report_flags, buffer);
    else if (*verify)
      status = cmd_verify(verify_flags, buffer);
    else if (*synth)
      status = cmd_synth(synth_flags, buffer);
    out << buffer.str();
    return status;
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitError;
}

} // namespace povgini
