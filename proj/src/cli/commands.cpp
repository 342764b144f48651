// SPDX-License-Identifier: Apache-2.0

#include "geohpi/cli/commands.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "geohpi/csv.hpp"
#include "geohpi/error.hpp"
#include "output_set.hpp"
#include "svg_chart.hpp"

namespace geohpi::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double seconds(Clock::duration d) { return std::chrono::duration<double>(d).count(); }

json manifest_base(const std::string& command) {
  json m;
  m["tool"] = "geohpi";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["started_at"] = utc_now();
  return m;
}

json input_entry(const fs::path& path) {
  return json{{"path", path.string()}, {"sha256", sha256_file(path)}};
}

json config_json(const IndexConfig& c) {
  return json{{"votes_per_record", c.votes_per_record},
              {"removal_fraction", c.removal_fraction},
              {"factor_bedrooms", c.factor_bedrooms},
              {"min_ratios_for_chain", c.min_ratios_for_chain},
              {"geohash_precision", c.geohash_precision},
              {"scb_min_population", c.scb_min_population},
              {"chain_mode", std::string(to_string(c.chain_mode))}};
}

json config_json(const SynthConfig& c) {
  json mix = json::array();
  for (const auto& row : c.bedroom_mix) mix.push_back(row);
  return json{{"months", c.months},
              {"records_per_month", c.records_per_month},
              {"drift", c.drift},
              {"noise", c.noise},
              {"bedroom_mix", mix},
              {"bedroom_premium", c.bedroom_premium},
              {"cluster_count", c.cluster_count},
              {"cluster_radius_m", c.cluster_radius_m},
              {"base_price", c.base_price},
              {"start_month", c.start_month.str()},
              {"seed", c.seed}};
}

void write_manifest(OutputSet& outputs, const std::string& name, json manifest) {
  json files = json::array();
  for (const auto& n : outputs.names()) files.push_back(n);
  files.push_back(name);
  manifest["outputs"] = files;
  outputs.open(name) << manifest.dump(2) << '\n';
}

FilterResult load_filtered(const fs::path& input, const std::string& schema, bool allow_zero,
                           std::ostream& log, std::vector<ParseError>* errors_out = nullptr) {
  const auto mapping = ColumnMapping::parse(schema);
  auto parsed = parse_listings_file(input, mapping);
  for (const auto& e : parsed.errors) log << "warning: " << e.message << '\n';
  FilterOptions options;
  options.allow_zero_bedrooms = allow_zero;
  auto filtered = filter_listings(parsed.records, options);
  if (errors_out) *errors_out = std::move(parsed.errors);
  return filtered;
}

std::string strip_suffix(std::string s, std::string_view suffix) {
  if (s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
    s.resize(s.size() - suffix.size());
  }
  return s;
}

double parse_double(const std::string& text, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw Error(ErrorCode::InvalidArgument, std::string("invalid ") + what + " \"" + text + "\"");
  }
  return v;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(parse_double(item, what));
  return values;
}

// Fills options not given on the command line from a flat key = value file.
void apply_config_file(CLI::App& cmd, const std::string& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::InvalidArgument, "config file not found: " + path);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(path);
  } catch (const CLI::Error& e) {
    throw Error(ErrorCode::InvalidArgument, "cannot read config " + path + ": " + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    std::string name = item.name;
    std::replace(name.begin(), name.end(), '_', '-');
    auto* opt = cmd.get_option_no_throw("--" + name);
    if (opt == nullptr || name == "config") {
      throw Error(ErrorCode::InvalidArgument, "unknown config key \"" + item.name + "\"");
    }
    if (opt->count() > 0) continue;
    try {
      opt->add_result(item.inputs);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw Error(ErrorCode::InvalidArgument, "config key " + item.name + ": " + e.what());
    }
  }
}

}  // namespace

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::ostringstream hex;
  for (unsigned i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

std::vector<BedroomMix> parse_bedroom_mix(const std::string& text) {
  std::vector<BedroomMix> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) {
    const auto values = parse_list(row, "bedroom mix");
    if (values.size() != kMaxBedrooms) {
      throw Error(ErrorCode::InvalidArgument,
                  "bedroom mix rows need 6 probabilities, got " + std::to_string(values.size()));
    }
    BedroomMix mix;
    std::copy(values.begin(), values.end(), mix.begin());
    rows.push_back(mix);
  }
  if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "empty bedroom mix");
  return rows;
}

FiltrationReport cmd_ingest(const IngestOptions& options, std::ostream& log) {
  const auto t0 = Clock::now();
  std::vector<ParseError> errors;
  auto filtered = load_filtered(options.input, options.schema, options.allow_zero_bedrooms, log,
                                &errors);
  const auto t1 = Clock::now();

  OutputSet outputs(options.output_dir);
  write_listings_csv(outputs.open("filtered.csv"), filtered.kept);
  auto& err_out = outputs.open("parse_errors.csv");
  err_out << "line,message\n";
  for (const auto& e : errors) err_out << e.line << ',' << csv::escape(e.message) << '\n';
  outputs.open("filtration_report.json") << filtered.report.to_json() << '\n';

  auto manifest = manifest_base("ingest");
  manifest["config"] = json{{"schema", options.schema},
                            {"allow_zero_bedrooms", options.allow_zero_bedrooms}};
  manifest["inputs"] = json::array({input_entry(options.input)});
  manifest["timings_seconds"] = json{{"parse_and_filter", seconds(t1 - t0)},
                                     {"write", seconds(Clock::now() - t1)}};
  write_manifest(outputs, "manifest.json", std::move(manifest));
  outputs.commit();

  const auto& r = filtered.report;
  log << "ingest: " << r.surviving << " of " << r.total << " listings kept ("
      << std::fixed << std::setprecision(1) << 100.0 * r.surviving_fraction() << "%), "
      << errors.size() << " parse errors\n";
  log.unsetf(std::ios::floatfield);
  return r;
}

IndexRun cmd_index(const IndexOptions& options, std::ostream& log) {
  options.config.validate();
  const auto t0 = Clock::now();
  auto filtered = load_filtered(options.input, options.schema, false, log);
  const auto t1 = Clock::now();
  auto run = compute_index(std::span<const ListingRecord>(filtered.kept), options.config);
  run.report = filtered.report;

  json metrics_json;
  if (run.series.values.size() >= 3) {
    metrics_json = json::parse(compute_metrics(run.series.values).to_json());
  } else {
    log << "warning: fewer than 3 months, smoothness metrics undefined\n";
    metrics_json = json{{"std_dev", nullptr}, {"std_dev_diffs", nullptr}, {"msm", nullptr},
                        {"spike_count", nullptr}};
  }
  std::size_t flagged = 0;
  for (bool f : run.series.flagged) flagged += f ? 1 : 0;
  if (flagged > 0) log << "warning: " << flagged << " month(s) flagged for sparse history\n";

  OutputSet outputs(options.output_dir);
  const std::string& label = options.label;
  run.series.write_csv(outputs.open(label + "_series.csv"));
  run.matrix.write_csv(outputs.open(label + "_matrix.csv"));
  outputs.open(label + "_metrics.json") << metrics_json.dump(2) << '\n';

  auto manifest = manifest_base("index");
  manifest["config"] = config_json(options.config);
  manifest["config"]["schema"] = options.schema;
  manifest["inputs"] = json::array({input_entry(options.input)});
  manifest["records"] = json{{"parsed", run.report.total},
                             {"filtered", run.report.surviving},
                             {"removed_by_voting", run.voting_removed}};
  manifest["timings_seconds"] = json{{"load", seconds(t1 - t0)},
                                     {"tree_build", run.timings.tree_build.count()},
                                     {"voting", run.timings.voting.count()},
                                     {"ratio_matrix", run.timings.ratio_matrix.count()},
                                     {"chaining", run.timings.chaining.count()}};
  write_manifest(outputs, label + "_manifest.json", std::move(manifest));
  outputs.commit();

  log << "index: " << run.series.months.size() << " months, " << run.report.surviving
      << " listings, " << run.voting_removed << " removed by voting\n";
  return run;
}

Comparison cmd_compare(const CompareOptions& options, std::ostream& out, std::ostream& log) {
  if (options.series.empty()) {
    throw Error(ErrorCode::InvalidArgument, "compare needs at least one series file");
  }
  struct Loaded {
    std::string name;
    fs::path path;
    IndexSeries series;
  };
  std::vector<Loaded> loaded;
  for (const auto& arg : options.series) {
    Loaded l;
    const auto eq = arg.find('=');
    l.path = eq == std::string::npos ? fs::path(arg) : fs::path(arg.substr(eq + 1));
    l.name = eq == std::string::npos ? strip_suffix(l.path.stem().string(), "_series")
                                     : arg.substr(0, eq);
    std::ifstream in(l.path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + l.path.string());
    l.series = IndexSeries::read_csv(in);
    loaded.push_back(std::move(l));
  }

  std::set<MonthKey> common(loaded[0].series.months.begin(), loaded[0].series.months.end());
  for (const auto& l : loaded) {
    std::set<MonthKey> mine(l.series.months.begin(), l.series.months.end());
    std::set<MonthKey> both;
    std::set_intersection(common.begin(), common.end(), mine.begin(), mine.end(),
                          std::inserter(both, both.begin()));
    common = std::move(both);
  }
  if (common.empty()) throw Error(ErrorCode::Schema, "series have no months in common");
  if (common.size() < 3) {
    throw Error(ErrorCode::UndefinedMetric, "series share fewer than 3 months");
  }

  Comparison cmp;
  cmp.months.assign(common.begin(), common.end());
  std::vector<ChartSeries> chart;
  for (const auto& l : loaded) {
    if (l.series.months.size() != common.size()) {
      log << "warning: " << l.name << " aligned to " << common.size() << " common months (had "
          << l.series.months.size() << ")\n";
    }
    ChartSeries cs{l.name, {}};
    for (std::size_t i = 0; i < l.series.months.size(); ++i) {
      if (common.count(l.series.months[i])) cs.values.push_back(l.series.values[i]);
    }
    cmp.rows.push_back({l.name, compute_metrics(cs.values)});
    chart.push_back(std::move(cs));
  }

  OutputSet outputs(options.output_dir);
  auto& table = outputs.open("comparison.csv");
  table << "series,std_dev,std_dev_diffs,msm,spike_count\n";
  for (const auto& row : cmp.rows) {
    table << csv::escape(row.name) << ',' << csv::format_double(row.metrics.std_dev) << ','
          << csv::format_double(row.metrics.std_dev_diffs) << ','
          << csv::format_double(row.metrics.msm) << ',' << row.metrics.spike_count << '\n';
  }
  auto& longform = outputs.open("series_long.csv");
  longform << "series_name,month,value\n";
  for (const auto& cs : chart) {
    for (std::size_t i = 0; i < cs.values.size(); ++i) {
      longform << csv::escape(cs.name) << ',' << cmp.months[i].str() << ','
               << csv::format_double(cs.values[i]) << '\n';
    }
  }
  if (options.svg) write_svg_chart(outputs.open("comparison.svg"), cmp.months, chart);

  auto manifest = manifest_base("compare");
  json inputs = json::array();
  for (const auto& l : loaded) inputs.push_back(input_entry(l.path));
  manifest["inputs"] = inputs;
  manifest["config"] = json{{"svg", options.svg}};
  write_manifest(outputs, "manifest.json", std::move(manifest));
  outputs.commit();

  std::size_t width = 6;
  for (const auto& row : cmp.rows) width = std::max(width, row.name.size());
  out << std::left << std::setw(static_cast<int>(width)) << "Series" << std::right
      << std::setw(12) << "St. Dev" << std::setw(24) << "St. Dev of Differences"
      << std::setw(12) << "MSM" << '\n';
  for (const auto& row : cmp.rows) {
    out << std::left << std::setw(static_cast<int>(width)) << row.name << std::right
        << std::fixed << std::setprecision(3) << std::setw(12) << row.metrics.std_dev
        << std::setw(24) << row.metrics.std_dev_diffs << std::setprecision(2) << std::setw(12)
        << row.metrics.msm << '\n';
  }
  out.unsetf(std::ios::floatfield);
  out << std::setprecision(6);
  return cmp;
}

SynthDataset cmd_synth(const SynthOptions& options, std::ostream& log) {
  const auto t0 = Clock::now();
  auto data = generate(options.config);
  const auto t1 = Clock::now();

  OutputSet outputs(options.output_dir);
  write_listings_csv(outputs.open("listings.csv"), data.records);
  write_truth_csv(outputs.open("truth.csv"), data.truth);
  auto manifest = manifest_base("synth");
  manifest["config"] = config_json(options.config);
  manifest["inputs"] = json::array();
  manifest["timings_seconds"] = json{{"generate", seconds(t1 - t0)},
                                     {"write", seconds(Clock::now() - t1)}};
  write_manifest(outputs, "manifest.json", std::move(manifest));
  outputs.commit();

  log << "synth: " << data.records.size() << " listings over " << data.truth.size()
      << " months\n";
  return data;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stratified mix-adjusted median house price index over a geohash prefix tree",
               "geohpi"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  IngestOptions ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse and filter a listing CSV");
  ingest_cmd->add_option("--input", ingest.input, "Listing CSV")->required();
  ingest_cmd->add_option("--output-dir", ingest.output_dir, "Directory for outputs");
  ingest_cmd->add_option("--schema", ingest.schema,
                         "Column mapping, e.g. \"price=asking,date=listed\"");
  ingest_cmd->add_flag("--allow-studios", ingest.allow_zero_bedrooms,
                       "Keep listings with 0 bedrooms");

  IndexOptions index;
  std::string chain_mode = "additive";
  auto* index_cmd = app.add_subcommand("index", "Compute the price index");
  std::string index_config_file;
  index_cmd->add_option("--config", index_config_file,
                        "Flat key = value file using the long flag names; flags win");
  index_cmd->add_option("--input", index.input, "Filtered listing CSV")->required();
  index_cmd->add_option("--output-dir", index.output_dir, "Directory for outputs");
  index_cmd->add_option("--label", index.label, "Prefix for output file names");
  index_cmd->add_option("--schema", index.schema, "Column mapping");
  index_cmd->add_option("--precision", index.config.geohash_precision, "Geohash length")
      ->check(CLI::Range(1, kMaxGeohashPrecision));
  index_cmd->add_flag("--factor-bedrooms", index.config.factor_bedrooms,
                      "Prepend the bedroom count to every geohash");
  index_cmd->add_option("--votes-k", index.config.votes_per_record, "Votes cast per listing")
      ->check(CLI::PositiveNumber);
  index_cmd->add_option("--removal-fraction", index.config.removal_fraction,
                        "Share of least-voted listings removed");
  index_cmd->add_option("--min-ratios", index.config.min_ratios_for_chain,
                        "Shared history months needed to chain a month")
      ->check(CLI::PositiveNumber);
  index_cmd->add_option("--scb-min-population", index.config.scb_min_population,
                        "Population threshold for the surrounding bucket")
      ->check(CLI::PositiveNumber);
  index_cmd->add_option("--chain-mode", chain_mode, "additive or geometric")
      ->check(CLI::IsMember({"additive", "geometric"}));
  index_cmd->add_option("--threads", index.config.threads, "Worker threads (0 = all cores)");

  CompareOptions compare;
  auto* compare_cmd = app.add_subcommand("compare", "Tabulate smoothness of index series");
  compare_cmd->add_option("series", compare.series, "Series CSV files, optionally name=path")
      ->required();
  compare_cmd->add_option("--output-dir", compare.output_dir, "Directory for outputs");
  compare_cmd->add_flag("--svg", compare.svg, "Also write comparison.svg");

  SynthOptions synth;
  std::string mix, premium, start_month;
  bool mix_shift = false;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic listing dataset");
  synth_cmd->add_option("--output-dir", synth.output_dir, "Directory for outputs");
  synth_cmd->add_flag("--mix-shift", mix_shift,
                      "Start from the alternating 3-bed/4-bed preset; other flags override");
  synth_cmd->add_option("--months", synth.config.months);
  synth_cmd->add_option("--records-per-month", synth.config.records_per_month);
  synth_cmd->add_option("--drift", synth.config.drift, "Monthly fractional price change");
  synth_cmd->add_option("--noise", synth.config.noise, "Log-normal price noise sigma");
  synth_cmd->add_option("--mix", mix, "Bedroom shares 1..6 per month; rows separated by ';'");
  synth_cmd->add_option("--premium", premium, "Six price multipliers for 1..6 bedrooms");
  synth_cmd->add_option("--clusters", synth.config.cluster_count);
  synth_cmd->add_option("--cluster-radius", synth.config.cluster_radius_m, "Meters");
  synth_cmd->add_option("--base-price", synth.config.base_price);
  synth_cmd->add_option("--start-month", start_month, "YYYY-MM");
  synth_cmd->add_option("--seed", synth.config.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    try {
      if (*index_cmd) {
        if (!index_config_file.empty()) apply_config_file(*index_cmd, index_config_file);
        index.config.chain_mode = *parse_chain_mode(chain_mode);
        index.config.validate();
      }
      if (*synth_cmd) {
        if (mix_shift) {
          auto preset = mix_shift_config(synth.config.seed);
          // Explicit flags win over the preset.
          for (auto* opt : synth_cmd->get_options()) {
            if (opt->count() == 0) continue;
            const auto& name = opt->get_name();
            if (name == "--months") preset.months = synth.config.months;
            if (name == "--records-per-month") preset.records_per_month = synth.config.records_per_month;
            if (name == "--drift") preset.drift = synth.config.drift;
            if (name == "--noise") preset.noise = synth.config.noise;
            if (name == "--clusters") preset.cluster_count = synth.config.cluster_count;
            if (name == "--cluster-radius") preset.cluster_radius_m = synth.config.cluster_radius_m;
            if (name == "--base-price") preset.base_price = synth.config.base_price;
          }
          synth.config = preset;
        }
        if (!mix.empty()) synth.config.bedroom_mix = parse_bedroom_mix(mix);
        if (!premium.empty()) {
          const auto values = parse_list(premium, "premium");
          if (values.size() != kMaxBedrooms) {
            throw Error(ErrorCode::InvalidArgument, "--premium needs 6 values");
          }
          std::copy(values.begin(), values.end(), synth.config.bedroom_premium.begin());
        }
        if (!start_month.empty()) {
          const auto m = MonthKey::parse(start_month);
          if (!m) throw Error(ErrorCode::InvalidArgument, "invalid --start-month " + start_month);
          synth.config.start_month = *m;
        }
        synth.config.validate();
      }
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }

    if (*ingest_cmd) cmd_ingest(ingest, err);
    if (*index_cmd) cmd_index(index, err);
    if (*compare_cmd) cmd_compare(compare, out, err);
    if (*synth_cmd) cmd_synth(synth, err);
    return kExitOk;
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace geohpi::cli
