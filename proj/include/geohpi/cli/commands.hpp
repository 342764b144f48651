// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "geohpi/index_engine.hpp"
#include "geohpi/ingestion.hpp"
#include "geohpi/metrics.hpp"
#include "geohpi/synthgen.hpp"

namespace geohpi::cli {

inline constexpr const char* kToolVersion = "0.3.0";

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitInternal = 3 };

struct IngestOptions {
  std::filesystem::path input;
  std::filesystem::path output_dir = ".";
  std::string schema;
  bool allow_zero_bedrooms = false;
};

struct IndexOptions {
  std::filesystem::path input;
  std::filesystem::path output_dir = ".";
  std::string schema;
  std::string label = "index";
  IndexConfig config;
};

struct CompareOptions {
  /// Each entry is "path" or "name=path".
  std::vector<std::string> series;
  std::filesystem::path output_dir = ".";
  bool svg = false;
};

struct SynthOptions {
  SynthConfig config;
  std::filesystem::path output_dir = ".";
};

struct ComparisonRow {
  std::string name;
  SeriesMetrics metrics;
};

struct Comparison {
  std::vector<MonthKey> months;  // intersection of all inputs
  std::vector<ComparisonRow> rows;
};

// Each command writes every output or none of them. Progress and warnings go to `log`.

/// filtered.csv, parse_errors.csv, filtration_report.json, manifest.json
FiltrationReport cmd_ingest(const IngestOptions& options, std::ostream& log);

/// <label>_series.csv, <label>_matrix.csv, <label>_metrics.json, <label>_manifest.json
IndexRun cmd_index(const IndexOptions& options, std::ostream& log);

/// comparison.csv, series_long.csv, optional comparison.svg, manifest.json.
/// Prints the metrics table to `out`.
Comparison cmd_compare(const CompareOptions& options, std::ostream& out, std::ostream& log);

/// listings.csv, truth.csv, manifest.json
SynthDataset cmd_synth(const SynthOptions& options, std::ostream& log);

/// Argument parsing and dispatch; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of a file's bytes. Throws Io.
std::string sha256_file(const std::filesystem::path& path);

/// "p1,..,p6;p1,..,p6" -> rows. Throws InvalidArgument.
std::vector<BedroomMix> parse_bedroom_mix(const std::string& text);

}  // namespace geohpi::cli
