// SPDX-License-Identifier: Apache-2.0

/**
 * \file index_engine.hpp
 * \brief Stratified mix-adjusted median price index.
 *
 * Pipeline:
 *  - voting: every record votes for its nearest neighbour(s); the least voted
 *    share of records is discarded as geographically isolated.
 *  - stratification: every month m_b serves as a base. Each record listed in
 *    m_b is matched to its nearest neighbour in every earlier month m_x and
 *    r_b(m_x) is the median of price(record) / price(neighbour).
 *  - chaining: the change from m_x to m_{x+1} is the mean, over the earlier
 *    months both bases share, of r_{x+1}(m_i) - r_x(m_i).
 *
 * Neighbours come from the GeoTree bucket surrounding the record's key. With
 * bedroom factoring the bedroom count is prepended to the geohash so buckets
 * only mix listings with the same number of bedrooms.
 */

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geohpi/geotree.hpp"
#include "geohpi/ingestion.hpp"
#include "geohpi/listing.hpp"

namespace geohpi {

enum class ChainMode {
  Additive,   // L_{x+1} = L_x + mean(r_{x+1}(m_i) - r_x(m_i))
  Geometric,  // L_{x+1} = L_x * mean(r_{x+1}(m_i) / r_x(m_i))
};

std::string_view to_string(ChainMode mode) noexcept;
std::optional<ChainMode> parse_chain_mode(std::string_view text) noexcept;

struct IndexConfig {
  std::size_t votes_per_record = 1;
  double removal_fraction = 0.10;
  bool factor_bedrooms = false;
  std::size_t min_ratios_for_chain = 3;
  int geohash_precision = kDefaultGeohashPrecision;
  std::size_t scb_min_population = 1;
  ChainMode chain_mode = ChainMode::Additive;
  /// Worker threads for the ratio matrix; 0 picks the hardware concurrency.
  unsigned threads = 0;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

/// Tree key for a record: bedroom character (when factoring) then the geohash.
GeohashPlus listing_key(const ListingRecord& record, const IndexConfig& config);

/// Builds a tree over `records` inserted in (month, id) order.
GeoTree build_tree(std::span<const ListingRecord> records, const IndexConfig& config);

struct VotingResult {
  std::vector<ListingRecord> survivors;  // tree slot order
  std::vector<std::uint32_t> votes;      // per tree slot
  std::vector<std::uint64_t> removed_ids;
};

/// Each record votes for its `votes_per_record` nearest distinct neighbours
/// (itself excluded). Records are ranked by votes ascending, then by distance
/// to their own nearest neighbour descending, then by id, and the first
/// floor(removal_fraction * N) are removed. Throws VotingUndefined below 2 records.
VotingResult voting_stage(const GeoTree& tree, const IndexConfig& config);

struct RatioEntry {
  double median = 0.0;
  std::size_t support = 0;
};

/// Strictly lower-triangular matrix of median price ratios r_base(prior).
class RatioMatrix {
 public:
  explicit RatioMatrix(std::vector<MonthKey> months);

  const std::vector<MonthKey>& months() const noexcept { return months_; }
  std::size_t size() const noexcept { return months_.size(); }

  /// Requires prior < base < size().
  const std::optional<RatioEntry>& at(std::size_t base, std::size_t prior) const {
    return entries_[offset(base, prior)];
  }
  void set(std::size_t base, std::size_t prior, RatioEntry entry) {
    entries_[offset(base, prior)] = entry;
  }

  void write_csv(std::ostream& out) const;

 private:
  static std::size_t offset(std::size_t base, std::size_t prior) {
    return base * (base - 1) / 2 + prior;
  }

  std::vector<MonthKey> months_;
  std::vector<std::optional<RatioEntry>> entries_;
};

/// Median of values; the mean of the two central values for an even count.
/// Requires a non-empty input.
double median_of(std::vector<double> values);

/// Every month from the earliest to the latest listing, gaps included.
std::vector<MonthKey> month_range(std::span<const ListingRecord> records);

/// Matrix over month_range of the tree's records.
RatioMatrix build_ratio_matrix(const GeoTree& tree, const IndexConfig& config);

struct IndexSeries {
  std::vector<MonthKey> months;
  std::vector<double> values;  // values[0] == 100
  std::vector<double> diffs;   // values[i + 1] - values[i]
  std::vector<bool> flagged;   // month reached without enough shared ratios

  void write_csv(std::ostream& out) const;
  /// Reads month,value[,diff,flagged] rows written by write_csv.
  static IndexSeries read_csv(std::istream& in);
};

/// Throws ChainUndefined for fewer than 2 months.
IndexSeries chain_index(const RatioMatrix& matrix, const IndexConfig& config);

struct StageTimings {
  std::chrono::duration<double> tree_build{};
  std::chrono::duration<double> voting{};
  std::chrono::duration<double> ratio_matrix{};
  std::chrono::duration<double> chaining{};
};

struct IndexRun {
  IndexSeries series;
  RatioMatrix matrix{{}};
  FiltrationReport report;
  std::size_t voting_removed = 0;
  StageTimings timings;
};

/// Full pipeline over filtered records. Ids must be unique (InvalidArgument).
IndexRun compute_index(std::span<const ListingRecord> records, const IndexConfig& config);

/// Filters `raw` first; the run carries the filtration report.
IndexRun compute_index(std::span<const RawListing> raw, const IndexConfig& config,
                       const FilterOptions& filter = {});

}  // namespace geohpi
