// SPDX-License-Identifier: Apache-2.0

#include "geohpi/index_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <thread>
#include <unordered_set>

#include "geohpi/csv.hpp"
#include "geohpi/error.hpp"

namespace geohpi {

namespace {

using Clock = std::chrono::steady_clock;

void invalid(const std::string& message) { throw Error(ErrorCode::InvalidArgument, message); }

}  // namespace

std::string_view to_string(ChainMode mode) noexcept {
  return mode == ChainMode::Additive ? "additive" : "geometric";
}

std::optional<ChainMode> parse_chain_mode(std::string_view text) noexcept {
  if (text == "additive") return ChainMode::Additive;
  if (text == "geometric") return ChainMode::Geometric;
  return std::nullopt;
}

void IndexConfig::validate() const {
  if (votes_per_record < 1) invalid("votes_per_record must be at least 1");
  if (!(removal_fraction >= 0.0 && removal_fraction < 1.0)) {
    invalid("removal_fraction must be in [0, 1)");
  }
  if (min_ratios_for_chain < 1) invalid("min_ratios_for_chain must be at least 1");
  if (geohash_precision < 1 || geohash_precision > kMaxGeohashPrecision) {
    invalid("geohash_precision must be in [1, 12]");
  }
  if (scb_min_population < 1) invalid("scb_min_population must be at least 1");
}

GeohashPlus listing_key(const ListingRecord& record, const IndexConfig& config) {
  const auto base = encode_geohash(record.point, config.geohash_precision);
  if (!config.factor_bedrooms) return make_geohash_plus("", base);
  const char bedrooms[] = {geohash_char(record.bedrooms), '\0'};
  return make_geohash_plus(bedrooms, base);
}

GeoTree build_tree(std::span<const ListingRecord> records, const IndexConfig& config) {
  std::vector<const ListingRecord*> order;
  order.reserve(records.size());
  for (const auto& r : records) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const ListingRecord* a, const ListingRecord* b) {
    return a->month != b->month ? a->month < b->month : a->id < b->id;
  });

  GeoTree tree(static_cast<std::size_t>(config.geohash_precision) +
               (config.factor_bedrooms ? 1 : 0));
  for (const auto* r : order) tree.insert(listing_key(*r, config), *r);
  return tree;
}

VotingResult voting_stage(const GeoTree& tree, const IndexConfig& config) {
  const std::size_t n = tree.size();
  if (n < 2) {
    throw Error(ErrorCode::VotingUndefined,
                "voting needs at least 2 records, got " + std::to_string(n));
  }

  VotingResult result;
  result.votes.assign(n, 0);
  std::vector<double> isolation(n, 0.0);
  std::vector<Slot> chosen;
  for (Slot s = 0; s < n; ++s) {
    chosen.clear();
    const NeighbourQuery query{tree.key(s), tree.record(s).point};
    for (std::size_t v = 0; v < config.votes_per_record; ++v) {
      const auto neighbour = tree.nearest_in_group(
          query,
          [&](Slot t, const ListingRecord&) {
            return t != s && std::find(chosen.begin(), chosen.end(), t) == chosen.end();
          },
          config.scb_min_population);
      if (!neighbour) break;
      if (chosen.empty()) {
        isolation[s] = haversine_distance(query.point, tree.record(*neighbour).point);
      }
      chosen.push_back(*neighbour);
      ++result.votes[*neighbour];
    }
  }

  std::vector<Slot> ranking(n);
  std::iota(ranking.begin(), ranking.end(), Slot{0});
  std::sort(ranking.begin(), ranking.end(), [&](Slot a, Slot b) {
    if (result.votes[a] != result.votes[b]) return result.votes[a] < result.votes[b];
    if (isolation[a] != isolation[b]) return isolation[a] > isolation[b];
    return tree.record(a).id < tree.record(b).id;
  });

  // The epsilon absorbs representation error in products such as 0.29 * 100.
  const auto remove_count =
      static_cast<std::size_t>(std::floor(config.removal_fraction * static_cast<double>(n) + 1e-9));
  std::vector<bool> removed(n, false);
  for (std::size_t i = 0; i < remove_count; ++i) {
    removed[ranking[i]] = true;
    result.removed_ids.push_back(tree.record(ranking[i]).id);
  }
  result.survivors.reserve(n - remove_count);
  for (Slot s = 0; s < n; ++s) {
    if (!removed[s]) result.survivors.push_back(tree.record(s));
  }
  return result;
}

RatioMatrix::RatioMatrix(std::vector<MonthKey> months)
    : months_(std::move(months)),
      entries_(months_.size() < 2 ? 0 : months_.size() * (months_.size() - 1) / 2) {}

void RatioMatrix::write_csv(std::ostream& out) const {
  out << "base_month,prior_month,median_ratio,support\n";
  for (std::size_t b = 1; b < months_.size(); ++b) {
    for (std::size_t x = 0; x < b; ++x) {
      const auto& e = at(b, x);
      out << months_[b].str() << ',' << months_[x].str() << ',';
      if (e) {
        out << csv::format_double(e->median) << ',' << e->support;
      } else {
        out << ",0";
      }
      out << '\n';
    }
  }
}

double median_of(std::vector<double> values) {
  if (values.empty()) invalid("median of an empty sequence");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2;
}

std::vector<MonthKey> month_range(std::span<const ListingRecord> records) {
  std::vector<MonthKey> months;
  if (records.empty()) return months;
  auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
                                      [](const auto& a, const auto& b) { return a.month < b.month; });
  for (MonthKey m = lo->month; m <= hi->month; m = m.next()) months.push_back(m);
  return months;
}

RatioMatrix build_ratio_matrix(const GeoTree& tree, const IndexConfig& config) {
  std::vector<ListingRecord> records;
  records.reserve(tree.size());
  for (Slot s = 0; s < tree.size(); ++s) records.push_back(tree.record(s));
  RatioMatrix matrix(month_range(records));
  const std::size_t n_months = matrix.size();
  if (n_months < 2) return matrix;

  const std::int32_t first = matrix.months().front().ordinal();
  std::vector<std::vector<Slot>> by_month(n_months);
  for (Slot s = 0; s < tree.size(); ++s) {
    by_month[static_cast<std::size_t>(tree.record(s).month.ordinal() - first)].push_back(s);
  }

  auto process_base = [&](std::size_t base) {
    std::vector<std::vector<double>> ratios(base);
    for (Slot h : by_month[base]) {
      const auto& record = tree.record(h);
      const NeighbourQuery query{tree.key(h), record.point};
      for (std::size_t x = 0; x < base; ++x) {
        const auto match =
            tree.nearest_in_month(query, matrix.months()[x], config.scb_min_population);
        if (!match) continue;
        ratios[x].push_back(static_cast<double>(record.price) /
                            static_cast<double>(tree.record(*match).price));
      }
    }
    for (std::size_t x = 0; x < base; ++x) {
      if (ratios[x].empty()) continue;
      const std::size_t support = ratios[x].size();
      matrix.set(base, x, RatioEntry{median_of(std::move(ratios[x])), support});
    }
  };

  unsigned workers = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(n_months - 1));
  if (workers == 1) {
    for (std::size_t b = 1; b < n_months; ++b) process_base(b);
    return matrix;
  }
  // Rows are disjoint, so workers write without synchronisation.
  std::atomic<std::size_t> next{1};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t b; (b = next.fetch_add(1)) < n_months;) process_base(b);
    });
  }
  pool.clear();
  return matrix;
}

IndexSeries chain_index(const RatioMatrix& matrix, const IndexConfig& config) {
  const std::size_t n = matrix.size();
  if (n < 2) {
    throw Error(ErrorCode::ChainUndefined,
                "chaining needs at least 2 months, got " + std::to_string(n));
  }
  const bool additive = config.chain_mode == ChainMode::Additive;

  IndexSeries series;
  series.months = matrix.months();
  series.flagged.assign(n, false);
  std::vector<double> level(n, 1.0);
  for (std::size_t x = 0; x + 1 < n; ++x) {
    std::optional<double> step;
    if (x == 0) {
      if (const auto& e = matrix.at(1, 0)) step = additive ? e->median - 1.0 : e->median;
    } else {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t i = 0; i < x; ++i) {
        const auto& next = matrix.at(x + 1, i);
        const auto& curr = matrix.at(x, i);
        if (!next || !curr) continue;
        sum += additive ? next->median - curr->median : next->median / curr->median;
        ++count;
      }
      // Early months cannot offer min_ratios_for_chain shared months; they need all x.
      const std::size_t needed = std::min(config.min_ratios_for_chain, x);
      if (count >= needed) step = sum / static_cast<double>(count);
    }
    if (!step) {
      series.flagged[x + 1] = true;
      step = additive ? 0.0 : 1.0;
    }
    level[x + 1] = additive ? level[x] + *step : level[x] * *step;
  }

  series.values.reserve(n);
  for (double l : level) series.values.push_back(100.0 * l);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    series.diffs.push_back(series.values[i + 1] - series.values[i]);
  }
  return series;
}

void IndexSeries::write_csv(std::ostream& out) const {
  out << "month,value,diff,flagged\n";
  for (std::size_t i = 0; i < months.size(); ++i) {
    out << months[i].str() << ',' << csv::format_double(values[i]) << ',';
    if (i > 0) out << csv::format_double(diffs[i - 1]);
    out << ',' << (flagged[i] ? 1 : 0) << '\n';
  }
}

IndexSeries IndexSeries::read_csv(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row) || row.size() < 2 || row[0] != "month" || row[1] != "value") {
    throw Error(ErrorCode::Schema, "series file must start with a month,value header");
  }
  IndexSeries series;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    const auto month = MonthKey::parse(row.size() > 0 ? row[0] : "");
    char* end = nullptr;
    const double value = row.size() > 1 ? std::strtod(row[1].c_str(), &end) : 0.0;
    if (!month || row.size() < 2 || row[1].empty() || end != row[1].c_str() + row[1].size()) {
      throw Error(ErrorCode::Schema, "malformed series row on line " + std::to_string(reader.line()));
    }
    if (!series.months.empty() && !(series.months.back() < *month)) {
      throw Error(ErrorCode::Schema, "series months must be strictly increasing (line " +
                                         std::to_string(reader.line()) + ")");
    }
    series.months.push_back(*month);
    series.values.push_back(value);
    series.flagged.push_back(row.size() > 3 && row[3] == "1");
  }
  for (std::size_t i = 0; i + 1 < series.values.size(); ++i) {
    series.diffs.push_back(series.values[i + 1] - series.values[i]);
  }
  return series;
}

IndexRun compute_index(std::span<const ListingRecord> records, const IndexConfig& config) {
  config.validate();
  std::unordered_set<std::uint64_t> ids;
  for (const auto& r : records) {
    if (!ids.insert(r.id).second) invalid("duplicate listing id " + std::to_string(r.id));
  }

  IndexRun run;
  run.report.total = records.size();
  run.report.surviving = records.size();

  auto t0 = Clock::now();
  const GeoTree all = build_tree(records, config);
  auto t1 = Clock::now();
  auto voting = voting_stage(all, config);
  run.voting_removed = voting.removed_ids.size();
  auto t2 = Clock::now();
  const GeoTree kept = build_tree(voting.survivors, config);
  run.timings.tree_build = (t1 - t0) + (Clock::now() - t2);
  run.timings.voting = t2 - t1;

  t0 = Clock::now();
  run.matrix = build_ratio_matrix(kept, config);
  t1 = Clock::now();
  run.series = chain_index(run.matrix, config);
  t2 = Clock::now();
  run.timings.ratio_matrix = t1 - t0;
  run.timings.chaining = t2 - t1;
  return run;
}

IndexRun compute_index(std::span<const RawListing> raw, const IndexConfig& config,
                       const FilterOptions& filter) {
  auto filtered = filter_listings(raw, filter);
  auto run = compute_index(std::span<const ListingRecord>(filtered.kept), config);
  run.report = filtered.report;
  return run;
}

}  // namespace geohpi
