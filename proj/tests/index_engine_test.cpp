// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <map>
#include <sstream>

#include <doctest.h>

#include "fixtures.hpp"
#include "geohpi/error.hpp"
#include "geohpi/index_engine.hpp"
#include "geohpi/metrics.hpp"
#include "geohpi/synthgen.hpp"
#include "oracles/brute_force.hpp"

using namespace geohpi;

namespace {

ListingRecord listing(std::uint64_t id, MonthKey month, std::int64_t price, double lat,
                      double lng, int bedrooms = 3) {
  ListingRecord r;
  r.id = id;
  r.month = month;
  r.list_date = CalendarDate{month.year(), month.month(), 15};
  r.price = price;
  r.point = GeoPoint(lat, lng);
  r.bedrooms = bedrooms;
  return r;
}

IndexConfig no_voting() {
  IndexConfig c;
  c.removal_fraction = 0.0;
  c.threads = 1;
  return c;
}

oracle::PipelineOptions options_of(const IndexConfig& c) {
  oracle::PipelineOptions o;
  o.precision = c.geohash_precision;
  o.bedrooms = c.factor_bedrooms;
  o.votes = c.votes_per_record;
  o.removal_fraction = c.removal_fraction;
  o.min_population = c.scb_min_population;
  o.min_ratios = c.min_ratios_for_chain;
  o.geometric = c.chain_mode == ChainMode::Geometric;
  return o;
}

void require_same(const IndexRun& run, const oracle::OracleIndex& want) {
  REQUIRE(run.series.months == want.months);
  const auto n = want.months.size();
  for (std::size_t b = 1; b < n; ++b) {
    for (std::size_t x = 0; x < b; ++x) {
      const auto& got = run.matrix.at(b, x);
      REQUIRE(got.has_value() == want.ratio[b][x].has_value());
      if (got) {
        REQUIRE(got->median == *want.ratio[b][x]);
        REQUIRE(got->support == want.support[b][x]);
      }
    }
  }
  REQUIRE(run.series.values == want.values);
  REQUIRE(run.series.flagged == want.flagged);
}

}  // namespace

TEST_CASE("config validation") {
  IndexConfig c;
  CHECK_NOTHROW(c.validate());
  c.removal_fraction = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.votes_per_record = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.geohash_precision = 13;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.scb_min_population = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("listing keys") {
  const auto r = listing(1, MonthKey(2020, 1), 100000, 53.3498, -6.2603, 4);
  IndexConfig c;
  CHECK(listing_key(r, c).text() == encode_geohash(r.point, 7).text());
  c.factor_bedrooms = true;
  CHECK(listing_key(r, c).text() == "4" + encode_geohash(r.point, 7).text());
  CHECK(build_tree(std::vector<ListingRecord>{r}, c).key_length() == 8);
}

TEST_CASE("median_of") {
  CHECK(median_of({3.0}) == 3.0);
  CHECK(median_of({4.0, 1.0, 3.0}) == 3.0);
  CHECK(median_of({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK_THROWS_AS(median_of({}), Error);
}

TEST_CASE("voting_stage") {
  const MonthKey m(2020, 1);
  SUBCASE("removal fraction zero keeps everything") {
    const auto records = testing::random_listings(3, {});
    IndexConfig c = no_voting();
    const auto tree = build_tree(records, c);
    CHECK(voting_stage(tree, c).survivors.size() == records.size());
  }
  SUBCASE("isolated listing is removed") {
    // Whatever id it carries, the isolated listing must go.
    for (std::uint64_t isolated_id : {1u, 3u, 99u}) {
      std::vector<ListingRecord> records;
      std::uint64_t id = 10;
      for (int i = 0; i < 4; ++i) records.push_back(listing(id++, m, 200000, 53.35, -6.26));
      // About 100 km north-west.
      records.push_back(listing(isolated_id, m, 200000, 53.95, -7.30));
      IndexConfig c;
      c.removal_fraction = 0.2;
      const auto tree = build_tree(records, c);
      const auto v = voting_stage(tree, c);
      REQUIRE(v.removed_ids.size() == 1);
      CHECK(v.removed_ids[0] == isolated_id);
      for (Slot s = 0; s < tree.size(); ++s) {
        if (tree.record(s).id == isolated_id) CHECK(v.votes[s] == 0);
      }
    }
  }
  SUBCASE("default ten percent on 1000 records") {
    testing::FixtureShape shape;
    shape.records = 1000;
    const auto records = testing::random_listings(8, shape);
    IndexConfig c;
    const auto tree = build_tree(records, c);
    const auto v = voting_stage(tree, c);
    CHECK(v.removed_ids.size() == 100);
    CHECK(v.survivors.size() == 900);
    std::size_t total = 0;
    for (auto n : v.votes) total += n;
    CHECK(total == 1000);
  }
  SUBCASE("k votes go to distinct neighbours") {
    const auto records = testing::random_listings(12, {});
    IndexConfig c;
    c.votes_per_record = 3;
    const auto v = voting_stage(build_tree(records, c), c);
    std::size_t total = 0;
    for (auto n : v.votes) total += n;
    CHECK(total == 3 * records.size());
  }
  SUBCASE("fewer than two records") {
    IndexConfig c;
    const auto tree = build_tree(std::vector<ListingRecord>{listing(1, m, 100000, 53, -6)}, c);
    try {
      (void)voting_stage(tree, c);
      FAIL("single record voted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::VotingUndefined);
    }
  }
}

TEST_CASE("build_ratio_matrix") {
  SUBCASE("constant prices per month give exact price ratios") {
    const std::int64_t prices[] = {200000, 250000, 180000, 300000};
    std::vector<ListingRecord> records;
    std::uint64_t id = 1;
    for (int month = 0; month < 4; ++month) {
      for (int i = 0; i < 10; ++i) {
        records.push_back(listing(id++, MonthKey(2020, month + 1), prices[month],
                                  53.3 + 0.001 * i, -6.2 - 0.002 * month));
      }
    }
    const auto c = no_voting();
    const auto matrix = build_ratio_matrix(build_tree(records, c), c);
    for (std::size_t b = 1; b < 4; ++b) {
      for (std::size_t x = 0; x < b; ++x) {
        REQUIRE(matrix.at(b, x));
        CHECK(matrix.at(b, x)->median ==
              static_cast<double>(prices[b]) / static_cast<double>(prices[x]));
        CHECK(matrix.at(b, x)->support == 10);
      }
    }
  }
  SUBCASE("ten percent growth, one listing a month") {
    std::vector<ListingRecord> records = {listing(1, MonthKey(2020, 1), 100000, 53.3, -6.2),
                                          listing(2, MonthKey(2020, 2), 110000, 53.3, -6.2),
                                          listing(3, MonthKey(2020, 3), 121000, 53.3, -6.2)};
    const auto c = no_voting();
    const auto matrix = build_ratio_matrix(build_tree(records, c), c);
    CHECK(matrix.at(1, 0)->median == doctest::Approx(1.10).epsilon(1e-15));
    CHECK(matrix.at(2, 0)->median == doctest::Approx(1.21).epsilon(1e-15));
    CHECK(matrix.at(2, 1)->median == doctest::Approx(1.10).epsilon(1e-15));

    const auto series = chain_index(matrix, c);
    CHECK(series.values[0] == 100.0);
    CHECK(series.values[1] == doctest::Approx(110.0).epsilon(1e-12));
    CHECK(series.values[2] == doctest::Approx(121.0).epsilon(1e-12));
    CHECK(series.diffs[1] == doctest::Approx(11.0).epsilon(1e-12));
  }
  SUBCASE("matches the linear-scan oracle on 200 records") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto records = testing::random_listings(seed, {});
      auto c = no_voting();
      c.scb_min_population = 1 + seed % 3;
      const auto matrix = build_ratio_matrix(build_tree(records, c), c);
      const auto want = oracle::ratios_and_chain(records, options_of(c));
      for (std::size_t b = 1; b < want.months.size(); ++b) {
        for (std::size_t x = 0; x < b; ++x) {
          REQUIRE(matrix.at(b, x).has_value() == want.ratio[b][x].has_value());
          if (matrix.at(b, x)) REQUIRE(matrix.at(b, x)->median == *want.ratio[b][x]);
        }
      }
    }
  }
  SUBCASE("threads do not change the result") {
    testing::FixtureShape shape;
    shape.records = 800;
    shape.months = 10;
    const auto records = testing::random_listings(31, shape);
    auto c = no_voting();
    const auto one = build_ratio_matrix(build_tree(records, c), c);
    c.threads = 4;
    const auto four = build_ratio_matrix(build_tree(records, c), c);
    std::ostringstream a, b;
    one.write_csv(a);
    four.write_csv(b);
    CHECK(a.str() == b.str());
  }
}

TEST_CASE("chain_index") {
  SUBCASE("fewer than two months") {
    RatioMatrix m({MonthKey(2020, 1)});
    try {
      (void)chain_index(m, {});
      FAIL("one month chained");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ChainUndefined);
    }
  }
  SUBCASE("hand-built matrix") {
    RatioMatrix m({MonthKey(2020, 1), MonthKey(2020, 2), MonthKey(2020, 3), MonthKey(2020, 4),
                   MonthKey(2020, 5)});
    m.set(1, 0, {1.02, 5});
    m.set(2, 0, {1.05, 5});
    m.set(2, 1, {1.01, 5});
    m.set(3, 0, {1.06, 5});
    m.set(3, 1, {1.04, 5});
    m.set(3, 2, {1.00, 5});
    m.set(4, 0, {1.10, 5});
    m.set(4, 1, {1.06, 5});
    m.set(4, 2, {1.02, 5});
    IndexConfig c;
    c.min_ratios_for_chain = 2;
    const auto s = chain_index(m, c);
    CHECK(s.values[1] == doctest::Approx(102.0));
    CHECK(s.values[2] == doctest::Approx(105.0));              // 1.05 - 1.02
    CHECK(s.values[3] == doctest::Approx(105.0 + 100 * 0.02));  // mean(0.01, 0.03)
    // Month 5: only r_5(m_1), r_5(m_2), r_5(m_3) against r_4(.) -> mean(0.04, 0.02, 0.02)
    CHECK(s.values[4] == doctest::Approx(107.0 + 100 * (0.08 / 3)));
    CHECK(std::none_of(s.flagged.begin(), s.flagged.end(), [](bool f) { return f; }));
    CHECK(s.diffs.size() == 4);

    c.min_ratios_for_chain = 4;  // month 5 has 3 shared months, needs min(4, 3) = 3
    CHECK_FALSE(chain_index(m, c).flagged[4]);

    c.chain_mode = ChainMode::Geometric;
    const auto g = chain_index(m, c);
    CHECK(g.values[1] == doctest::Approx(102.0));
    CHECK(g.values[2] == doctest::Approx(102.0 * 1.05 / 1.02));
  }
  SUBCASE("missing shared history flags the month") {
    RatioMatrix m({MonthKey(2020, 1), MonthKey(2020, 2), MonthKey(2020, 3)});
    m.set(2, 0, {1.3, 2});
    const auto s = chain_index(m, {});
    CHECK(s.flagged == std::vector<bool>{false, true, true});
    CHECK(s.values == std::vector<double>{100, 100, 100});
  }
}

TEST_CASE("compute_index") {
  SUBCASE("constant prices give a flat index") {
    std::vector<ListingRecord> records;
    std::uint64_t id = 1;
    for (int month = 1; month <= 6; ++month) {
      for (int i = 0; i < 20; ++i) {
        records.push_back(listing(id++, MonthKey(2021, month), 250000, 53.3 + 0.002 * (i % 5),
                                  -6.2 + 0.003 * (i / 5)));
      }
    }
    const auto run = compute_index(records, IndexConfig{});
    for (double v : run.series.values) CHECK(v == 100.0);
    CHECK(run.voting_removed == 12);
  }

  SUBCASE("empty month in the middle is flagged and the chain continues") {
    std::vector<ListingRecord> records;
    std::uint64_t id = 1;
    for (int month : {1, 2, 3, 5, 6}) {
      for (int i = 0; i < 10; ++i) {
        records.push_back(listing(id++, MonthKey(2021, month), 200000 + 5000 * month,
                                  53.3 + 0.001 * i, -6.2));
      }
    }
    const auto run = compute_index(records, no_voting());
    REQUIRE(run.series.months.size() == 6);
    CHECK(run.series.flagged[3]);
    CHECK(run.series.values[3] == run.series.values[2]);
    CHECK(run.series.values[5] != run.series.values[4]);
  }

  SUBCASE("duplicate ids are rejected") {
    std::vector<ListingRecord> records = {listing(1, MonthKey(2020, 1), 1e5, 53, -6),
                                          listing(1, MonthKey(2020, 2), 1e5, 53, -6)};
    CHECK_THROWS_AS(compute_index(records, IndexConfig{}), Error);
  }

  SUBCASE("separated bedroom groups match independent per-group runs") {
    // 3-bed listings to the west, 4-bed to the east: never in a shared bucket below depth 1.
    testing::FixtureShape shape;
    shape.records = 300;
    auto west = testing::random_listings(41, shape);
    auto east = testing::random_listings(42, shape);
    for (auto& r : west) r.bedrooms = 3, r.point = GeoPoint(r.point.lat(), r.point.lng() - 2.0);
    for (auto& r : east) r.bedrooms = 4, r.id += 2'000'000, r.point = GeoPoint(r.point.lat(), r.point.lng() + 2.0);
    std::vector<ListingRecord> all = west;
    all.insert(all.end(), east.begin(), east.end());

    auto c = no_voting();
    c.factor_bedrooms = true;
    const auto combined = build_ratio_matrix(build_tree(all, c), c);

    auto plain = no_voting();
    std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> ratios;
    for (const auto* group : {&west, &east}) {
      const auto tree = build_tree(*group, plain);
      const auto months = month_range(all);
      for (Slot s = 0; s < tree.size(); ++s) {
        const auto& r = tree.record(s);
        const auto b = static_cast<std::size_t>(r.month.ordinal() - months.front().ordinal());
        for (std::size_t x = 0; x < b; ++x) {
          const auto n = tree.nearest_in_month({tree.key(s), r.point}, months[x], 1);
          if (n) ratios[{b, x}].push_back(static_cast<double>(r.price) /
                                          static_cast<double>(tree.record(*n).price));
        }
      }
    }
    for (std::size_t b = 1; b < combined.size(); ++b) {
      for (std::size_t x = 0; x < b; ++x) {
        const auto it = ratios.find({b, x});
        REQUIRE(combined.at(b, x).has_value() == (it != ratios.end()));
        if (it != ratios.end()) CHECK(combined.at(b, x)->median == median_of(it->second));
      }
    }
  }

  SUBCASE("deterministic and scale equivariant") {
    testing::FixtureShape shape;
    shape.records = 400;
    const auto records = testing::random_listings(77, shape);
    const auto a = compute_index(records, IndexConfig{});
    const auto b = compute_index(records, IndexConfig{});
    CHECK(a.series.values == b.series.values);

    auto scaled = records;
    for (auto& r : scaled) r.price *= 3;
    CHECK(compute_index(scaled, IndexConfig{}).series.values == a.series.values);

    auto shifted = records;
    for (auto& r : shifted) r.month = MonthKey::from_ordinal(r.month.ordinal() + 17);
    const auto s = compute_index(shifted, IndexConfig{});
    CHECK(s.series.values == a.series.values);
    CHECK(s.series.months.front() == MonthKey::from_ordinal(a.series.months.front().ordinal() + 17));
  }

  SUBCASE("matches the brute-force pipeline") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      testing::FixtureShape shape;
      shape.records = 150 + 30 * seed;
      const auto records = testing::random_listings(seed * 13, shape);
      IndexConfig c;
      c.factor_bedrooms = seed % 2 == 0;
      c.votes_per_record = seed;
      c.scb_min_population = 1 + seed % 2;
      c.chain_mode = seed == 3 ? ChainMode::Geometric : ChainMode::Additive;
      require_same(compute_index(records, c), oracle::full_pipeline(records, options_of(c)));
    }
  }

  SUBCASE("raw overload carries the filtration report") {
    std::vector<RawListing> raw;
    for (const auto& r : testing::random_listings(5, {})) raw.push_back(to_raw(r));
    raw[0].price.reset();
    const auto run = compute_index(raw, IndexConfig{});
    CHECK(run.report.total == raw.size());
    CHECK(run.report.missing_price == 1);
  }
}

TEST_CASE("bedroom factoring smooths a mix-shift market") {
  const auto data = generate(mix_shift_config(1));
  IndexConfig plain, factored;
  factored.factor_bedrooms = true;
  const auto a = compute_metrics(compute_index(data.records, plain).series.values);
  const auto b = compute_metrics(compute_index(data.records, factored).series.values);
  CHECK(b.msm < a.msm);
  CHECK(b.std_dev_diffs < a.std_dev_diffs);
}

TEST_CASE("series csv round trip") {
  IndexSeries s;
  s.months = {MonthKey(2020, 1), MonthKey(2020, 2), MonthKey(2020, 3)};
  s.values = {100.0, 101.25, 99.0 + 1.0 / 3.0};
  s.flagged = {false, true, false};
  s.diffs = {1.25, s.values[2] - 101.25};
  std::stringstream ss;
  s.write_csv(ss);
  const auto back = IndexSeries::read_csv(ss);
  CHECK(back.months == s.months);
  CHECK(back.values == s.values);
  CHECK(back.flagged == s.flagged);

  std::istringstream bad("month,value\n2020-02,1\n2020-01,2\n");
  CHECK_THROWS_AS(IndexSeries::read_csv(bad), Error);
}
