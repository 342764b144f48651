// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "geohpi/error.hpp"
#include "geohpi/metrics.hpp"

using namespace geohpi;

TEST_CASE("std_dev") {
  CHECK(std_dev(std::vector<double>{5, 5, 5, 5}) == 0.0);
  CHECK(std_dev(std::vector<double>{0, 0, 0, 4}) == doctest::Approx(std::sqrt(3.0)));
  CHECK(std_dev(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9}) == 2.0);
  CHECK(std_dev(std::vector<double>{0, 0, 0, 4}, Deviation::Sample) == doctest::Approx(2.0));
  CHECK_THROWS_AS(std_dev(std::vector<double>{1}), Error);
}

TEST_CASE("std_dev_differences") {
  CHECK(std_dev_differences(std::vector<double>{1, 3, 5, 7, 9}) == 0.0);
  CHECK(std_dev_differences(std::vector<double>{0, 1, 0, 1}) ==
        doctest::Approx(std::sqrt(8.0 / 9.0)));
  CHECK(std_dev_differences(std::vector<double>{2, 2, 2}) == 0.0);
  try {
    (void)std_dev_differences(std::vector<double>{1, 2});
    FAIL("two values accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UndefinedMetric);
  }
}

TEST_CASE("mean_spike_magnitude") {
  auto monotone = mean_spike_magnitude(std::vector<double>{1, 2, 4, 8, 9});
  CHECK(monotone.msm == 0.0);
  CHECK(monotone.spike_count == 0);

  auto alternating = mean_spike_magnitude(std::vector<double>{0, 1, 0, 1});
  CHECK(alternating.msm == 4.0);
  CHECK(alternating.spike_count == 2);

  auto uneven = mean_spike_magnitude(std::vector<double>{0, 2, 1, 3});
  CHECK(uneven.msm == 9.0);
  CHECK(uneven.spike_count == 2);

  SUBCASE("zero differences carry no sign") {
    auto flat_step = mean_spike_magnitude(std::vector<double>{0, 1, 1, 0, 0, 2});
    CHECK(flat_step.spike_count == 0);
    CHECK(flat_step.msm == 0.0);
  }
  CHECK_THROWS_AS(mean_spike_magnitude(std::vector<double>{1, 2}), Error);
}

TEST_CASE("metric invariances under translation and scaling") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(20);
    for (auto& v : s) v = 100 + 3 * g(rng);
    const auto base = compute_metrics(s);
    const double shift = 17.5, scale = -2.5;
    std::vector<double> shifted = s, scaled = s;
    for (auto& v : shifted) v += shift;
    for (auto& v : scaled) v *= scale;
    const auto t = compute_metrics(shifted);
    CHECK(t.std_dev == doctest::Approx(base.std_dev));
    CHECK(t.std_dev_diffs == doctest::Approx(base.std_dev_diffs));
    CHECK(t.msm == doctest::Approx(base.msm));
    CHECK(t.spike_count == base.spike_count);
    const auto c = compute_metrics(scaled);
    CHECK(c.std_dev == doctest::Approx(base.std_dev * 2.5));
    CHECK(c.std_dev_diffs == doctest::Approx(base.std_dev_diffs * 2.5));
    CHECK(c.msm == doctest::Approx(base.msm * 6.25));
    CHECK(base.std_dev >= 0);
    if (base.spike_count == 0) CHECK(base.msm == 0.0);
  }
}
