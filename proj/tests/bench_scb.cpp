// SPDX-License-Identifier: Apache-2.0

// Prints scb_query latency as the record count grows.

#include <cstdio>

#include "scb_latency.hpp"

int main() {
  std::printf("%10s %10s %12s %10s\n", "records", "queries", "mean_ns", "depth");
  for (std::size_t n : {1'000u, 10'000u, 100'000u, 1'000'000u}) {
    const auto s = geohpi::bench::measure_scb_latency(n, 10'000, 10);
    std::printf("%10zu %10zu %12.1f %10.2f\n", s.records, s.queries, s.mean_ns, s.mean_depth);
  }
}
