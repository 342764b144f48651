// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "geohpi/listing.hpp"

namespace geohpi::cli {

struct ChartSeries {
  std::string name;
  std::vector<double> values;  // one per month
};

/// Monthly line chart with axis labels and a legend.
void write_svg_chart(std::ostream& out, const std::vector<MonthKey>& months,
                     const std::vector<ChartSeries>& series);

}  // namespace geohpi::cli
