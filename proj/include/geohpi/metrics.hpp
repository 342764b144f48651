// SPDX-License-Identifier: Apache-2.0

/**
 * \file metrics.hpp
 * \brief Smoothness measures for index series.
 *
 * With first differences d_i = x_{i+1} - x_i, an adjacent pair (d_i, d_{i+1})
 * of strictly opposite signs is a spike of magnitude |d_{i+1} - d_i|. The mean
 * spike magnitude (MSM) is the mean of the squared spike magnitudes. A zero
 * difference has no sign and never forms a spike.
 */

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace geohpi {

enum class Deviation { Population, Sample };

struct SpikeSummary {
  double msm = 0.0;
  std::size_t spike_count = 0;
};

struct SeriesMetrics {
  double std_dev = 0.0;
  double std_dev_diffs = 0.0;
  double msm = 0.0;
  std::size_t spike_count = 0;

  std::string to_json() const;
};

/// Requires at least 2 values (UndefinedMetric otherwise).
double std_dev(std::span<const double> series, Deviation kind = Deviation::Population);

/// Standard deviation of the first differences; requires at least 3 values.
double std_dev_differences(std::span<const double> series,
                           Deviation kind = Deviation::Population);

/// Requires at least 3 values.
SpikeSummary mean_spike_magnitude(std::span<const double> series);

/// All three measures; requires at least 3 values.
SeriesMetrics compute_metrics(std::span<const double> series,
                              Deviation kind = Deviation::Population);

std::vector<double> first_differences(std::span<const double> series);

}  // namespace geohpi
