// SPDX-License-Identifier: Apache-2.0

#include "geohpi/metrics.hpp"

#include <cmath>

#include <json.hpp>

#include "geohpi/error.hpp"

namespace geohpi {

namespace {

void require_length(std::span<const double> series, std::size_t n, const char* metric) {
  if (series.size() < n) {
    throw Error(ErrorCode::UndefinedMetric, std::string(metric) + " needs at least " +
                                                std::to_string(n) + " values, got " +
                                                std::to_string(series.size()));
  }
}

int sign(double v) { return (v > 0) - (v < 0); }

}  // namespace

std::vector<double> first_differences(std::span<const double> series) {
  std::vector<double> diffs;
  if (series.size() < 2) return diffs;
  diffs.reserve(series.size() - 1);
  for (std::size_t i = 0; i + 1 < series.size(); ++i) diffs.push_back(series[i + 1] - series[i]);
  return diffs;
}

double std_dev(std::span<const double> series, Deviation kind) {
  require_length(series, 2, "std_dev");
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(series.size());
  double ss = 0.0;
  for (double v : series) ss += (v - mean) * (v - mean);
  const auto n = static_cast<double>(series.size());
  return std::sqrt(ss / (kind == Deviation::Population ? n : n - 1));
}

double std_dev_differences(std::span<const double> series, Deviation kind) {
  require_length(series, 3, "std_dev_differences");
  return std_dev(first_differences(series), kind);
}

SpikeSummary mean_spike_magnitude(std::span<const double> series) {
  require_length(series, 3, "mean_spike_magnitude");
  const auto d = first_differences(series);
  SpikeSummary out;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i + 1 < d.size(); ++i) {
    if (sign(d[i]) * sign(d[i + 1]) < 0) {
      const double s = std::abs(d[i + 1] - d[i]);
      sum_sq += s * s;
      ++out.spike_count;
    }
  }
  if (out.spike_count > 0) out.msm = sum_sq / static_cast<double>(out.spike_count);
  return out;
}

SeriesMetrics compute_metrics(std::span<const double> series, Deviation kind) {
  SeriesMetrics m;
  m.std_dev = std_dev(series, kind);
  m.std_dev_diffs = std_dev_differences(series, kind);
  const auto spikes = mean_spike_magnitude(series);
  m.msm = spikes.msm;
  m.spike_count = spikes.spike_count;
  return m;
}

std::string SeriesMetrics::to_json() const {
  nlohmann::ordered_json j;
  j["std_dev"] = std_dev;
  j["std_dev_diffs"] = std_dev_diffs;
  j["msm"] = msm;
  j["spike_count"] = spike_count;
  return j.dump(2);
}

}  // namespace geohpi
