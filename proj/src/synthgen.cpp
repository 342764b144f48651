// SPDX-License-Identifier: Apache-2.0

#include "geohpi/synthgen.hpp"

#include <cmath>
#include <algorithm>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>

#include "geohpi/csv.hpp"
#include "geohpi/error.hpp"

namespace geohpi {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (spare_) {
      const double z = *spare_;
      spare_.reset();
      return z;
    }
    double u1;
    do u1 = uniform(); while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

void invalid(const std::string& message) { throw Error(ErrorCode::InvalidArgument, message); }

constexpr double kMetersPerDegree = kEarthRadiusMeters * std::numbers::pi / 180.0;

}  // namespace

void SynthConfig::validate() const {
  if (months < 2) invalid("synthetic data needs at least 2 months");
  if (records_per_month < 1) invalid("records_per_month must be at least 1");
  if (!(drift > -1.0)) invalid("drift must exceed -1");
  if (!(noise >= 0.0)) invalid("noise must be non-negative");
  if (bedroom_mix.empty()) invalid("bedroom mix needs at least one row");
  for (std::size_t r = 0; r < bedroom_mix.size(); ++r) {
    double sum = 0.0;
    for (double p : bedroom_mix[r]) {
      if (!(p >= 0.0)) invalid("bedroom mix row " + std::to_string(r) + " has a negative entry");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      invalid("bedroom mix row " + std::to_string(r) + " sums to " + std::to_string(sum) +
              ", expected 1");
    }
  }
  for (double p : bedroom_premium) {
    if (!(p > 0.0)) invalid("bedroom premiums must be positive");
  }
  if (cluster_count < 1) invalid("cluster_count must be at least 1");
  if (!(cluster_radius_m >= 0.0)) invalid("cluster_radius_m must be non-negative");
  if (!(base_price > 0.0)) invalid("base_price must be positive");
  if (!GeoPoint::valid(center_lat, center_lng)) invalid("region centre out of range");
  if (!(region_radius_deg >= 0.0)) invalid("region_radius_deg must be non-negative");
}

SynthConfig mix_shift_config(std::uint64_t seed) {
  SynthConfig c;
  c.months = 24;
  c.records_per_month = 400;
  c.drift = 0.005;
  c.noise = 0.05;
  c.bedroom_mix = {{0.0, 0.05, 0.75, 0.15, 0.05, 0.0}, {0.0, 0.05, 0.15, 0.75, 0.05, 0.0}};
  c.bedroom_premium = {0.70, 0.85, 1.00, 1.35, 1.60, 1.80};
  c.cluster_count = 20;
  c.seed = seed;
  return c;
}

SynthDataset generate(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);

  std::vector<GeoPoint> centres;
  centres.reserve(config.cluster_count);
  for (std::size_t c = 0; c < config.cluster_count; ++c) {
    const double lat = config.center_lat + (2 * rng.uniform() - 1) * config.region_radius_deg;
    const double lng = config.center_lng + (2 * rng.uniform() - 1) * config.region_radius_deg;
    centres.emplace_back(std::clamp(lat, -89.0, 89.0), std::clamp(lng, -180.0, 180.0));
  }

  SynthDataset out;
  out.records.reserve(config.months * config.records_per_month);
  std::uint64_t next_id = 1;
  MonthKey month = config.start_month;
  for (std::size_t m = 0; m < config.months; ++m, month = month.next()) {
    const double level = std::pow(1.0 + config.drift, static_cast<double>(m));
    out.truth.push_back({month, 100.0 * level});
    const auto& mix = config.bedroom_mix[m % config.bedroom_mix.size()];

    for (std::size_t i = 0; i < config.records_per_month; ++i) {
      const auto& centre = centres[static_cast<std::size_t>(
          rng.uniform() * static_cast<double>(config.cluster_count))];
      const double dn = rng.normal() * config.cluster_radius_m;
      const double de = rng.normal() * config.cluster_radius_m;
      const double lat = std::clamp(centre.lat() + dn / kMetersPerDegree, -90.0, 90.0);
      const double cos_lat = std::max(std::cos(lat * std::numbers::pi / 180.0), 1e-6);
      const double lng =
          std::clamp(centre.lng() + de / (kMetersPerDegree * cos_lat), -180.0, 180.0);

      const double u = rng.uniform();
      int bedrooms = kMaxBedrooms;
      double cumulative = 0.0;
      for (int b = 0; b < kMaxBedrooms; ++b) {
        cumulative += mix[static_cast<std::size_t>(b)];
        if (u < cumulative) {
          bedrooms = b + 1;
          break;
        }
      }
      while (mix[static_cast<std::size_t>(bedrooms - 1)] == 0.0 && bedrooms > 1) --bedrooms;

      const double z = rng.normal();
      const double price = config.base_price * level *
                           config.bedroom_premium[static_cast<std::size_t>(bedrooms - 1)] *
                           std::exp(config.noise * z);
      const int day = 1 + static_cast<int>(rng.uniform() * 28.0);

      ListingRecord r;
      r.id = next_id++;
      r.list_date = CalendarDate{month.year(), month.month(), day};
      r.month = month;
      r.price = std::llround(price);
      r.point = GeoPoint(lat, lng);
      r.bedrooms = bedrooms;
      out.records.push_back(std::move(r));
    }
  }
  return out;
}

void write_truth_csv(std::ostream& out, const std::vector<TruthPoint>& truth) {
  out << "month,true_level\n";
  for (const auto& t : truth) out << t.month.str() << ',' << csv::format_double(t.level) << '\n';
}

}  // namespace geohpi
