#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <vector>

#include "tripboost/kv_config.hpp"
#include "tripboost/trip_data.hpp"

namespace tripboost {

/// Generator settings. Defaults reproduce the published dataset statistics:
/// 6 +/- 3 stops, 5 +/- 3 cities, 4.55 +/- 4.19 h duration, 0.71 +/- 7.26 h
/// delay, and per-day trip counts of 1084.57 +/- 237.42 (weekday),
/// 198.23 +/- 23.54 (Saturday), 48.88 +/- 14.98 (Sunday).
struct GenConfig {
  struct Normal {
    double mean = 0.0;
    double std = 0.0;
  };

  std::vector<std::chrono::year_month> months = default_months();
  std::map<DayType, Normal> trips_per_daytype = {
      {DayType::Weekday, {1084.57, 237.42}},
      {DayType::Saturday, {198.23, 23.54}},
      {DayType::Sunday, {48.88, 14.98}},
  };

  Normal stops{6.0, 3.0};
  int stops_min = 2;

  Normal cities{5.0, 3.0};
  int cities_min = 1;
  /// Correlation between the latent stop-count and city-count draws.
  double cities_stops_correlation = 0.9;

  Normal duration_hours{4.55, 4.19};  // actual duration, lognormal moment-matched
  double duration_min_hours = 0.05;

  Normal delay_hours{0.71, 7.26};  // marginal target of the delay normal
  /// Correlation between the delay normal and the latent log-duration normal.
  double delay_duration_correlation = 0.95;

  Normal start_hour{7.5, 2.0};  // clock time of the first scheduled stop
  int city_pool_size = 400;

  std::uint64_t seed = 42;

  static std::vector<std::chrono::year_month> default_months();

  /// Throws ConfigError on any invariant violation (e.g. empty month list).
  void validate() const;

  /// Applies recognised keys; unknown keys raise ConfigError.
  static GenConfig from_kv(const KeyValueConfig& kv);
};

/// Delay normal location that makes the realised mean delay equal
/// `delay_hours.mean` after the cap delay <= actual duration (scheduled
/// duration cannot be negative). Computed by deterministic quadrature.
double calibrated_delay_location(const GenConfig& cfg);

/// Emits stop records in canonical order (trip_number, stop_number).
/// Each calendar day draws from its own substream keyed by the date, so the
/// output for a fixed seed is independent of generation order.
std::vector<StopRecord> generate(const GenConfig& cfg);

}  // namespace tripboost
