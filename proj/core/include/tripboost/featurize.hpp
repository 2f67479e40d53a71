#pragma once

#include <array>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tripboost/matrix.hpp"
#include "tripboost/trip_data.hpp"

namespace tripboost {

enum class TargetKind { Duration, Delay };

const char* to_string(TargetKind t);
/// Accepts "duration" or "delay"; throws ConfigError otherwise.
TargetKind parse_target_kind(std::string_view text);

/// Model input features in their fixed column order.
inline constexpr std::array<const char*, 9> kFeatureNames = {
    "num_cities", "num_stops", "month", "week_number", "day_of_month",
    "day_type",   "hour",      "minute", "scheduled_duration",
};
inline constexpr std::size_t kNumFeatures = kFeatureNames.size();
/// Column of `day_type` within the model input (one-hot expanded by linear models).
inline constexpr std::size_t kDayTypeColumn = 5;

/// One trip as a learning example. trip_id and start_time are carried for
/// traceability and fold assignment; they never enter the model input.
struct FeatureRow {
  std::string trip_id;
  Timestamp start_time{};
  int num_cities = 0;
  int num_stops = 0;
  int month = 1;         // 1..12
  int week_number = 1;   // ISO, 1..53
  int day_of_month = 1;  // 1..31
  int day_type = 0;      // Monday = 0 .. Sunday = 6
  int hour = 0;          // 0..23
  int minute = 0;        // 0..59
  double scheduled_duration = 0.0;  // seconds
  double target = 0.0;              // seconds

  std::array<double, kNumFeatures> features() const;
  bool operator==(const FeatureRow&) const = default;
};

/// Temporal fields come from the first scheduled stop.
FeatureRow featurize_trip(const Trip& trip, TargetKind target);

struct FeatureTable {
  TargetKind target = TargetKind::Duration;
  std::vector<FeatureRow> rows;  // ascending (start_time, trip_id)

  std::size_t size() const { return rows.size(); }
  Matrix features() const;
  std::vector<double> targets() const;
  /// Rows [first, last) as a model input matrix.
  Matrix features(std::size_t first, std::size_t last) const;
  std::vector<double> targets(std::size_t first, std::size_t last) const;
};

/// Throws DataError on empty input.
FeatureTable build_table(const std::vector<Trip>& trips, TargetKind target);

/// Header: trip_id,start_time,<features...>,target
void write_feature_csv(std::ostream& out, const FeatureTable& table);

}  // namespace tripboost
