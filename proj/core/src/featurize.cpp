#include "tripboost/featurize.hpp"

#include <algorithm>

#include "tripboost/csv.hpp"
#include "tripboost/errors.hpp"

namespace tripboost {

const char* to_string(TargetKind t) {
  return t == TargetKind::Duration ? "duration" : "delay";
}

TargetKind parse_target_kind(std::string_view text) {
  if (text == "duration") return TargetKind::Duration;
  if (text == "delay") return TargetKind::Delay;
  throw ConfigError("unknown target '" + std::string(text) + "' (expected duration|delay)");
}

std::array<double, kNumFeatures> FeatureRow::features() const {
  return {static_cast<double>(num_cities),   static_cast<double>(num_stops),
          static_cast<double>(month),        static_cast<double>(week_number),
          static_cast<double>(day_of_month), static_cast<double>(day_type),
          static_cast<double>(hour),         static_cast<double>(minute),
          scheduled_duration};
}

FeatureRow featurize_trip(const Trip& trip, TargetKind target) {
  const auto f = civil_fields(trip.start_time);
  FeatureRow row;
  row.trip_id = trip.trip_id;
  row.start_time = trip.start_time;
  row.num_cities = static_cast<int>(trip.num_cities);
  row.num_stops = static_cast<int>(trip.num_stops);
  row.month = static_cast<int>(f.month);
  row.week_number = static_cast<int>(f.iso_week);
  row.day_of_month = static_cast<int>(f.day);
  row.day_type = static_cast<int>(f.day_of_week);
  row.hour = static_cast<int>(f.hour);
  row.minute = static_cast<int>(f.minute);
  row.scheduled_duration = static_cast<double>(trip.scheduled_duration.count());
  row.target = static_cast<double>(
      (target == TargetKind::Duration ? trip.actual_duration : trip.delay).count());
  return row;
}

FeatureTable build_table(const std::vector<Trip>& trips, TargetKind target) {
  if (trips.empty()) throw DataError("cannot build a feature table from zero trips");
  FeatureTable table;
  table.target = target;
  table.rows.reserve(trips.size());
  for (const auto& t : trips) table.rows.push_back(featurize_trip(t, target));
  std::sort(table.rows.begin(), table.rows.end(), [](const FeatureRow& a, const FeatureRow& b) {
    if (a.start_time != b.start_time) return a.start_time < b.start_time;
    return a.trip_id < b.trip_id;
  });
  return table;
}

Matrix FeatureTable::features() const { return features(0, rows.size()); }

std::vector<double> FeatureTable::targets() const { return targets(0, rows.size()); }

Matrix FeatureTable::features(std::size_t first, std::size_t last) const {
  Matrix m(last - first, kNumFeatures);
  for (std::size_t i = first; i < last; ++i) {
    const auto f = rows[i].features();
    std::copy(f.begin(), f.end(), m.row(i - first).begin());
  }
  return m;
}

std::vector<double> FeatureTable::targets(std::size_t first, std::size_t last) const {
  std::vector<double> y;
  y.reserve(last - first);
  for (std::size_t i = first; i < last; ++i) y.push_back(rows[i].target);
  return y;
}

void write_feature_csv(std::ostream& out, const FeatureTable& table) {
  std::vector<std::string> header{"trip_id", "start_time"};
  header.insert(header.end(), kFeatureNames.begin(), kFeatureNames.end());
  header.emplace_back("target");
  write_csv_row(out, header);
  for (const auto& r : table.rows) {
    std::vector<std::string> fields{r.trip_id, format_timestamp(r.start_time)};
    for (const double v : r.features()) fields.push_back(format_double(v));
    fields.push_back(format_double(r.target));
    write_csv_row(out, fields);
  }
}

}  // namespace tripboost
