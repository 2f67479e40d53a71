#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "tripboost/civil_time.hpp"

namespace tripboost {

/// One row of the raw delivery log.
struct StopRecord {
  std::string trip_number;
  std::string trip_description;
  int stop_number = 1;  // >= 1, ordinal within the trip
  std::string client_name;
  std::string address;
  std::string city;
  Timestamp scheduled_time{};
  Timestamp actual_time{};

  bool operator==(const StopRecord&) const = default;
};

/// CSV column names for each StopRecord field. Defaults are the canonical
/// header; any name can be remapped.
struct StopSchema {
  std::string trip_number = "trip_number";
  std::string trip_description = "trip_description";
  std::string stop_number = "stop_number";
  std::string client_name = "client_name";
  std::string address = "address";
  std::string city = "city";
  std::string scheduled_time = "scheduled_time";
  std::string actual_time = "actual_time";
};

struct RowDiagnostic {
  std::size_t line = 0;  // 1-based physical line in the source file
  std::string reason;
};

struct ParseResult {
  std::vector<StopRecord> records;
  std::vector<RowDiagnostic> rejected;
};

/// Reads a stops CSV. Mandatory columns are trip_number, stop_number, city,
/// scheduled_time and actual_time; the free-text columns may be absent.
/// Rows that fail validation are rejected with a diagnostic, never coerced.
/// Throws DataError for a missing file, missing mandatory column or when no
/// row survives.
ParseResult parse_stops_csv(const std::filesystem::path& path, const StopSchema& schema = {});
ParseResult parse_stops_csv(std::istream& in, const StopSchema& schema = {});

extern const std::array<const char*, 8> kCanonicalStopHeader;

void write_stops_csv(std::ostream& out, const std::vector<StopRecord>& records);

struct Trip {
  std::string trip_id;
  std::vector<StopRecord> stops;  // strictly ascending stop_number
  std::size_t num_stops = 0;
  std::size_t num_cities = 0;
  Seconds actual_duration{0};
  Seconds scheduled_duration{0};
  Seconds delay{0};  // actual_duration - scheduled_duration; may be negative
  Timestamp start_time{};  // scheduled time of the first stop

  bool operator==(const Trip&) const = default;
};

struct TripDiagnostic {
  std::string trip_id;
  std::string reason;
};

struct AssembleResult {
  std::vector<Trip> trips;  // ascending trip_id
  std::vector<TripDiagnostic> excluded;
};

/// Groups stop records into trips. Trips with a duplicated stop number,
/// fewer than two stops, or a negative actual duration are excluded and
/// reported. The result does not depend on the order of `records`.
AssembleResult assemble_trips(const std::vector<StopRecord>& records);

/// Flattens trips back into stop rows (trip order, then stop order).
std::vector<StopRecord> trips_to_stops(const std::vector<Trip>& trips);

enum class DayType { Weekday = 0, Saturday = 1, Sunday = 2 };

const char* to_string(DayType t);
DayType day_type_of(std::chrono::sys_days d);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

struct DayTypeStats {
  std::size_t days = 0;  // calendar days of this type that have trips
  double mean = 0.0;
  double std = 0.0;
};

/// Aggregate statistics over a trip list. Per-day and per-month counts are
/// taken over the days / months that contain at least one trip start.
/// Standard deviations use the sample (n - 1) convention; a single
/// observation reports std 0.
struct DatasetSummary {
  static constexpr const char* kStdConvention = "sample (n-1)";

  std::size_t total_trips = 0;
  MeanStd trips_per_day;
  MeanStd trips_per_month;
  MeanStd stops_per_trip;
  MeanStd cities_per_trip;
  MeanStd duration_hours;
  MeanStd delay_hours;
  std::map<DayType, DayTypeStats> trips_per_daytype;  // always has all three keys
};

/// Throws DataError on empty input.
DatasetSummary summarize(const std::vector<Trip>& trips);

void print_summary(std::ostream& out, const DatasetSummary& s);

/// Sample mean and (n - 1) standard deviation.
MeanStd mean_std(const std::vector<double>& values);

}  // namespace tripboost
