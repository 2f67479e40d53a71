#include "tripboost/trip_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <unordered_map>

#include "tripboost/csv.hpp"
#include "tripboost/errors.hpp"

namespace tripboost {

const std::array<const char*, 8> kCanonicalStopHeader = {
    "trip_number", "trip_description", "stop_number",    "client_name",
    "address",     "city",             "scheduled_time", "actual_time",
};

namespace {

struct ColumnIndex {
  std::optional<std::size_t> trip_number, trip_description, stop_number, client_name, address,
      city, scheduled_time, actual_time;
};

std::optional<std::size_t> find_column(const std::vector<std::string>& header,
                                       const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

std::optional<int> parse_positive_int(const std::string& text) {
  int value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last || value < 1) return std::nullopt;
  return value;
}

}  // namespace

ParseResult parse_stops_csv(const std::filesystem::path& path, const StopSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open stops file: " + path.string());
  return parse_stops_csv(in, schema);
}

ParseResult parse_stops_csv(std::istream& in, const StopSchema& schema) {
  CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) throw DataError("stops file is empty (no header row)");
  // Tolerate a UTF-8 byte-order mark on the first column name.
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);

  ColumnIndex col;
  col.trip_number = find_column(header, schema.trip_number);
  col.trip_description = find_column(header, schema.trip_description);
  col.stop_number = find_column(header, schema.stop_number);
  col.client_name = find_column(header, schema.client_name);
  col.address = find_column(header, schema.address);
  col.city = find_column(header, schema.city);
  col.scheduled_time = find_column(header, schema.scheduled_time);
  col.actual_time = find_column(header, schema.actual_time);

  const std::pair<const std::optional<std::size_t>*, const std::string*> mandatory[] = {
      {&col.trip_number, &schema.trip_number},
      {&col.stop_number, &schema.stop_number},
      {&col.city, &schema.city},
      {&col.scheduled_time, &schema.scheduled_time},
      {&col.actual_time, &schema.actual_time},
  };
  for (const auto& [index, name] : mandatory) {
    if (!index->has_value()) throw DataError("missing mandatory column '" + *name + "'");
  }

  ParseResult result;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.empty() || (fields.size() == 1 && fields[0].empty())) continue;  // blank line
    const std::size_t line = reader.line_number();
    if (fields.size() != header.size()) {
      result.rejected.push_back({line, "expected " + std::to_string(header.size()) +
                                           " fields, found " + std::to_string(fields.size())});
      continue;
    }
    auto get = [&](const std::optional<std::size_t>& i) -> std::string {
      return i ? fields[*i] : std::string{};
    };

    StopRecord rec;
    rec.trip_number = get(col.trip_number);
    if (rec.trip_number.empty()) {
      result.rejected.push_back({line, "empty trip_number"});
      continue;
    }
    const auto stop = parse_positive_int(get(col.stop_number));
    if (!stop) {
      result.rejected.push_back({line, "stop_number is not a positive integer: '" +
                                           get(col.stop_number) + "'"});
      continue;
    }
    rec.stop_number = *stop;
    const auto sched = parse_timestamp(get(col.scheduled_time));
    if (!sched) {
      result.rejected.push_back(
          {line, "unparseable scheduled_time: '" + get(col.scheduled_time) + "'"});
      continue;
    }
    const auto actual = parse_timestamp(get(col.actual_time));
    if (!actual) {
      result.rejected.push_back({line, "unparseable actual_time: '" + get(col.actual_time) + "'"});
      continue;
    }
    rec.scheduled_time = *sched;
    rec.actual_time = *actual;
    rec.trip_description = get(col.trip_description);
    rec.client_name = get(col.client_name);
    rec.address = get(col.address);
    rec.city = get(col.city);
    result.records.push_back(std::move(rec));
  }
  if (result.records.empty()) throw DataError("stops file contains no valid rows");
  return result;
}

void write_stops_csv(std::ostream& out, const std::vector<StopRecord>& records) {
  write_csv_row(out, std::vector<std::string>(kCanonicalStopHeader.begin(),
                                              kCanonicalStopHeader.end()));
  for (const auto& r : records) {
    write_csv_row(out, {r.trip_number, r.trip_description, std::to_string(r.stop_number),
                        r.client_name, r.address, r.city, format_timestamp(r.scheduled_time),
                        format_timestamp(r.actual_time)});
  }
}

AssembleResult assemble_trips(const std::vector<StopRecord>& records) {
  std::map<std::string, std::vector<const StopRecord*>> groups;
  for (const auto& r : records) groups[r.trip_number].push_back(&r);

  AssembleResult result;
  for (auto& [trip_id, stops] : groups) {
    std::sort(stops.begin(), stops.end(), [](const StopRecord* a, const StopRecord* b) {
      return a->stop_number < b->stop_number;
    });
    const auto dup = std::adjacent_find(stops.begin(), stops.end(),
                                        [](const StopRecord* a, const StopRecord* b) {
                                          return a->stop_number == b->stop_number;
                                        });
    if (dup != stops.end()) {
      result.excluded.push_back(
          {trip_id, "duplicate stop_number " + std::to_string((*dup)->stop_number)});
      continue;
    }
    if (stops.size() < 2) {
      result.excluded.push_back({trip_id, "fewer than 2 stops; duration undefined"});
      continue;
    }

    Trip trip;
    trip.trip_id = trip_id;
    trip.stops.reserve(stops.size());
    std::set<std::string> cities;
    for (const auto* s : stops) {
      trip.stops.push_back(*s);
      cities.insert(s->city);
    }
    trip.num_stops = trip.stops.size();
    trip.num_cities = cities.size();
    const auto& first = trip.stops.front();
    const auto& last = trip.stops.back();
    trip.actual_duration = last.actual_time - first.actual_time;
    trip.scheduled_duration = last.scheduled_time - first.scheduled_time;
    trip.delay = trip.actual_duration - trip.scheduled_duration;
    trip.start_time = first.scheduled_time;
    if (trip.actual_duration.count() < 0) {
      result.excluded.push_back({trip_id, "negative actual duration"});
      continue;
    }
    result.trips.push_back(std::move(trip));
  }
  return result;
}

std::vector<StopRecord> trips_to_stops(const std::vector<Trip>& trips) {
  std::vector<StopRecord> out;
  for (const auto& t : trips) out.insert(out.end(), t.stops.begin(), t.stops.end());
  return out;
}

const char* to_string(DayType t) {
  switch (t) {
    case DayType::Weekday: return "Weekday";
    case DayType::Saturday: return "Saturday";
    case DayType::Sunday: return "Sunday";
  }
  return "?";
}

DayType day_type_of(std::chrono::sys_days d) {
  switch (day_of_week(d)) {
    case 5: return DayType::Saturday;
    case 6: return DayType::Sunday;
    default: return DayType::Weekday;
  }
}

MeanStd mean_std(const std::vector<double>& values) {
  // Welford's update: constant input gives exactly zero spread.
  MeanStd out;
  double m2 = 0.0;
  std::size_t k = 0;
  for (const double v : values) {
    ++k;
    const double delta = v - out.mean;
    out.mean += delta / static_cast<double>(k);
    m2 += delta * (v - out.mean);
  }
  if (k > 1) out.std = std::sqrt(m2 / static_cast<double>(k - 1));
  return out;
}

DatasetSummary summarize(const std::vector<Trip>& trips) {
  if (trips.empty()) throw DataError("cannot summarize an empty trip list");
  using namespace std::chrono;

  DatasetSummary s;
  s.total_trips = trips.size();

  std::map<sys_days, double> per_day;
  std::map<sys_days, double> per_month;
  std::vector<double> stops, cities, duration, delay;
  stops.reserve(trips.size());
  cities.reserve(trips.size());
  duration.reserve(trips.size());
  delay.reserve(trips.size());
  for (const auto& t : trips) {
    const sys_days d = day_of(t.start_time);
    per_day[d] += 1.0;
    per_month[month_start(d)] += 1.0;
    stops.push_back(static_cast<double>(t.num_stops));
    cities.push_back(static_cast<double>(t.num_cities));
    duration.push_back(static_cast<double>(t.actual_duration.count()) / 3600.0);
    delay.push_back(static_cast<double>(t.delay.count()) / 3600.0);
  }

  std::vector<double> day_counts, month_counts;
  std::map<DayType, std::vector<double>> by_type{
      {DayType::Weekday, {}}, {DayType::Saturday, {}}, {DayType::Sunday, {}}};
  for (const auto& [d, n] : per_day) {
    day_counts.push_back(n);
    by_type[day_type_of(d)].push_back(n);
  }
  for (const auto& [m, n] : per_month) month_counts.push_back(n);

  s.trips_per_day = mean_std(day_counts);
  s.trips_per_month = mean_std(month_counts);
  s.stops_per_trip = mean_std(stops);
  s.cities_per_trip = mean_std(cities);
  s.duration_hours = mean_std(duration);
  s.delay_hours = mean_std(delay);
  for (const auto& [type, counts] : by_type) {
    const auto ms = mean_std(counts);
    s.trips_per_daytype[type] = DayTypeStats{counts.size(), ms.mean, ms.std};
  }
  return s;
}

void print_summary(std::ostream& out, const DatasetSummary& s) {
  auto row = [&](const char* label, const MeanStd& v, const char* unit = "") {
    out << std::left << std::setw(28) << label << std::fixed << std::setprecision(2) << v.mean
        << " +/- " << v.std << unit << '\n';
  };
  out << std::left << std::setw(28) << "Total Number of Trips" << s.total_trips << '\n';
  row("Number of Trips per Day", s.trips_per_day);
  row("Number of Trips per Month", s.trips_per_month);
  row("Number of Stops per Trip", s.stops_per_trip);
  row("Number of Cities per Trip", s.cities_per_trip);
  row("Trip Duration", s.duration_hours, " hours");
  row("Trip Delay", s.delay_hours, " hours");
  for (const auto& [type, st] : s.trips_per_daytype) {
    out << std::left << std::setw(28) << (std::string("Trips per day: ") + to_string(type))
        << std::fixed << std::setprecision(2) << st.mean << " +/- " << st.std << "  (" << st.days
        << " days)\n";
  }
  out << "std convention: " << DatasetSummary::kStdConvention << '\n';
  out.unsetf(std::ios::floatfield);
}

}  // namespace tripboost
