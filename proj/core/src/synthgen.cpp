#include "tripboost/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "tripboost/errors.hpp"
#include "tripboost/rng.hpp"

namespace tripboost {
namespace {

using namespace std::chrono;

struct LogNormal {
  double mu = 0.0;
  double sigma = 0.0;
};

LogNormal moment_matched(double mean, double std) {
  const double s2 = std::log1p(std * std / (mean * mean));
  return {std::log(mean) - 0.5 * s2, std::sqrt(s2)};
}

double actual_duration_hours(const GenConfig& cfg, const LogNormal& ln, double z) {
  const double raw = cfg.duration_hours.std == 0.0 ? cfg.duration_hours.mean
                                                   : std::exp(ln.mu + ln.sigma * z);
  return std::max(raw, cfg.duration_min_hours);
}

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// E[min(X, cap)] for X ~ N(m, s^2).
double expected_capped(double m, double s, double cap) {
  if (s <= 0.0) return std::min(m, cap);
  const double k = (m - cap) / s;
  return m - ((m - cap) * std_normal_cdf(k) + s * std_normal_pdf(k));
}

double expected_delay(const GenConfig& cfg, const LogNormal& ln, double location) {
  const double rho = cfg.delay_duration_correlation;
  const double sigma = cfg.delay_hours.std;
  const double spread = sigma * std::sqrt(std::max(0.0, 1.0 - rho * rho));
  constexpr int kPoints = 4001;
  constexpr double kRange = 10.0;
  const double h = 2.0 * kRange / (kPoints - 1);
  double total = 0.0;
  double weight_sum = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double z = -kRange + h * i;
    const double w = std_normal_pdf(z) * ((i == 0 || i == kPoints - 1) ? 0.5 : 1.0);
    const double cap = actual_duration_hours(cfg, ln, z);
    total += w * expected_capped(location + sigma * rho * z, spread, cap);
    weight_sum += w;
  }
  return total / weight_sum;
}

std::string trip_number_for(sys_days d, std::size_t k) {
  const year_month_day ymd{d};
  std::array<char, 48> buf{};
  std::snprintf(buf.data(), buf.size(), "T%04d%02u%02u-%05zu", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), k);
  return buf.data();
}

std::string city_name(std::size_t index) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "City-%03zu", index);
  return buf.data();
}

std::vector<year_month> parse_months(const std::string& text) {
  auto parse_one = [&](std::string s) {
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
    int y = 0;
    unsigned m = 0;
    char dash = 0;
    std::istringstream in(s);
    if (!(in >> y >> dash >> m) || dash != '-' || m < 1 || m > 12 || !in.eof()) {
      throw ConfigError("malformed month '" + s + "' (expected YYYY-MM)");
    }
    return year{y} / month{m};
  };
  std::vector<year_month> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (const auto range = item.find(".."); range != std::string::npos) {
      auto from = parse_one(item.substr(0, range));
      const auto to = parse_one(item.substr(range + 2));
      if (to < from) throw ConfigError("month range '" + item + "' is descending");
      for (; from <= to; from += months{1}) out.push_back(from);
    } else if (item.find_first_not_of(" \t") != std::string::npos) {
      out.push_back(parse_one(item));
    }
  }
  return out;
}

}  // namespace

std::vector<year_month> GenConfig::default_months() {
  std::vector<year_month> out;
  for (unsigned m = 3; m <= 9; ++m) out.push_back(year{2019} / month{m});
  return out;
}

void GenConfig::validate() const {
  if (months.empty()) throw ConfigError("generator month list is empty");
  for (std::size_t i = 1; i < months.size(); ++i) {
    if (!(months[i - 1] < months[i])) throw ConfigError("generator months must be ascending");
  }
  auto check_std = [](const char* name, const Normal& n) {
    if (!(n.std >= 0.0)) throw ConfigError(std::string(name) + " std must be >= 0");
  };
  for (const auto& [type, n] : trips_per_daytype) {
    check_std(to_string(type), n);
    if (!(n.mean >= 0.0)) throw ConfigError("trip count mean must be >= 0");
  }
  check_std("stops", stops);
  check_std("cities", cities);
  check_std("duration", duration_hours);
  check_std("delay", delay_hours);
  check_std("start_hour", start_hour);
  if (stops_min < 2) throw ConfigError("stops_min must be >= 2");
  if (cities_min < 1) throw ConfigError("cities_min must be >= 1");
  if (!(duration_min_hours > 0.0)) throw ConfigError("duration_min_hours must be > 0");
  if (!(duration_hours.mean > 0.0)) throw ConfigError("duration mean must be > 0");
  if (std::abs(cities_stops_correlation) > 1.0 || std::abs(delay_duration_correlation) > 1.0) {
    throw ConfigError("correlations must lie in [-1, 1]");
  }
  if (city_pool_size < 1) throw ConfigError("city_pool_size must be >= 1");
}

GenConfig GenConfig::from_kv(const KeyValueConfig& kv) {
  GenConfig cfg;
  auto num = [&](const char* key, double& target) {
    if (auto v = kv.get_double(key)) target = *v;
  };
  auto integer = [&](const char* key, int& target) {
    if (auto v = kv.get_int(key)) target = static_cast<int>(*v);
  };
  static const std::array<const char*, 23> known = {
      "months",
      "weekday_trips_mean", "weekday_trips_std",
      "saturday_trips_mean", "saturday_trips_std",
      "sunday_trips_mean", "sunday_trips_std",
      "stops_mean", "stops_std", "stops_min",
      "cities_mean", "cities_std", "cities_min", "cities_stops_correlation",
      "duration_mean_hours", "duration_std_hours", "duration_min_hours",
      "delay_mean_hours", "delay_std_hours", "delay_duration_correlation",
      "start_hour_mean", "start_hour_std",
      "city_pool_size",
  };
  for (const auto& [key, value] : kv.values()) {
    if (key == "seed") continue;
    if (std::find_if(known.begin(), known.end(), [&](const char* k) { return key == k; }) ==
        known.end()) {
      throw ConfigError("unknown generator config key '" + key + "'");
    }
  }
  if (auto v = kv.get("months")) cfg.months = parse_months(*v);
  num("weekday_trips_mean", cfg.trips_per_daytype[DayType::Weekday].mean);
  num("weekday_trips_std", cfg.trips_per_daytype[DayType::Weekday].std);
  num("saturday_trips_mean", cfg.trips_per_daytype[DayType::Saturday].mean);
  num("saturday_trips_std", cfg.trips_per_daytype[DayType::Saturday].std);
  num("sunday_trips_mean", cfg.trips_per_daytype[DayType::Sunday].mean);
  num("sunday_trips_std", cfg.trips_per_daytype[DayType::Sunday].std);
  num("stops_mean", cfg.stops.mean);
  num("stops_std", cfg.stops.std);
  integer("stops_min", cfg.stops_min);
  num("cities_mean", cfg.cities.mean);
  num("cities_std", cfg.cities.std);
  integer("cities_min", cfg.cities_min);
  num("cities_stops_correlation", cfg.cities_stops_correlation);
  num("duration_mean_hours", cfg.duration_hours.mean);
  num("duration_std_hours", cfg.duration_hours.std);
  num("duration_min_hours", cfg.duration_min_hours);
  num("delay_mean_hours", cfg.delay_hours.mean);
  num("delay_std_hours", cfg.delay_hours.std);
  num("delay_duration_correlation", cfg.delay_duration_correlation);
  num("start_hour_mean", cfg.start_hour.mean);
  num("start_hour_std", cfg.start_hour.std);
  integer("city_pool_size", cfg.city_pool_size);
  if (auto v = kv.get_uint("seed")) cfg.seed = *v;
  cfg.validate();
  return cfg;
}

double calibrated_delay_location(const GenConfig& cfg) {
  const auto ln = moment_matched(cfg.duration_hours.mean, cfg.duration_hours.std);
  const double target = cfg.delay_hours.mean;
  // expected_delay is continuous and non-decreasing in the location.
  double lo = target - 10.0 * cfg.delay_hours.std - 1.0;
  double hi = target + 10.0 * cfg.delay_hours.std + 10.0 * cfg.duration_hours.mean + 1.0;
  if (expected_delay(cfg, ln, hi) < target) {
    throw ConfigError("delay mean is unreachable under the duration distribution");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    (expected_delay(cfg, ln, mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<StopRecord> generate(const GenConfig& cfg) {
  cfg.validate();
  const auto ln = moment_matched(cfg.duration_hours.mean, cfg.duration_hours.std);
  const double delay_location = calibrated_delay_location(cfg);
  const double rho_d = cfg.delay_duration_correlation;
  const double rho_d_rest = std::sqrt(std::max(0.0, 1.0 - rho_d * rho_d));
  const double rho_c = cfg.cities_stops_correlation;
  const double rho_c_rest = std::sqrt(std::max(0.0, 1.0 - rho_c * rho_c));

  std::vector<StopRecord> out;
  for (const auto& ym : cfg.months) {
    const sys_days first{ym / 1};
    const sys_days end{(ym + months{1}) / 1};
    for (sys_days d = first; d < end; d += days{1}) {
      Rng rng = Rng::substream(cfg.seed, {static_cast<std::uint64_t>(d.time_since_epoch().count())});
      const auto& count_dist = cfg.trips_per_daytype.at(day_type_of(d));
      const double raw_count = std::round(rng.normal(count_dist.mean, count_dist.std));
      const auto trips = static_cast<std::size_t>(std::max(0.0, raw_count));

      for (std::size_t k = 0; k < trips; ++k) {
        const std::string trip_number = trip_number_for(d, k + 1);
        const double start_hours = std::clamp(rng.normal(cfg.start_hour.mean, cfg.start_hour.std),
                                              0.0, 24.0 - 1.0 / 3600.0);
        const Timestamp start = d + seconds{static_cast<std::int64_t>(std::round(start_hours * 3600.0))};

        const double z_stops = rng.normal();
        const int n_stops = std::max(cfg.stops_min,
                                     static_cast<int>(std::lround(cfg.stops.mean + cfg.stops.std * z_stops)));
        const double z_cities = rho_c * z_stops + rho_c_rest * rng.normal();
        const int n_cities = std::clamp(
            static_cast<int>(std::lround(cfg.cities.mean + cfg.cities.std * z_cities)),
            std::min(cfg.cities_min, n_stops), std::min(n_stops, cfg.city_pool_size));

        const double z = rng.normal();
        const double eps = rng.normal();
        const double actual_h = actual_duration_hours(cfg, ln, z);
        const double delay_h = std::min(
            delay_location + cfg.delay_hours.std * (rho_d * z + rho_d_rest * eps), actual_h);
        const auto actual_s = static_cast<std::int64_t>(std::llround(actual_h * 3600.0));
        const auto sched_s = std::max<std::int64_t>(0, std::llround((actual_h - delay_h) * 3600.0));

        // Stop positions as fractions of the trip; the same fractions place
        // scheduled and actual times, so stop k absorbs frac_k of the delay.
        std::vector<double> frac(static_cast<std::size_t>(n_stops));
        frac.front() = 0.0;
        frac.back() = 1.0;
        for (int i = 1; i + 1 < n_stops; ++i) frac[static_cast<std::size_t>(i)] = rng.uniform();
        std::sort(frac.begin() + 1, frac.end() - 1);

        const auto chosen = rng.sample_without_replacement(static_cast<std::size_t>(cfg.city_pool_size),
                                                           static_cast<std::size_t>(n_cities));
        for (int i = 0; i < n_stops; ++i) {
          const auto idx = static_cast<std::size_t>(i);
          const std::size_t city_idx =
              i < n_cities ? chosen[idx] : chosen[rng.uniform_index(chosen.size())];
          const auto client = rng.uniform_index(5000);
          StopRecord rec;
          rec.trip_number = trip_number;
          rec.trip_description = "Synthetic route " + trip_number.substr(10);
          rec.stop_number = i + 1;
          rec.client_name = "Client " + std::to_string(client);
          rec.city = city_name(city_idx);
          rec.address = std::to_string(1 + client % 200) + " Main Street, " + rec.city;
          const auto sched_off = i + 1 == n_stops ? sched_s : std::llround(frac[idx] * static_cast<double>(sched_s));
          const auto actual_off = i + 1 == n_stops ? actual_s : std::llround(frac[idx] * static_cast<double>(actual_s));
          rec.scheduled_time = start + seconds{sched_off};
          rec.actual_time = start + seconds{actual_off};
          out.push_back(std::move(rec));
        }
      }
    }
  }
  return out;
}

}  // namespace tripboost
