#include "tripboost/folds.hpp"

#include <algorithm>

#include "tripboost/errors.hpp"

namespace tripboost {

using namespace std::chrono;

ScenarioSpec ScenarioSpec::scenario(int id) {
  switch (id) {
    case 0: return {0, Unit::Months, 3, 4};
    case 1: return {1, Unit::Months, 1, 3};
    case 2: return {2, Unit::Days, 14, 42};
    case 3: return {3, Unit::Days, 7, 21};
    case 4: return {4, Unit::Days, 1, 3};
    default: throw ConfigError("scenario must be 0..4, got " + std::to_string(id));
  }
}

std::string ScenarioSpec::describe() const {
  const char* unit_name = unit == Unit::Months ? " month(s)" : " day(s)";
  return "scenario " + std::to_string(id) + ": train " + std::to_string(train_length) + unit_name +
         ", test " + std::to_string(test_length) + unit_name;
}

namespace {

sys_days shift(sys_days d, ScenarioSpec::Unit unit, int amount) {
  return unit == ScenarioSpec::Unit::Months ? add_months(d, amount) : d + days{amount};
}

std::size_t first_at_or_after(const FeatureTable& table, Timestamp t) {
  const auto it = std::lower_bound(table.rows.begin(), table.rows.end(), t,
                                   [](const FeatureRow& r, Timestamp v) { return r.start_time < v; });
  return static_cast<std::size_t>(it - table.rows.begin());
}

}  // namespace

std::vector<Fold> make_folds(const FeatureTable& table, const ScenarioSpec& spec) {
  if (table.rows.empty()) throw DataError("cannot fold an empty table");
  const bool sorted = std::is_sorted(table.rows.begin(), table.rows.end(),
                                     [](const FeatureRow& a, const FeatureRow& b) {
                                       return a.start_time < b.start_time;
                                     });
  if (!sorted) throw DataError("feature table is not chronologically sorted");

  const sys_days timeline_start = month_start(day_of(table.rows.front().start_time));
  const sys_days last_month = month_start(day_of(table.rows.back().start_time));
  const sys_days test_begin = add_months(last_month, -(kTestPeriodMonths - 1));
  const sys_days test_end = add_months(last_month, 1);

  const sys_days first_train = shift(test_begin, spec.unit, -spec.train_length);
  if (first_train < timeline_start) {
    throw DataError("insufficient time span for " + spec.describe() + ": data starts " +
                    format_date(timeline_start) + ", first training window needs " +
                    format_date(first_train));
  }

  std::vector<Fold> folds;
  for (sys_days s = test_begin; s < test_end; s = shift(s, spec.unit, spec.test_length)) {
    Fold f;
    f.index = folds.size();
    const sys_days e = std::min(shift(s, spec.unit, spec.test_length), test_end);
    f.test_start = s;
    f.test_end = e;
    f.train_end = s;
    f.train_start = shift(s, spec.unit, -spec.train_length);
    f.train_first = first_at_or_after(table, f.train_start);
    f.train_last = first_at_or_after(table, f.train_end);
    f.test_first = f.train_last;
    f.test_last = first_at_or_after(table, f.test_end);
    folds.push_back(f);
  }
  return folds;
}

}  // namespace tripboost
