#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tripboost/civil_time.hpp"
#include "tripboost/featurize.hpp"

namespace tripboost {

/// Retraining scenario. Windows are measured in calendar months or in days
/// (two-week and one-week windows are 14- and 7-day slices anchored at the
/// start of the test period).
struct ScenarioSpec {
  enum class Unit { Months, Days };

  int id = 0;
  Unit unit = Unit::Months;
  int test_length = 3;
  int train_length = 4;

  /// 0: train 4 months, test 3 months (single fold).
  /// 1: 3 months / 1 month.  2: 6 weeks / 2 weeks.
  /// 3: 3 weeks / 1 week.    4: 3 days / 1 day.
  /// Throws ConfigError outside 0..4.
  static ScenarioSpec scenario(int id);

  std::string describe() const;
};

/// Number of trailing calendar months that form the common test period.
inline constexpr int kTestPeriodMonths = 3;

struct Fold {
  std::size_t index = 0;
  Timestamp train_start{}, train_end{};  // [start, end)
  Timestamp test_start{}, test_end{};    // [start, end)
  // Row ranges [first, last) in the chronologically sorted table.
  std::size_t train_first = 0, train_last = 0;
  std::size_t test_first = 0, test_last = 0;

  std::size_t n_train() const { return train_last - train_first; }
  std::size_t n_test() const { return test_last - test_first; }
};

/// Partitions the final three calendar months of the table's span into
/// consecutive test windows (the last may be shorter), each preceded by its
/// training window. Throws DataError if the table is empty, unsorted, or
/// too short for the first training window.
std::vector<Fold> make_folds(const FeatureTable& table, const ScenarioSpec& spec);

}  // namespace tripboost
