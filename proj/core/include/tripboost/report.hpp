#pragma once

#include <ostream>
#include <vector>

#include "tripboost/experiment.hpp"

namespace tripboost {

inline constexpr const char* kResultsHeader =
    "scenario,model,target,fold,n_train,n_test,mae_s,rmse_s,fit_time_s";
inline constexpr const char* kAggregatesHeader =
    "scenario,model,target,folds,mean_mae_s,mean_rmse_s,mean_fit_time_s";
inline constexpr const char* kScaleHeader = "model,n,fit_time_s";

void write_results_csv(std::ostream& out, const std::vector<RunResult>& results);
void write_aggregates_csv(std::ostream& out, const std::vector<Aggregate>& aggregates);
void write_scale_csv(std::ostream& out, const std::vector<ScaleRow>& rows);

/// Fixed-width table for terminal output.
void print_aggregates(std::ostream& out, const std::vector<Aggregate>& aggregates);

/// Fit time against sample count, one polyline per model, log-scaled time axis.
void write_scale_svg(std::ostream& out, const std::vector<ScaleRow>& rows);

}  // namespace tripboost
