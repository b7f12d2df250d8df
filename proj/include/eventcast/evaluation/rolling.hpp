#pragma once

#include "eventcast/core/time_series.hpp"
#include "eventcast/evaluation/metrics.hpp"
#include "eventcast/features/calendar.hpp"
#include "eventcast/models/forecaster.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace eventcast::eval {

/// Fits on `history` and returns `horizon` raw-unit forecasts for the following days.
/// `calendar` is the full calendar: planned future events are known in advance.
using ForecastFn =
    std::function<std::vector<double>(const TimeSeries& history, const EventCalendar& calendar, int horizon)>;

/// fit_model + forecast with the given configuration.
ForecastFn model_forecaster(const ModelConfig& config);
/// Repeats the last observed value.
ForecastFn naive_forecaster();

struct RollingConfig {
	int horizon = 30;
	int step = 7;
	int min_train = 180;
	MaseScaling mase_scaling = MaseScaling::EvaluationWindow;

	void validate() const;
};

struct RollingWindow {
	Date origin;                      // first forecast day
	std::size_t origin_index = 0;     // = training size
	std::vector<double> actual;
	std::vector<double> forecast;
	std::optional<double> mase_scale; // MASE denominator of this window
	MetricReport metrics;
};

struct RollingReport {
	RollingConfig config;
	std::vector<RollingWindow> windows;
	/// Arithmetic mean of the per-window metrics (windows with an undefined metric are skipped).
	MetricReport mean;
};

/// Origins min_train, min_train + step, ... while origin + horizon <= length. Each fit sees only
/// the days before its origin. Throws SeriesTooShort.
RollingReport rolling_evaluate(const ForecastFn& fit, const TimeSeries& series, const EventCalendar& calendar,
                               const RollingConfig& config = {});

/// Errors at horizon day h = 1..horizon pooled across windows.
struct HorizonCurve {
	std::vector<double> rmsle;
	std::vector<double> mase; // NaN where no window defines it
	std::vector<double> mape; // NaN where no window defines it
};
HorizonCurve horizon_curve(const RollingReport& report);

struct SizePoint {
	int size = 0;
	MetricReport metrics;
};

/// Fits on the last `size` days before a common origin (default: the largest size) and scores the
/// next `horizon` days. Throws SeriesTooShort.
std::vector<SizePoint> training_size_curve(const ForecastFn& fit, const TimeSeries& series,
                                           const EventCalendar& calendar, const std::vector<int>& sizes, int horizon,
                                           std::optional<int> origin = std::nullopt,
                                           MaseScaling scaling = MaseScaling::EvaluationWindow);

/// One row per window per metric: origin,train_size,metric,value.
std::string report_to_csv(const RollingReport& report);
nlohmann::json to_json(const RollingReport& report);
/// horizon_day,rmsle,mase,mape
std::string horizon_curve_to_csv(const HorizonCurve& curve);
/// train_size,rmsle,mase,mape
std::string size_curve_to_csv(const std::vector<SizePoint>& curve);

} // namespace eventcast::eval
