#include "eventcast/evaluation/rolling.hpp"

#include "eventcast/core/csv.hpp"
#include "eventcast/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace eventcast::eval {

ForecastFn model_forecaster(const ModelConfig& config) {
	config.validate();
	return [config](const TimeSeries& history, const EventCalendar& calendar, int horizon) {
		return fit_model(config, history, calendar).forecast(calendar, horizon).values.values();
	};
}

ForecastFn naive_forecaster() {
	return [](const TimeSeries& history, const EventCalendar&, int horizon) {
		return std::vector<double>(static_cast<std::size_t>(horizon), history.values().back());
	};
}

void RollingConfig::validate() const {
	if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be positive", "horizon");
	if (step < 1) throw Error(ErrorCode::InvalidArgument, "step must be positive", "step");
	if (min_train < 1) throw Error(ErrorCode::InvalidArgument, "min_train must be positive", "min_train");
}

namespace {

std::optional<double> scale_of(std::span<const double> s) {
	if (s.size() < 2) return std::nullopt;
	double d = 0.0;
	for (std::size_t i = 1; i < s.size(); ++i) d += std::abs(s[i] - s[i - 1]);
	d /= static_cast<double>(s.size() - 1);
	if (d == 0.0) return std::nullopt;
	return d;
}

RollingWindow run_window(const ForecastFn& fit, const TimeSeries& series, const EventCalendar& calendar,
                         std::size_t begin, std::size_t origin, int horizon, MaseScaling scaling) {
	const auto history = series.slice(begin, origin);
	auto forecast = fit(history, calendar, horizon);
	if (forecast.size() != static_cast<std::size_t>(horizon)) {
		throw Error(ErrorCode::LengthMismatch, "forecaster returned " + std::to_string(forecast.size()) +
		                                           " values for horizon " + std::to_string(horizon));
	}
	RollingWindow w;
	w.origin = series.date_at(origin);
	w.origin_index = origin;
	const auto& v = series.values();
	w.actual.assign(v.begin() + static_cast<std::ptrdiff_t>(origin),
	                v.begin() + static_cast<std::ptrdiff_t>(origin) + horizon);
	w.forecast = std::move(forecast);
	w.metrics = score(w.actual, w.forecast, history.values(), scaling);
	w.mase_scale = scale_of(scaling == MaseScaling::TrainingSeries ? std::span<const double>(history.values())
	                                                                 : std::span<const double>(w.actual));
	return w;
}

MetricReport average(const std::vector<const MetricReport*>& reports) {
	MetricReport m;
	double mase_sum = 0.0, mape_sum = 0.0;
	int mase_n = 0, mape_n = 0;
	for (const auto* r : reports) {
		m.rmsle += r->rmsle;
		m.n += r->n;
		if (r->mase) mase_sum += *r->mase, ++mase_n;
		if (r->mape) mape_sum += *r->mape, ++mape_n;
	}
	if (!reports.empty()) m.rmsle /= static_cast<double>(reports.size());
	if (mase_n > 0) m.mase = mase_sum / mase_n;
	if (mape_n > 0) m.mape = mape_sum / mape_n;
	return m;
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string("NA"); }

std::string cell(double v) { return std::isnan(v) ? std::string("NA") : format_double(v); }

} // namespace

RollingReport rolling_evaluate(const ForecastFn& fit, const TimeSeries& series, const EventCalendar& calendar,
                               const RollingConfig& config) {
	config.validate();
	const auto n = series.size();
	if (static_cast<std::size_t>(config.min_train + config.horizon) > n) {
		throw Error(ErrorCode::SeriesTooShort, "series has " + std::to_string(n) + " days, need min_train + horizon = " +
		                                           std::to_string(config.min_train + config.horizon));
	}
	RollingReport report;
	report.config = config;
	for (auto o = static_cast<std::size_t>(config.min_train); o + static_cast<std::size_t>(config.horizon) <= n;
	     o += static_cast<std::size_t>(config.step)) {
		report.windows.push_back(run_window(fit, series, calendar, 0, o, config.horizon, config.mase_scaling));
	}
	std::vector<const MetricReport*> all;
	for (const auto& w : report.windows) all.push_back(&w.metrics);
	report.mean = average(all);
	return report;
}

HorizonCurve horizon_curve(const RollingReport& report) {
	const auto h = static_cast<std::size_t>(report.config.horizon);
	const double nan = std::numeric_limits<double>::quiet_NaN();
	HorizonCurve c{std::vector<double>(h, 0.0), std::vector<double>(h, nan), std::vector<double>(h, nan)};
	if (report.windows.empty()) return c;
	for (std::size_t d = 0; d < h; ++d) {
		double sq = 0.0, mase_sum = 0.0, mape_sum = 0.0;
		int mase_n = 0, mape_n = 0;
		for (const auto& w : report.windows) {
			const double a = w.actual[d], f = w.forecast[d];
			const double e = std::log1p(f) - std::log1p(a);
			sq += e * e;
			if (w.mase_scale) mase_sum += std::abs(f - a) / *w.mase_scale, ++mase_n;
			if (a != 0.0) mape_sum += 100.0 * std::abs((f - a) / a), ++mape_n;
		}
		c.rmsle[d] = std::sqrt(sq / static_cast<double>(report.windows.size()));
		if (mase_n > 0) c.mase[d] = mase_sum / mase_n;
		if (mape_n > 0) c.mape[d] = mape_sum / mape_n;
	}
	return c;
}

std::vector<SizePoint> training_size_curve(const ForecastFn& fit, const TimeSeries& series,
                                           const EventCalendar& calendar, const std::vector<int>& sizes, int horizon,
                                           std::optional<int> origin, MaseScaling scaling) {
	if (sizes.empty()) throw Error(ErrorCode::InvalidArgument, "no training sizes", "sizes");
	if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be positive", "horizon");
	for (int s : sizes) {
		if (s < 1) throw Error(ErrorCode::InvalidArgument, "training sizes must be positive", "sizes");
	}
	const int largest = *std::max_element(sizes.begin(), sizes.end());
	const int o = origin.value_or(largest);
	if (o < largest) throw Error(ErrorCode::InvalidArgument, "origin precedes the largest training size", "origin");
	if (static_cast<std::size_t>(o + horizon) > series.size()) {
		throw Error(ErrorCode::SeriesTooShort, "series has " + std::to_string(series.size()) +
		                                           " days, need " + std::to_string(o + horizon));
	}
	std::vector<SizePoint> out;
	for (int s : sizes) {
		const auto w = run_window(fit, series, calendar, static_cast<std::size_t>(o - s), static_cast<std::size_t>(o),
		                          horizon, scaling);
		out.push_back({s, w.metrics});
	}
	return out;
}

std::string report_to_csv(const RollingReport& report) {
	std::ostringstream out;
	out << "origin,train_size,metric,value\n";
	for (const auto& w : report.windows) {
		const auto prefix = w.origin.to_iso() + "," + std::to_string(w.origin_index) + ",";
		out << prefix << "rmsle," << cell(w.metrics.rmsle) << "\n";
		out << prefix << "mase," << cell(w.metrics.mase) << "\n";
		out << prefix << "mape," << cell(w.metrics.mape) << "\n";
	}
	return out.str();
}

nlohmann::json to_json(const RollingReport& report) {
	nlohmann::json windows = nlohmann::json::array();
	for (const auto& w : report.windows) {
		windows.push_back({{"origin", w.origin.to_iso()},
		                   {"train_size", w.origin_index},
		                   {"metrics", to_json(w.metrics)},
		                   {"actual", w.actual},
		                   {"forecast", w.forecast}});
	}
	return {{"config",
	         {{"horizon", report.config.horizon},
	          {"step", report.config.step},
	          {"min_train", report.config.min_train},
	          {"mase_scaling",
	           report.config.mase_scaling == MaseScaling::EvaluationWindow ? "evaluation_window" : "training_series"}}},
	        {"windows", windows},
	        {"mean", to_json(report.mean)}};
}

std::string horizon_curve_to_csv(const HorizonCurve& curve) {
	std::ostringstream out;
	out << "horizon_day,rmsle,mase,mape\n";
	for (std::size_t d = 0; d < curve.rmsle.size(); ++d) {
		out << d + 1 << "," << cell(curve.rmsle[d]) << "," << cell(curve.mase[d]) << "," << cell(curve.mape[d]) << "\n";
	}
	return out.str();
}

std::string size_curve_to_csv(const std::vector<SizePoint>& curve) {
	std::ostringstream out;
	out << "train_size,rmsle,mase,mape\n";
	for (const auto& p : curve) {
		out << p.size << "," << cell(p.metrics.rmsle) << "," << cell(p.metrics.mase) << "," << cell(p.metrics.mape)
		    << "\n";
	}
	return out.str();
}

} // namespace eventcast::eval
