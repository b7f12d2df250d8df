#include "eventcast/evaluation/metrics.hpp"

#include "eventcast/error.hpp"

#include <cmath>
#include <string>

namespace eventcast::eval {

namespace {

void same_length(std::span<const double> a, std::span<const double> f) {
	if (a.size() != f.size()) {
		throw Error(ErrorCode::LengthMismatch,
		            "actual has " + std::to_string(a.size()) + " values, forecast " + std::to_string(f.size()));
	}
	if (a.empty()) throw Error(ErrorCode::EmptyData, "no values to score");
}

} // namespace

double rmsle(std::span<const double> actual, std::span<const double> forecast) {
	same_length(actual, forecast);
	double sum = 0.0;
	for (std::size_t i = 0; i < actual.size(); ++i) {
		if (actual[i] < 0.0 || forecast[i] < 0.0) {
			throw Error(ErrorCode::NegativeValue, "RMSLE needs non-negative values (index " + std::to_string(i) + ")");
		}
		const double e = std::log1p(forecast[i]) - std::log1p(actual[i]);
		sum += e * e;
	}
	return std::sqrt(sum / static_cast<double>(actual.size()));
}

double mase(std::span<const double> actual, std::span<const double> forecast, std::span<const double> scaling) {
	same_length(actual, forecast);
	if (scaling.size() < 2) throw Error(ErrorCode::InvalidArgument, "MASE scaling series needs two values");
	double denom = 0.0;
	for (std::size_t i = 1; i < scaling.size(); ++i) denom += std::abs(scaling[i] - scaling[i - 1]);
	denom /= static_cast<double>(scaling.size() - 1);
	if (denom == 0.0) throw Error(ErrorCode::ZeroDenominator, "MASE scaling series is constant");
	double num = 0.0;
	for (std::size_t i = 0; i < actual.size(); ++i) num += std::abs(forecast[i] - actual[i]);
	return num / static_cast<double>(actual.size()) / denom;
}

double mape(std::span<const double> actual, std::span<const double> forecast) {
	same_length(actual, forecast);
	double sum = 0.0;
	for (std::size_t i = 0; i < actual.size(); ++i) {
		if (actual[i] == 0.0) {
			throw Error(ErrorCode::ZeroActual, "MAPE undefined: actual is zero at index " + std::to_string(i));
		}
		sum += std::abs((forecast[i] - actual[i]) / actual[i]);
	}
	return 100.0 * sum / static_cast<double>(actual.size());
}

MetricReport score(std::span<const double> actual, std::span<const double> forecast, std::span<const double> training,
                   MaseScaling scaling) {
	MetricReport r;
	r.n = actual.size();
	r.rmsle = rmsle(actual, forecast);
	try {
		r.mase = mase(actual, forecast, scaling == MaseScaling::TrainingSeries ? training : actual);
	} catch (const Error& e) {
		if (e.code() != ErrorCode::ZeroDenominator && e.code() != ErrorCode::InvalidArgument) throw;
	}
	try {
		r.mape = mape(actual, forecast);
	} catch (const Error& e) {
		if (e.code() != ErrorCode::ZeroActual) throw;
	}
	return r;
}

nlohmann::json to_json(const MetricReport& r) {
	return {{"rmsle", r.rmsle},
	        {"mase", r.mase ? nlohmann::json(*r.mase) : nlohmann::json(nullptr)},
	        {"mape", r.mape ? nlohmann::json(*r.mape) : nlohmann::json(nullptr)},
	        {"n", r.n}};
}

} // namespace eventcast::eval
