#pragma once

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <span>

namespace eventcast::eval {

/// sqrt(mean((log(f+1) - log(a+1))^2)). Throws NegativeValue, LengthMismatch.
double rmsle(std::span<const double> actual, std::span<const double> forecast);

/// mean|f - a| over the mean absolute first difference of `scaling`.
/// Throws LengthMismatch, ZeroDenominator (constant scaling series), InvalidArgument (< 2 scaling values).
double mase(std::span<const double> actual, std::span<const double> forecast, std::span<const double> scaling);

/// Percent: (100 / n) * sum |(f - a) / a|. Throws ZeroActual, LengthMismatch.
double mape(std::span<const double> actual, std::span<const double> forecast);

/// Which series scales MASE. The evaluation window's own actuals is the default form.
enum class MaseScaling { EvaluationWindow, TrainingSeries };

struct MetricReport {
	double rmsle = 0.0;
	// Undefined for constant scaling series or zero actuals respectively.
	std::optional<double> mase;
	std::optional<double> mape;
	std::size_t n = 0;
};

/// All three metrics; MASE and MAPE degrade to nullopt instead of throwing.
MetricReport score(std::span<const double> actual, std::span<const double> forecast,
                   std::span<const double> training = {}, MaseScaling scaling = MaseScaling::EvaluationWindow);

nlohmann::json to_json(const MetricReport& report);

} // namespace eventcast::eval
