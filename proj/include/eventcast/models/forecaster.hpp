#pragma once

#include "eventcast/core/time_series.hpp"
#include "eventcast/features/design_matrix.hpp"
#include "eventcast/models/arima.hpp"
#include "eventcast/models/dbn.hpp"
#include "eventcast/models/gam.hpp"
#include "eventcast/models/gbm.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace eventcast {

enum class Family { Arima, Gbm, Gam, Dbn };

std::string_view to_string(Family family);
/// arima, gbm, gam, dbn; throws InvalidArgument with field path "family".
Family parse_family(std::string_view text);

/// What to fit. `params` holds family-specific overrides on top of the preset:
///   arima: order {p,d,q,P,D,Q,m}, include_constant, covariate_mode ("differenced"|"raw")
///   gbm:   max_depth, eta, n_rounds, min_samples_leaf, early_stopping_rounds
///   gam:   terms [{covariate, kind, n_basis, period, lambda}]
///   dbn:   layers, units, plr, tlr, k, batch, l2, window, pretrain_epochs, max_epochs, patience
/// and for every family `transform`: "none" | "log" | "auto" | {"kind": "boxcox", "lambda": x}.
struct ModelConfig {
	Family family = Family::Arima;
	std::string preset; // aoi_sales, gs_sales, aoi_playtime, gs_playtime or empty
	nlohmann::json params = nlohmann::json::object();
	std::uint64_t seed = 42;
	EncodingConfig encoding{};

	/// Checks the preset name and every parameter; throws InvalidArgument with a field path.
	void validate() const;
	nlohmann::json to_json() const;
	static ModelConfig from_json(const nlohmann::json& j);
};

/// Default order for ARIMA configs without a preset or explicit order.
arima::ArimaOrder default_arima_order();

/// Covariates a family consumes over `range`: encoded events plus, depending on the family,
/// calendar indices, one-hot calendar dummies and the trend column "t" (days since epoch).
DesignMatrix model_features(Family family, const EventCalendar& calendar, const DateRange& range,
                            const EncodingConfig& encoding = {});

struct ModelForecast {
	TimeSeries values;       // raw units, first day = training end + 1
	DesignMatrix covariates; // exactly the columns the model consumed
};

/// A trained forecaster of any family behind one forecast contract.
class FittedModel {
public:
	using Inner = std::variant<arima::FittedArima, gbm::GbmEnsemble, gam::FittedGam, dbn::DbnModel>;

	Family family() const { return static_cast<Family>(inner_.index()); }
	const ModelConfig& config() const { return config_; }
	const DateRange& training_range() const { return training_range_; }
	Date training_end() const { return training_range_.last; }
	const TransformSpec& transform() const { return transform_; }
	/// Columns the training features offered; a forecast calendar may not add others.
	const std::vector<std::string>& training_columns() const { return training_columns_; }
	/// Columns that varied over the training window and were handed to the model.
	const std::vector<std::string>& used_columns() const { return used_columns_; }
	const Inner& inner() const { return inner_; }

	/// Forecasts `horizon` days after training end. `calendar` must cover those days; decays of
	/// earlier events in it carry over. Throws ColumnMismatch when the calendar produces a
	/// non-zero column the training features did not have.
	ModelForecast forecast(const EventCalendar& calendar, int horizon) const;

	nlohmann::json to_json() const;
	static FittedModel from_json(const nlohmann::json& j);

private:
	friend FittedModel fit_model(const ModelConfig&, const TimeSeries&, const EventCalendar&);
	FittedModel() = default;

	ModelConfig config_;
	DateRange training_range_{};
	TransformSpec transform_{};
	std::vector<std::string> training_columns_;
	std::vector<std::string> used_columns_;
	Inner inner_;
};

/// Fits on the whole series. `calendar` must cover the series dates.
FittedModel fit_model(const ModelConfig& config, const TimeSeries& series, const EventCalendar& calendar);

} // namespace eventcast
