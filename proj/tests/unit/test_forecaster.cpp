#include "eventcast/models/forecaster.hpp"

#include "test_support.hpp"

#include <algorithm>
#include <cmath>

using namespace eventcast;
using Catch::Matchers::WithinAbs;

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
	return std::find(v.begin(), v.end(), s) != v.end();
}

ModelConfig config_for(Family family, nlohmann::json params = nlohmann::json::object()) {
	ModelConfig c;
	c.family = family;
	c.params = std::move(params);
	return c;
}

// Calendar covering the series plus `extra` days after it.
EventCalendar padded(const EventCalendar& calendar, int extra) {
	EventCalendar c = calendar;
	c.extend({calendar.range().first, calendar.range().last + extra});
	return c;
}

} // namespace

TEST_CASE("family names", "[forecaster]") {
	for (auto f : {Family::Arima, Family::Gbm, Family::Gam, Family::Dbn}) CHECK(parse_family(to_string(f)) == f);
	REQUIRE_ERROR_FIELD(parse_family("lstm"), ErrorCode::InvalidArgument, "family");
}

TEST_CASE("config validation names the offending field", "[forecaster][config]") {
	REQUIRE_ERROR_FIELD(ModelConfig::from_json({{"family", "lstm"}}), ErrorCode::InvalidArgument, "family");
	REQUIRE_ERROR_FIELD(ModelConfig::from_json({{"preset", "aoi_sales"}}), ErrorCode::InvalidArgument, "family");
	REQUIRE_ERROR_FIELD(ModelConfig::from_json({{"family", "gbm"}, {"preset", "nope"}}), ErrorCode::InvalidArgument,
	                    "preset");
	REQUIRE_ERROR_FIELD(ModelConfig::from_json({{"family", "gbm"}, {"params", {{"eta", 2.0}}}}),
	                    ErrorCode::InvalidArgument, "params.eta");
	REQUIRE_ERROR_FIELD(ModelConfig::from_json({{"family", "gbm"}, {"params", {{"eta", "fast"}}}}),
	                    ErrorCode::InvalidArgument, "params.eta");
	REQUIRE_ERROR_FIELD(ModelConfig::from_json({{"family", "dbn"}, {"params", {{"bogus", 1}}}}),
	                    ErrorCode::InvalidArgument, "params.bogus");
	REQUIRE_ERROR_FIELD(ModelConfig::from_json({{"family", "dbn"}, {"params", {{"units", 0}}}}),
	                    ErrorCode::InvalidArgument, "params.units");
	REQUIRE_ERROR_FIELD(ModelConfig::from_json({{"family", "arima"}, {"params", {{"order", {{"d", 3}}}}}}),
	                    ErrorCode::InvalidArgument, "params.order");
	REQUIRE_ERROR_FIELD(ModelConfig::from_json({{"family", "arima"}, {"params", {{"order", {{"x", 1}}}}}}),
	                    ErrorCode::InvalidArgument, "params.order.x");
	REQUIRE_ERROR_FIELD(ModelConfig::from_json({{"family", "arima"}, {"params", {{"transform", "sqrt"}}}}),
	                    ErrorCode::InvalidArgument, "params.transform");
	REQUIRE_ERROR_FIELD(
	    ModelConfig::from_json({{"family", "gam"}, {"params", {{"terms", {{{"covariate", "t"}, {"kind", "spline"}}}}}}}),
	    ErrorCode::InvalidArgument, "params.terms[0].kind");
	REQUIRE_ERROR_FIELD(ModelConfig::from_json({{"family", "gbm"}, {"seed", -1}}), ErrorCode::InvalidArgument, "seed");

	const auto c = ModelConfig::from_json(
	    {{"family", "arima"}, {"preset", "gs_sales"}, {"params", {{"order", {{"p", 1}}}}}, {"seed", 7}});
	CHECK(c.family == Family::Arima);
	CHECK(c.seed == 7);
	CHECK(ModelConfig::from_json(c.to_json()).to_json() == c.to_json());
}

TEST_CASE("feature sets per family", "[forecaster][features]") {
	const auto data = sim::generate_synthetic(testing::game_config(1, 60));
	const auto range = data.series.range();
	const auto arima = model_features(Family::Arima, data.calendar, range).columns();
	const auto gbm = model_features(Family::Gbm, data.calendar, range).columns();
	const auto gam = model_features(Family::Gam, data.calendar, range).columns();
	const auto dbn = model_features(Family::Dbn, data.calendar, range).columns();
	CHECK(arima == event_columns(data.calendar));
	for (const auto& c : arima) {
		CHECK(contains(gbm, c));
		CHECK(contains(gam, c));
		CHECK(contains(dbn, c));
	}
	CHECK(contains(gbm, "dow_0"));
	CHECK(contains(gbm, "day_of_year"));
	CHECK(contains(gbm, "t"));
	CHECK(contains(gam, "day_of_week"));
	CHECK(contains(gam, "t"));
	CHECK_FALSE(contains(gam, "dow_0"));
	CHECK(contains(dbn, "month_12"));
	CHECK_FALSE(contains(dbn, "t"));
	CHECK_FALSE(contains(dbn, "day_of_week"));
	const auto t = model_features(Family::Gam, data.calendar, range).column("t");
	CHECK(t[0] == range.first.days());
	CHECK(t[59] == range.first.days() + 59);
}

TEST_CASE("every family forecasts the days after training and round-trips through JSON", "[forecaster]") {
	const auto data = sim::generate_synthetic(testing::game_config(3, 240));
	const auto calendar = padded(data.calendar, 0);
	const auto train = data.series.slice(0, 200);
	for (auto family : {Family::Arima, Family::Gbm, Family::Gam, Family::Dbn}) {
		DYNAMIC_SECTION(to_string(family)) {
			auto config = config_for(family);
			if (family == Family::Dbn) config.params = {{"max_epochs", 30}, {"units", 10}, {"pretrain_epochs", 3}};
			const auto model = fit_model(config, train, calendar);
			CHECK(model.family() == family);
			CHECK(model.training_end() == train.end());
			const auto f = model.forecast(calendar, 30);
			CHECK(f.values.size() == 30);
			CHECK(f.values.start() == train.end() + 1);
			CHECK(f.covariates.columns() == model.used_columns());
			CHECK(f.covariates.rows() == 30);
			for (double v : f.values.values()) CHECK(std::isfinite(v));

			const auto copy = FittedModel::from_json(nlohmann::json::parse(model.to_json().dump()));
			CHECK(copy.to_json() == model.to_json());
			CHECK(copy.forecast(calendar, 30).values.values() == f.values.values());

			const auto again = fit_model(config, train, calendar);
			CHECK(again.to_json().dump() == model.to_json().dump());
		}
	}
}

TEST_CASE("columns that never vary in training are left out", "[forecaster]") {
	auto cfg = testing::game_config(4, 120);
	cfg.event_effects = {{"gacha", 50.0}};
	const auto data = sim::generate_synthetic(cfg);
	const auto model = fit_model(config_for(Family::Arima), data.series, data.calendar);
	CHECK(contains(model.training_columns(), "promotion"));
	CHECK_FALSE(contains(model.used_columns(), "promotion"));
	CHECK(model.used_columns() == std::vector<std::string>{"gacha"});

	// A promotion planned in the future has no coefficient and is ignored.
	auto future = padded(data.calendar, 10);
	const auto base = model.forecast(future, 10);
	future.add({data.series.end() + 2, EventType::Promotion, "", 3});
	CHECK(model.forecast(future, 10).values.values() == base.values.values());

	// A game-event subtype the training calendar never had cannot be forecast.
	future.register_subtype("raid");
	future.add({data.series.end() + 3, EventType::GameEvent, "raid", 0});
	REQUIRE_ERROR_CODE(model.forecast(future, 10), ErrorCode::ColumnMismatch);
	REQUIRE_ERROR_CODE(model.forecast(data.calendar, 10), ErrorCode::RangeOutsideCalendar);
	REQUIRE_ERROR_CODE(model.forecast(future, 0), ErrorCode::InvalidArgument);
}

TEST_CASE("dynamic regression forecast moves by the event coefficient", "[forecaster][arima]") {
	auto cfg = testing::game_config(5, 300);
	cfg.event_effects = {{"game_event", 50.0}, {"gacha", 30.0}};
	const auto data = sim::generate_synthetic(cfg);
	const auto model = fit_model(config_for(Family::Arima), data.series, data.calendar);
	const auto& arima = std::get<arima::FittedArima>(model.inner());
	const auto idx = static_cast<std::size_t>(
	    std::find(arima.regressors.begin(), arima.regressors.end(), "event_story") - arima.regressors.begin());
	REQUIRE(idx < arima.regressors.size());
	const double gamma = arima.regression[idx];
	CHECK_THAT(gamma, WithinAbs(50.0, 5.0));

	auto future = padded(data.calendar, 30);
	const auto base = model.forecast(future, 30).values;
	future.add({data.series.end() + 12, EventType::GameEvent, "story", 0});
	const auto alt = model.forecast(future, 30).values;
	for (std::size_t h = 0; h < 30; ++h) {
		CHECK_THAT(alt[h] - base[h], WithinAbs(h == 11 ? gamma : 0.0, 1e-6));
	}
}

TEST_CASE("presets choose the target transform", "[forecaster][transform]") {
	const auto data = sim::generate_synthetic(testing::game_config(6, 200));
	auto c = config_for(Family::Gam);
	c.preset = "aoi_playtime";
	CHECK(fit_model(c, data.series, data.calendar).transform() == TransformSpec::log());
	c.preset = "aoi_sales";
	const auto sales = fit_model(c, data.series, data.calendar).transform();
	const double lambda = guerrero_lambda(data.series);
	CHECK(sales == (lambda == 0.0 ? TransformSpec::log() : TransformSpec::box_cox(lambda)));
	c.preset.clear();
	CHECK(fit_model(c, data.series, data.calendar).transform() == TransformSpec::none());
	c.params = {{"transform", {{"kind", "boxcox"}, {"lambda", 0.5}}}};
	const auto m = fit_model(c, data.series, data.calendar);
	CHECK(m.transform() == TransformSpec::box_cox(0.5));
	for (double v : m.forecast(padded(data.calendar, 5), 5).values.values()) CHECK(v > 0.0);
}

TEST_CASE("GAM formula adapts to the training columns", "[forecaster][gam]") {
	const auto data = sim::generate_synthetic(testing::game_config(7, 200));
	const auto model = fit_model(config_for(Family::Gam), data.series, data.calendar);
	const auto& gam = std::get<gam::FittedGam>(model.inner());
	auto kind_of = [&](const std::string& c) {
		for (const auto& t : gam.terms) {
			if (t.term.covariate == c) return std::optional<gam::TermKind>(t.term.kind);
		}
		return std::optional<gam::TermKind>{};
	};
	CHECK(kind_of("day_of_week") == gam::TermKind::CyclicPSpline);
	CHECK(kind_of("gacha") == gam::TermKind::PSpline);
	CHECK(kind_of("marketing") == gam::TermKind::Linear);
	CHECK(kind_of("t") == gam::TermKind::Linear);
	// Binary indicators cannot carry a smooth.
	CHECK(kind_of("holiday") == gam::TermKind::Linear);
	CHECK(kind_of("event_story") == gam::TermKind::Linear);
	// Under two years of data the yearly index would alias the trend.
	CHECK_FALSE(kind_of("day_of_year"));
	CHECK_FALSE(contains(model.used_columns(), "day_of_year"));

	const auto explicit_terms = fit_model(
	    config_for(Family::Gam, {{"terms", {{{"covariate", "gacha"}, {"kind", "linear"}, {"n_basis", 1}}}}}),
	    data.series, data.calendar);
	CHECK(std::get<gam::FittedGam>(explicit_terms.inner()).terms.size() == 1);
}

TEST_CASE("GBM early stopping uses the last fifth for validation", "[forecaster][gbm]") {
	const auto data = sim::generate_synthetic(testing::game_config(8, 200));
	const auto model =
	    fit_model(config_for(Family::Gbm, {{"early_stopping_rounds", 5}, {"n_rounds", 200}, {"eta", 0.3}}),
	              data.series, data.calendar);
	const auto& gbm = std::get<gbm::GbmEnsemble>(model.inner());
	CHECK(gbm.validation_rmse.size() == gbm.trees.size() + 1);
	CHECK(gbm.trees.size() < 200);
}

TEST_CASE("malformed model documents are rejected", "[forecaster][json]") {
	REQUIRE_ERROR_CODE(FittedModel::from_json({{"format", "other"}, {"version", 1}}), ErrorCode::ParseError);
	REQUIRE_ERROR_CODE(FittedModel::from_json({{"format", "eventcast.model"}, {"version", 2}}), ErrorCode::ParseError);
	const auto data = sim::generate_synthetic(testing::game_config(9, 100));
	auto j = fit_model(config_for(Family::Gbm), data.series, data.calendar).to_json();
	j.erase("used_columns");
	REQUIRE_ERROR_CODE(FittedModel::from_json(j), ErrorCode::ParseError);
}

TEST_CASE("custom GAM terms on constant columns are skipped", "[forecaster][gam]") {
	auto cfg = testing::game_config(4, 200);
	cfg.event_effects.erase("holiday");
	const auto data = sim::generate_synthetic(cfg);
	ModelConfig c;
	c.family = Family::Gam;
	c.params = nlohmann::json::parse(R"({"terms": [
		{"covariate": "day_of_week", "kind": "cyclic_pspline", "n_basis": 7, "period": 7},
		{"covariate": "holiday", "kind": "linear"}]})");
	const auto m = fit_model(c, data.series, data.calendar);
	CHECK(std::get<gam::FittedGam>(m.inner()).terms.size() == 1);

	c.params = nlohmann::json::parse(R"({"terms": [{"covariate": "holiday", "kind": "linear"}]})");
	REQUIRE_ERROR_CODE(fit_model(c, data.series, data.calendar), ErrorCode::DegenerateInput);
	c.params = nlohmann::json::parse(R"({"terms": [{"covariate": "weather", "kind": "linear"}]})");
	REQUIRE_ERROR_CODE(fit_model(c, data.series, data.calendar), ErrorCode::MissingCovariate);
}
