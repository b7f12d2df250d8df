#include "eventcast/core/json_io.hpp"
#include "eventcast/simulation/scenario.hpp"
#include "eventcast/simulation/synthetic.hpp"

#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace eventcast;
using namespace eventcast::sim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr int kHorizon = 30;

struct Fixture {
	SynthData data;
	FittedModel model;
	DateRange window;
};

// Dynamic regression on a game with gacha, holidays and story events.
Fixture dr_fixture(TransformSpec transform) {
	auto cfg = testing::game_config(21, 300);
	cfg.event_effects = {{"gacha", 30.0}, {"holiday", 50.0}, {"game_event", 80.0}};
	auto data = generate_synthetic(cfg);
	ModelConfig c;
	c.family = Family::Arima;
	c.params = nlohmann::json::object();
	c.params["transform"] = eventcast::to_json(transform);
	auto model = fit_model(c, data.series, data.calendar);
	const auto window = simulation_window(model, kHorizon);
	return {std::move(data), std::move(model), window};
}

const Fixture& additive() {
	static const Fixture f = dr_fixture(TransformSpec{});
	return f;
}

const Fixture& logged() {
	static const Fixture f = dr_fixture(TransformSpec::log());
	return f;
}

double coefficient(const FittedModel& m, const std::string& column) {
	const auto& a = std::get<arima::FittedArima>(m.inner());
	const auto it = std::find(a.regressors.begin(), a.regressors.end(), column);
	REQUIRE(it != a.regressors.end());
	return a.regression[static_cast<std::size_t>(it - a.regressors.begin())];
}

Scenario scenario(const std::string& name, const DateRange& window, const std::vector<EventRecord>& events = {}) {
	Scenario s{name, EventCalendar(window)};
	s.calendar.register_subtype("story");
	for (const auto& r : events) s.calendar.add(r);
	return s;
}

EventRecord gacha(Date d, int scale) { return {d, EventType::Gacha, "", scale}; }
EventRecord holiday(Date d) { return {d, EventType::Holiday, "", 0}; }
EventRecord story(Date d) { return {d, EventType::GameEvent, "story", 0}; }

double transformed_total(const ScenarioResult& r) {
	return std::accumulate(r.transformed.values().begin(), r.transformed.values().end(), 0.0);
}

} // namespace

TEST_CASE("synthetic series without effects is flat", "[simulation][synthetic]") {
	SynthConfig c;
	c.length = 100;
	c.base_level = 750.0;
	const auto d = generate_synthetic(c);
	REQUIRE(d.series.size() == 100);
	CHECK(d.series.start() == Date::from_ymd(2018, 1, 1));
	for (double v : d.series.values()) CHECK(v == 750.0);
	CHECK(d.calendar.records().empty());
	CHECK(d.ground_truth.at("format") == "eventcast.ground_truth");
}

TEST_CASE("synthetic generation is deterministic per seed", "[simulation][synthetic]") {
	const auto a = generate_synthetic(testing::game_config(3));
	const auto b = generate_synthetic(testing::game_config(3));
	CHECK(a.series.values() == b.series.values());
	CHECK(a.calendar == b.calendar);
	CHECK(a.ground_truth == b.ground_truth);
	const auto c = generate_synthetic(testing::game_config(4));
	CHECK(a.series.values() != c.series.values());
}

TEST_CASE("injected gacha effect is recovered by a difference of means", "[simulation][synthetic]") {
	for (std::uint64_t seed : {1u, 2u, 3u}) {
		SynthConfig c;
		c.length = 2000;
		c.weekly = {-30, -20, -10, 0, 10, 30, 20};
		c.event_effects = {{"gacha", 25.0}};
		c.noise_sigma = 10.0;
		c.seed = seed;
		const auto d = generate_synthetic(c);
		CHECK(d.ground_truth.at("coefficients").at("gacha") == 25.0);

		std::map<Date, int> scale;
		for (const auto& r : d.calendar.records()) scale[r.date] = r.scale;
		const auto& y = d.series.values();
		double sum = 0.0;
		int n = 0;
		for (const auto& [date, s] : scale) {
			// Nearest event-free day on the same weekday.
			for (int k = 1; k < 20; ++k) {
				const Date m = date + (k % 2 ? 7 * ((k + 1) / 2) : -7 * (k / 2));
				if (!d.series.range().contains(m) || scale.contains(m)) continue;
				sum += (y[static_cast<std::size_t>(date - d.series.start())] -
				        y[static_cast<std::size_t>(m - d.series.start())]) / s;
				++n;
				break;
			}
		}
		REQUIRE(n > 50);
		CHECK(d.ground_truth.at("event_counts").at("gacha").get<int>() == static_cast<int>(scale.size()));
		CHECK_THAT(sum / n, WithinAbs(25.0, 3.0 * c.noise_sigma / std::sqrt(n)));
	}
}

TEST_CASE("synthetic config validation and JSON", "[simulation][synthetic]") {
	SynthConfig c = testing::game_config(9);
	c.transform = TransformSpec::log();
	CHECK(SynthConfig::from_json(c.to_json()).to_json() == c.to_json());
	REQUIRE_ERROR_FIELD(SynthConfig::from_json({{"ar_phi", 1.0}}), ErrorCode::InvalidArgument, "ar_phi");
	REQUIRE_ERROR_FIELD(SynthConfig::from_json({{"noise_sigma", -1.0}}), ErrorCode::InvalidArgument, "noise_sigma");
	REQUIRE_ERROR_FIELD(SynthConfig::from_json({{"lenght", 10}}), ErrorCode::InvalidArgument, "lenght");
	REQUIRE_ERROR_FIELD(SynthConfig::from_json({{"length", "long"}}), ErrorCode::InvalidArgument, "length");
	REQUIRE_ERROR_CODE(SynthConfig::from_json({{"event_effects", {{"raid", 1.0}}}}), ErrorCode::UnknownEventType);

	SynthConfig logc;
	logc.length = 50;
	logc.base_level = std::log(400.0);
	logc.transform = TransformSpec::log();
	const auto flat = generate_synthetic(logc);
	for (double v : flat.series.values()) CHECK_THAT(v, WithinRel(400.0, 1e-12));
}

TEST_CASE("a scenario against itself changes nothing", "[simulation][scenario]") {
	const auto& f = additive();
	const auto base = scenario("base", f.window, {gacha(f.window.first + 2, 3)});
	const auto [b, a] = simulate_scenario(f.model, f.data.calendar, base, base, kHorizon);
	CHECK(a.delta_percent == 0.0);
	CHECK(a.forecast.values() == b.forecast.values());
	CHECK(b.forecast.start() == f.window.first);
	CHECK(b.forecast.size() == static_cast<std::size_t>(kHorizon));
	CHECK_THAT(b.total, WithinRel(std::accumulate(b.forecast.values().begin(), b.forecast.values().end(), 0.0), 1e-15));
}

TEST_CASE("one extra event moves one day by its coefficient", "[simulation][scenario]") {
	const auto& f = logged();
	const double gamma = coefficient(f.model, "event_story");
	CHECK(gamma > 0.0);
	const auto base = scenario("base", f.window);
	const auto alt = scenario("raid night", f.window, {story(f.window.first + 11)});
	const auto [b, a] = simulate_scenario(f.model, f.data.calendar, base, alt, kHorizon);
	for (std::size_t h = 0; h < static_cast<std::size_t>(kHorizon); ++h) {
		CHECK_THAT(a.transformed[h] - b.transformed[h], WithinAbs(h == 11 ? gamma : 0.0, 1e-6));
	}
	const double raw_shift = std::exp(b.transformed[11] + gamma) - std::exp(b.transformed[11]);
	CHECK_THAT(a.forecast[11] - b.forecast[11], WithinAbs(raw_shift, 1e-6));
	CHECK_THAT(a.delta_percent, WithinAbs(100.0 * raw_shift / b.total, 1e-6));
	CHECK(a.delta_percent > 0.0);
}

TEST_CASE("swapping events leaves an additive total unchanged", "[simulation][scenario][property]") {
	const auto& f = additive();
	const Date d1 = f.window.first + 3, d2 = f.window.first + 17;
	const auto before = scenario("before", f.window, {gacha(d1, 2), holiday(d2)});
	const auto after = scenario("after", f.window, {holiday(d1), gacha(d2, 2)});
	const auto [b, a] = simulate_scenario(f.model, f.data.calendar, before, after, kHorizon);
	CHECK(a.forecast.values() != b.forecast.values());
	CHECK_THAT(a.delta_percent, WithinAbs(0.0, 1e-8));
}

TEST_CASE("scenario deltas add over disjoint event sets", "[simulation][scenario][property]") {
	for (const Fixture* f : {&additive(), &logged()}) {
		const auto w = f->window;
		const auto base = scenario("base", w, {holiday(w.first + 1)});
		const std::vector<EventRecord> a_events{gacha(w.first + 4, 4), story(w.first + 9)};
		const std::vector<EventRecord> b_events{story(w.first + 20), gacha(w.first + 25, 1), holiday(w.first + 28)};
		auto both = a_events;
		both.insert(both.end(), b_events.begin(), b_events.end());
		both.push_back(holiday(w.first + 1));
		auto with_base = [&](std::vector<EventRecord> ev) {
			ev.push_back(holiday(w.first + 1));
			return ev;
		};
		const auto base_total = transformed_total(simulate_scenario(f->model, f->data.calendar, base, base, kHorizon).first);
		auto shift = [&](const std::vector<EventRecord>& ev) {
			const auto r = simulate_scenario(f->model, f->data.calendar, base, scenario("x", w, ev), kHorizon).second;
			return transformed_total(r) - base_total;
		};
		CHECK_THAT(shift(both), WithinAbs(shift(with_base(a_events)) + shift(with_base(b_events)), 1e-8));
	}
}

TEST_CASE("scenario errors leave the model and history untouched", "[simulation][scenario]") {
	const auto& f = additive();
	const auto model_before = f.model.to_json();
	const auto history_before = f.data.calendar;
	const auto base = scenario("base", f.window);

	const auto shifted = scenario("late", {f.window.first + 1, f.window.last + 1});
	REQUIRE_ERROR_CODE(simulate_scenario(f.model, f.data.calendar, base, shifted, kHorizon), ErrorCode::WindowMismatch);
	REQUIRE_ERROR_CODE(simulate_scenario(f.model, f.data.calendar, base, base, kHorizon + 1), ErrorCode::WindowMismatch);

	auto raid = scenario("raid", f.window);
	raid.calendar.register_subtype("raid");
	raid.calendar.add({f.window.first + 5, EventType::GameEvent, "raid", 0});
	REQUIRE_ERROR_CODE(simulate_scenario(f.model, f.data.calendar, base, raid, kHorizon), ErrorCode::ColumnMismatch);
	REQUIRE_ERROR_CODE(compare_scenarios(f.model, f.data.calendar, base, {base, raid}, kHorizon),
	                   ErrorCode::ColumnMismatch);
	REQUIRE_ERROR_CODE(simulate_scenario(f.model, f.data.calendar, base, base, 0), ErrorCode::InvalidArgument);

	simulate_scenario(f.model, f.data.calendar, base, scenario("x", f.window, {story(f.window.first)}), kHorizon);
	CHECK(f.model.to_json() == model_before);
	CHECK(f.data.calendar == history_before);
}

TEST_CASE("history events decay into the window", "[simulation][scenario]") {
	const auto& f = additive();
	auto history = f.data.calendar;
	const Date last = f.model.training_end();
	const auto base = scenario("base", f.window);
	const auto plain = simulate_scenario(f.model, history, base, base, kHorizon).first;
	// Events inside the window from history are replaced by the scenario's own.
	history.extend({history.range().first, f.window.last});
	history.add(story(f.window.first + 2));
	const auto masked = simulate_scenario(f.model, history, base, base, kHorizon).first;
	CHECK(masked.forecast.values() == plain.forecast.values());
	CHECK(last + 1 == f.window.first);
}

TEST_CASE("compare_scenarios ranks by total then name", "[simulation][scenario]") {
	const auto& f = additive();
	const auto base = scenario("base", f.window);
	const auto boosted = scenario("boosted", f.window, {story(f.window.first + 6)});
	const auto quiet = scenario("quiet", f.window);
	const auto calm = scenario("calm", f.window);
	const auto ranked = compare_scenarios(f.model, f.data.calendar, base, {quiet, boosted, calm}, kHorizon);
	REQUIRE(ranked.size() == 3);
	CHECK(ranked[0].name == "boosted");
	CHECK(ranked[0].delta_percent > 0.0);
	CHECK(ranked[1].name == "calm");
	CHECK(ranked[2].name == "quiet");
	CHECK(ranked[1].delta_percent == 0.0);

	const auto single = compare_scenarios(f.model, f.data.calendar, base, {boosted}, kHorizon);
	REQUIRE(single.size() == 1);
	CHECK(single[0].forecast.values() == ranked[0].forecast.values());
	const auto pair = simulate_scenario(f.model, f.data.calendar, base, boosted, kHorizon).second;
	CHECK(pair.delta_percent == ranked[0].delta_percent);
	CHECK(compare_scenarios(f.model, f.data.calendar, base, {}, kHorizon).empty());

	std::vector<Scenario> many;
	for (int i = 0; i < 12; ++i) many.push_back(scenario("s" + std::to_string(i % 4), f.window, {gacha(f.window.first + i, 1 + i % 4)}));
	const auto r1 = compare_scenarios(f.model, f.data.calendar, base, many, kHorizon);
	const auto r2 = compare_scenarios(f.model, f.data.calendar, base, many, kHorizon);
	REQUIRE(r1.size() == 12);
	for (std::size_t i = 0; i < r1.size(); ++i) {
		CHECK(r1[i].name == r2[i].name);
		CHECK(r1[i].total == r2[i].total);
		if (i > 0) CHECK(r1[i - 1].total >= r1[i].total);
	}
}

TEST_CASE("scenario documents", "[simulation][json]") {
	const DateRange w{Date::from_ymd(2020, 3, 1), Date::from_ymd(2020, 3, 30)};
	const auto j = nlohmann::json::parse(R"({"name": "spring", "events": [
		{"date": "2020-03-02", "type": "gacha", "scale": 2},
		{"date": "2020-03-05", "type": "game_event", "subtype": "raid"}]})");
	const auto s = scenario_from_json(j, w);
	CHECK(s.name == "spring");
	CHECK(s.calendar.range() == w);
	CHECK(s.calendar.records().size() == 2);
	CHECK(s.calendar.vocabulary().contains("raid"));
	const auto again = scenario_from_json(to_json(s), w);
	CHECK(again.calendar == s.calendar);

	const auto narrow = scenario_from_json({{"name", "n"}, {"from", "2020-03-10"}, {"to", "2020-03-12"}}, w);
	CHECK(narrow.calendar.range() == DateRange{Date::from_ymd(2020, 3, 10), Date::from_ymd(2020, 3, 12)});

	auto bad = j;
	bad["events"][0]["scale"] = 7;
	REQUIRE_ERROR_FIELD(scenario_from_json(bad, w), ErrorCode::InvalidArgument, "events[0].scale");
	bad = j;
	bad["events"][1]["date"] = "2020-04-15";
	REQUIRE_ERROR_FIELD(scenario_from_json(bad, w), ErrorCode::RangeOutsideCalendar, "events[1].date");
	bad = j;
	bad["events"][1]["type"] = "concert";
	REQUIRE_ERROR_FIELD(scenario_from_json(bad, w), ErrorCode::InvalidArgument, "events[1].type");
	REQUIRE_ERROR_FIELD(scenario_from_json({{"events", nlohmann::json::array()}}, w), ErrorCode::InvalidArgument, "name");
	REQUIRE_ERROR_FIELD(scenario_from_json({{"name", "x"}, {"events", 3}}, w), ErrorCode::InvalidArgument, "events");
	REQUIRE_ERROR_FIELD(scenario_from_json({{"name", "x"}, {"from", "March"}}, w), ErrorCode::InvalidArgument, "from");

	const auto& f = additive();
	const auto base = scenario("base", f.window);
	const auto result = simulate_scenario(f.model, f.data.calendar, base, base, kHorizon).second;
	const auto out = to_json(result);
	CHECK(out.at("name") == "base");
	CHECK(out.at("dates").size() == static_cast<std::size_t>(kHorizon));
	CHECK(out.at("dates")[0] == f.window.first.to_iso());
	CHECK(out.at("values").get<std::vector<double>>() == result.forecast.values());
	CHECK(out.at("delta_percent") == 0.0);
	CHECK(out.at("total").get<double>() == result.total);
}
