#include "eventcast/simulation/scenario.hpp"

#include "eventcast/core/json_io.hpp"
#include "eventcast/error.hpp"
#include "eventcast/features/io.hpp"

#include <algorithm>
#include <exception>
#include <future>
#include <numeric>

namespace eventcast::sim {

Scenario scenario_from_json(const nlohmann::json& j, const DateRange& window) {
	if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "scenario must be an object");
	Scenario s;
	if (!j.contains("name") || !j.at("name").is_string()) {
		throw Error(ErrorCode::InvalidArgument, "scenario needs a string name", "name");
	}
	s.name = j.at("name").get<std::string>();
	DateRange range = window;
	for (const char* key : {"from", "to"}) {
		if (!j.contains(key)) continue;
		if (!j.at(key).is_string()) throw Error(ErrorCode::InvalidArgument, "dates are ISO strings", key);
		Date d;
		try {
			d = Date::parse(j.at(key).get<std::string>());
		} catch (const Error& e) {
			throw Error(ErrorCode::InvalidArgument, e.message(), key);
		}
		(std::string_view(key) == "from" ? range.first : range.last) = d;
	}
	if (range.length() < 1) throw Error(ErrorCode::InvalidArgument, "scenario range is empty", "to");
	s.calendar = EventCalendar(range);
	if (!j.contains("events")) return s;
	const auto& events = j.at("events");
	if (!events.is_array()) throw Error(ErrorCode::InvalidArgument, "events must be an array", "events");
	for (std::size_t i = 0; i < events.size(); ++i) {
		const std::string path = "events[" + std::to_string(i) + "]";
		const auto r = event_from_json(events[i], path);
		try {
			if (r.type == EventType::GameEvent) s.calendar.register_subtype(r.subtype);
			s.calendar.add(r);
		} catch (const Error& e) {
			throw Error(e.code(), e.message(), e.field_path().empty() ? path : path + "." + e.field_path());
		}
	}
	return s;
}

nlohmann::json to_json(const Scenario& scenario) {
	nlohmann::json events = nlohmann::json::array();
	for (const auto& r : scenario.calendar.records()) events.push_back(event_to_json(r));
	nlohmann::json j{{"name", scenario.name}, {"events", events}};
	if (scenario.calendar.has_range()) {
		j["from"] = scenario.calendar.range().first.to_iso();
		j["to"] = scenario.calendar.range().last.to_iso();
	}
	return j;
}

nlohmann::json to_json(const ScenarioResult& r) {
	nlohmann::json dates = nlohmann::json::array();
	for (std::size_t i = 0; i < r.forecast.size(); ++i) dates.push_back(r.forecast.date_at(i).to_iso());
	return {{"name", r.name},
	        {"dates", dates},
	        {"values", r.forecast.values()},
	        {"transformed", r.transformed.values()},
	        {"total", r.total},
	        {"delta_percent", r.delta_percent}};
}

DateRange simulation_window(const FittedModel& model, int horizon) {
	if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be positive", "horizon");
	return {model.training_end() + 1, model.training_end() + horizon};
}

namespace {

// History before the window plus the scenario's own events.
EventCalendar planned_calendar(const EventCalendar& history, const Scenario& scenario, const DateRange& window) {
	if (!scenario.calendar.has_range() || scenario.calendar.range() != window) {
		const auto& r = scenario.calendar.range();
		throw Error(ErrorCode::WindowMismatch,
		            "scenario '" + scenario.name + "' covers " +
		                (scenario.calendar.has_range() ? r.first.to_iso() + ".." + r.last.to_iso() : "nothing") +
		                ", the simulation window is " + window.first.to_iso() + ".." + window.last.to_iso(),
		            "calendar");
	}
	const Date first = history.has_range() ? std::min(history.range().first, window.first) : window.first;
	EventCalendar c({first, window.last});
	for (const auto& s : history.vocabulary()) c.register_subtype(s);
	for (const auto& s : scenario.calendar.vocabulary()) c.register_subtype(s);
	for (const auto& r : history.records()) {
		if (r.date < window.first) c.add(r);
	}
	for (const auto& r : scenario.calendar.records()) c.add(r);
	for (const auto& [d, t] : history.temperature_values()) {
		if (c.range().contains(d)) c.set_temperature(d, t);
	}
	for (const auto& [d, t] : scenario.calendar.temperature_values()) c.set_temperature(d, t);
	return c;
}

ScenarioResult run(const FittedModel& model, const EventCalendar& history, const Scenario& scenario,
                   const DateRange& window) {
	const auto calendar = planned_calendar(history, scenario, window);
	auto f = model.forecast(calendar, window.length());
	ScenarioResult r{scenario.name, f.values, transform(f.values, model.transform()), 0.0, 0.0, std::move(f.covariates)};
	r.total = std::accumulate(r.forecast.values().begin(), r.forecast.values().end(), 0.0);
	return r;
}

double delta(double total, double baseline) {
	if (baseline == 0.0) throw Error(ErrorCode::ZeroDenominator, "baseline total is zero");
	return 100.0 * (total - baseline) / baseline;
}

} // namespace

std::pair<ScenarioResult, ScenarioResult> simulate_scenario(const FittedModel& model, const EventCalendar& history,
                                                           const Scenario& baseline, const Scenario& alternative,
                                                           int horizon) {
	const auto window = simulation_window(model, horizon);
	auto base = run(model, history, baseline, window);
	auto alt = run(model, history, alternative, window);
	alt.delta_percent = delta(alt.total, base.total);
	return {std::move(base), std::move(alt)};
}

std::vector<ScenarioResult> compare_scenarios(const FittedModel& model, const EventCalendar& history,
                                              const Scenario& baseline, const std::vector<Scenario>& alternatives,
                                              int horizon) {
	const auto window = simulation_window(model, horizon);
	const auto base = run(model, history, baseline, window);
	std::vector<std::future<ScenarioResult>> pending;
	for (const auto& a : alternatives) {
		pending.push_back(std::async(std::launch::async, [&, window] { return run(model, history, a, window); }));
	}
	// Collect every future before rethrowing so no task outlives its references.
	std::vector<ScenarioResult> out;
	std::exception_ptr failure;
	for (auto& p : pending) {
		try {
			auto r = p.get();
			r.delta_percent = delta(r.total, base.total);
			out.push_back(std::move(r));
		} catch (...) {
			if (!failure) failure = std::current_exception();
		}
	}
	if (failure) std::rethrow_exception(failure);
	std::stable_sort(out.begin(), out.end(), [](const ScenarioResult& a, const ScenarioResult& b) {
		if (a.total != b.total) return a.total > b.total;
		return a.name < b.name;
	});
	return out;
}

} // namespace eventcast::sim
