#pragma once

#include "eventcast/core/time_series.hpp"
#include "eventcast/features/calendar.hpp"
#include "eventcast/models/forecaster.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace eventcast::sim {

/// A planned future: events over exactly the simulation window.
struct Scenario {
	std::string name;
	EventCalendar calendar;
};

/// {name, events: [{date, type, subtype, scale}], from?, to?}. Without from/to the calendar range
/// is `window`. Unknown game-event subtypes are registered. Field paths point into the document.
Scenario scenario_from_json(const nlohmann::json& j, const DateRange& window);
nlohmann::json to_json(const Scenario& scenario);

struct ScenarioResult {
	std::string name;
	TimeSeries forecast;     // raw units
	TimeSeries transformed;  // the model's transformed scale
	double total = 0.0;      // sum of raw forecasts
	double delta_percent = 0.0; // 100 (total - baseline total) / baseline total
	DesignMatrix covariates;
};

nlohmann::json to_json(const ScenarioResult& result);

/// Window the model simulates: the `horizon` days after its training data.
DateRange simulation_window(const FittedModel& model, int horizon);

/// Forecasts the window under both scenarios. `history` supplies events before the window (their
/// decays carry in) and any temperature values. Throws WindowMismatch when a scenario's range
/// differs from the window, ColumnMismatch when a scenario needs columns the model lacks.
std::pair<ScenarioResult, ScenarioResult> simulate_scenario(const FittedModel& model, const EventCalendar& history,
                                                           const Scenario& baseline, const Scenario& alternative,
                                                           int horizon);

/// Every alternative against the baseline, sorted by total descending, then name ascending.
/// Alternatives run concurrently; the first failing one (in input order) is rethrown.
std::vector<ScenarioResult> compare_scenarios(const FittedModel& model, const EventCalendar& history,
                                              const Scenario& baseline, const std::vector<Scenario>& alternatives,
                                              int horizon);

} // namespace eventcast::sim
