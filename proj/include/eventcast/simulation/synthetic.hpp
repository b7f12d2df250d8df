#pragma once

#include "eventcast/core/time_series.hpp"
#include "eventcast/features/calendar.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <string>

namespace eventcast::sim {

/// Ground-truth generator. In the transformed space
///   z_t = base + trend*t + weekly[weekday] + yearly*sin(2 pi doy / 365.25) + sum_c effect_c X_ct + e_t,
/// with X the calendar encoding and e an AR(1) process; raw values are inverse_transform(z).
struct SynthConfig {
	Date start = Date::from_ymd(2018, 1, 1);
	int length = 540;
	double base_level = 1000.0;
	double trend = 0.0;                // per day
	std::array<double, 7> weekly{};    // indexed by weekday, Monday = 0
	double yearly_amplitude = 0.0;
	/// Keyed by event type name (gacha, promotion, marketing, holiday, game_event). Only these
	/// types are placed.
	std::map<std::string, double> event_effects;
	double event_rate = 0.05;          // per day and type
	std::string game_event_subtype = "story";
	double noise_sigma = 0.0;
	double ar_phi = 0.0;
	TransformSpec transform{};
	std::uint64_t seed = 1;

	void validate() const;
	static SynthConfig from_json(const nlohmann::json& j);
	nlohmann::json to_json() const;
};

struct SynthData {
	TimeSeries series;
	EventCalendar calendar;
	/// Every injected coefficient by design column, plus the config that produced the data.
	nlohmann::json ground_truth;
};

SynthData generate_synthetic(const SynthConfig& config);

} // namespace eventcast::sim
