#include "eventcast/simulation/synthetic.hpp"

#include "eventcast/core/json_io.hpp"
#include "eventcast/error.hpp"
#include "eventcast/features/design_matrix.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace eventcast::sim {

void SynthConfig::validate() const {
	if (length < 1) throw Error(ErrorCode::InvalidArgument, "length must be positive", "length");
	if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise_sigma must be >= 0", "noise_sigma");
	if (!(std::abs(ar_phi) < 1.0)) throw Error(ErrorCode::InvalidArgument, "|ar_phi| must be < 1", "ar_phi");
	if (!(event_rate >= 0.0 && event_rate <= 1.0)) {
		throw Error(ErrorCode::InvalidArgument, "event_rate must lie in [0, 1]", "event_rate");
	}
	for (const auto& [type, effect] : event_effects) {
		parse_event_type(type);
		if (!std::isfinite(effect)) throw Error(ErrorCode::InvalidArgument, "effects must be finite", "event_effects." + type);
	}
	if (game_event_subtype.empty()) {
		throw Error(ErrorCode::InvalidArgument, "game_event_subtype must not be empty", "game_event_subtype");
	}
}

SynthConfig SynthConfig::from_json(const nlohmann::json& j) {
	if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "synthetic config must be an object");
	static const std::set<std::string> known{"start", "length", "base_level", "trend", "weekly",
	                                         "yearly_amplitude", "event_effects", "event_rate", "game_event_subtype",
	                                         "noise_sigma", "ar_phi", "transform", "seed"};
	for (const auto& [key, value] : j.items()) {
		if (!known.contains(key)) throw Error(ErrorCode::InvalidArgument, "unknown field '" + key + "'", key);
	}
	SynthConfig c;
	const std::string* current = nullptr;
	auto field = [&](const std::string& key, auto& out) {
		if (!j.contains(key)) return;
		current = &key;
		out = j.at(key).get<std::decay_t<decltype(out)>>();
	};
	try {
		if (j.contains("start")) c.start = Date::parse(j.at("start").get<std::string>());
		field("length", c.length);
		field("base_level", c.base_level);
		field("trend", c.trend);
		field("weekly", c.weekly);
		field("yearly_amplitude", c.yearly_amplitude);
		field("event_effects", c.event_effects);
		field("event_rate", c.event_rate);
		field("game_event_subtype", c.game_event_subtype);
		field("noise_sigma", c.noise_sigma);
		field("ar_phi", c.ar_phi);
		field("seed", c.seed);
		if (j.contains("transform")) {
			static const std::string key = "transform";
			current = &key;
			c.transform = transform_from_json(j.at("transform"));
		}
	} catch (const nlohmann::json::exception&) {
		throw Error(ErrorCode::InvalidArgument, "field has the wrong type", current ? *current : std::string("start"));
	} catch (const Error& e) {
		throw Error(ErrorCode::InvalidArgument, e.message(), current ? *current : std::string("start"));
	}
	c.validate();
	return c;
}

nlohmann::json SynthConfig::to_json() const {
	return {{"start", start.to_iso()},
	        {"length", length},
	        {"base_level", base_level},
	        {"trend", trend},
	        {"weekly", weekly},
	        {"yearly_amplitude", yearly_amplitude},
	        {"event_effects", event_effects},
	        {"event_rate", event_rate},
	        {"game_event_subtype", game_event_subtype},
	        {"noise_sigma", noise_sigma},
	        {"ar_phi", ar_phi},
	        {"transform", eventcast::to_json(transform)},
	        {"seed", seed}};
}

SynthData generate_synthetic(const SynthConfig& config) {
	config.validate();
	const DateRange range{config.start, config.start + (config.length - 1)};
	std::mt19937_64 rng(config.seed);
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	std::uniform_int_distribution<int> scale(1, 4);
	std::normal_distribution<double> normal(0.0, 1.0);

	EventCalendar calendar(range);
	std::vector<std::pair<EventType, double>> placed;
	for (const auto& [name, effect] : config.event_effects) placed.emplace_back(parse_event_type(name), effect);
	if (config.event_effects.contains("game_event")) calendar.register_subtype(config.game_event_subtype);
	std::map<std::string, int> counts;
	for (Date d = range.first; d <= range.last; d += 1) {
		for (const auto& [type, effect] : placed) {
			if (unit(rng) >= config.event_rate) continue;
			EventRecord r{d, type, type == EventType::GameEvent ? config.game_event_subtype : "",
			              has_scale(type) ? scale(rng) : 0};
			calendar.add(r);
			++counts[std::string(to_string(type))];
		}
	}

	const auto x = encode_calendar(calendar, range);
	std::map<std::string, double> coefficients;
	Eigen::VectorXd effect = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x.cols()));
	for (const auto& [type, value] : placed) {
		const std::string column = type == EventType::GameEvent ? game_event_column(config.game_event_subtype)
		                                                        : std::string(to_string(type));
		effect[static_cast<Eigen::Index>(*x.find(column))] = value;
		coefficients[column] = value;
	}
	const Eigen::VectorXd events = x.values() * effect;

	const double sd0 = config.noise_sigma / std::sqrt(1.0 - config.ar_phi * config.ar_phi);
	double e = sd0 * normal(rng);
	std::vector<double> values(static_cast<std::size_t>(config.length));
	for (int t = 0; t < config.length; ++t) {
		if (t > 0) e = config.ar_phi * e + config.noise_sigma * normal(rng);
		const Date d = range.first + t;
		const double z = config.base_level + config.trend * t + config.weekly[d.weekday()] +
		                 config.yearly_amplitude * std::sin(2.0 * std::numbers::pi * d.day_of_year() / 365.25) +
		                 events[t] + e;
		values[static_cast<std::size_t>(t)] = inverse_transform_value(z, config.transform);
	}

	nlohmann::json truth{{"format", "eventcast.ground_truth"},
	                     {"version", 1},
	                     {"config", config.to_json()},
	                     {"coefficients", coefficients},
	                     {"event_counts", counts}};
	return {TimeSeries(range.first, std::move(values), "synthetic"), std::move(calendar), std::move(truth)};
}

} // namespace eventcast::sim
