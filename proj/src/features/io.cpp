#include "eventcast/features/io.hpp"

#include "eventcast/core/csv.hpp"
#include "eventcast/error.hpp"

#include <algorithm>
#include <charconv>

namespace eventcast {

namespace {

int parse_scale(const std::string& text, std::size_t row) {
	if (text.empty()) return 0;
	int value = 0;
	auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
	if (ec != std::errc{} || ptr != text.data() + text.size()) {
		throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ": bad scale '" + text + "'", "scale");
	}
	return value;
}

double parse_number(const std::string& text, std::size_t row) {
	double value = 0.0;
	auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
	if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
		throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ": not a number '" + text + "'");
	}
	return value;
}

} // namespace

EventCalendar parse_events_csv(std::string_view text, std::optional<DateRange> range) {
	const auto table = parse_csv(text);
	const auto c_date = table.column("date");
	const auto c_type = table.column("event_type");
	const auto c_sub = table.column("subtype");
	const auto c_scale = table.column("scale");

	std::vector<EventRecord> records;
	records.reserve(table.rows.size());
	for (std::size_t i = 0; i < table.rows.size(); ++i) {
		const auto& row = table.rows[i];
		records.push_back(
		    {Date::parse(row[c_date]), parse_event_type(row[c_type]), row[c_sub], parse_scale(row[c_scale], i + 2)});
	}
	if (!range) {
		if (records.empty()) throw Error(ErrorCode::EmptyData, "event CSV without rows needs an explicit range");
		const auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
		                                          [](const auto& a, const auto& b) { return a.date < b.date; });
		range = DateRange{lo->date, hi->date};
	}
	EventCalendar calendar(*range);
	for (const auto& r : records) {
		if (r.type == EventType::GameEvent && !r.subtype.empty()) calendar.register_subtype(r.subtype);
		calendar.add(r);
	}
	return calendar;
}

void add_temperature_csv(EventCalendar& calendar, std::string_view text) {
	const auto table = parse_csv(text);
	const auto c_date = table.column("date");
	const auto c_val = table.column("celsius");
	for (std::size_t i = 0; i < table.rows.size(); ++i) {
		const Date d = Date::parse(table.rows[i][c_date]);
		calendar.extend({d, d});
		calendar.set_temperature(d, parse_number(table.rows[i][c_val], i + 2));
	}
}

void add_holidays_csv(EventCalendar& calendar, std::string_view text) {
	const auto table = parse_csv(text);
	const auto c_date = table.column("date");
	const auto c_name = table.column("name");
	for (const auto& row : table.rows) {
		const Date d = Date::parse(row[c_date]);
		calendar.extend({d, d});
		calendar.add({d, EventType::Holiday, row[c_name], 0});
	}
}

std::string events_to_csv(const EventCalendar& calendar) {
	std::string out = "date,event_type,subtype,scale\n";
	for (const auto& r : calendar.records()) {
		out += r.date.to_iso() + "," + std::string(to_string(r.type)) + "," + r.subtype + "," +
		       std::to_string(r.scale) + "\n";
	}
	return out;
}

nlohmann::json event_to_json(const EventRecord& record) {
	return {{"date", record.date.to_iso()},
	        {"type", std::string(to_string(record.type))},
	        {"subtype", record.subtype},
	        {"scale", record.scale}};
}

EventRecord event_from_json(const nlohmann::json& j, const std::string& path) {
	if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "event must be an object", path);
	auto require_string = [&](const char* key) -> std::string {
		if (!j.contains(key) || !j[key].is_string()) {
			throw Error(ErrorCode::InvalidArgument, std::string("missing string field '") + key + "'",
			            path + "." + key);
		}
		return j[key].get<std::string>();
	};
	EventRecord r;
	try {
		r.date = Date::parse(require_string("date"));
	} catch (const Error& e) {
		if (e.code() != ErrorCode::ParseError) throw;
		throw Error(ErrorCode::InvalidArgument, e.message(), path + ".date");
	}
	try {
		r.type = parse_event_type(require_string("type"));
	} catch (const Error& e) {
		if (e.code() != ErrorCode::UnknownEventType) throw;
		throw Error(ErrorCode::InvalidArgument, e.message(), path + ".type");
	}
	if (j.contains("subtype")) {
		if (!j["subtype"].is_string()) throw Error(ErrorCode::InvalidArgument, "subtype must be a string", path + ".subtype");
		r.subtype = j["subtype"].get<std::string>();
	}
	if (j.contains("scale")) {
		if (!j["scale"].is_number_integer()) {
			throw Error(ErrorCode::InvalidArgument, "scale must be an integer", path + ".scale");
		}
		r.scale = j["scale"].get<int>();
	}
	try {
		r.validate();
	} catch (const Error& e) {
		throw Error(e.code(), e.message(), path + "." + e.field_path());
	}
	return r;
}

nlohmann::json calendar_to_json(const EventCalendar& calendar) {
	nlohmann::json events = nlohmann::json::array();
	for (const auto& r : calendar.records()) events.push_back(event_to_json(r));
	nlohmann::json temps = nlohmann::json::object();
	for (const auto& [d, t] : calendar.temperature_values()) temps[d.to_iso()] = t;
	nlohmann::json j{{"vocabulary", calendar.vocabulary()}, {"events", events}, {"temperature", temps}};
	if (calendar.has_range()) {
		j["from"] = calendar.range().first.to_iso();
		j["to"] = calendar.range().last.to_iso();
	}
	return j;
}

EventCalendar calendar_from_json(const nlohmann::json& j) {
	EventCalendar calendar;
	if (j.contains("from") && j.contains("to")) {
		calendar = EventCalendar({Date::parse(j.at("from").get<std::string>()),
		                          Date::parse(j.at("to").get<std::string>())});
	}
	if (j.contains("vocabulary")) {
		for (const auto& s : j.at("vocabulary")) calendar.register_subtype(s.get<std::string>());
	}
	if (j.contains("events")) {
		const auto& events = j.at("events");
		for (std::size_t i = 0; i < events.size(); ++i) {
			auto r = event_from_json(events[i], "events[" + std::to_string(i) + "]");
			if (r.type == EventType::GameEvent) calendar.register_subtype(r.subtype);
			calendar.add(r);
		}
	}
	if (j.contains("temperature")) {
		for (const auto& [k, v] : j.at("temperature").items()) calendar.set_temperature(Date::parse(k), v.get<double>());
	}
	return calendar;
}

} // namespace eventcast
