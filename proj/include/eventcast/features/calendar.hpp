#pragma once

#include "eventcast/core/date.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace eventcast {

enum class EventType { GameEvent, Gacha, Promotion, Marketing, Holiday };

std::string_view to_string(EventType type);
/// Accepts game_event, gacha, promotion, marketing, holiday; throws UnknownEventType otherwise.
EventType parse_event_type(std::string_view text);
/// Gacha and promotion carry a 1..4 influence scale; every other type uses 0.
bool has_scale(EventType type);

struct EventRecord {
	Date date;
	EventType type = EventType::GameEvent;
	std::string subtype; // game-event label, or holiday name
	int scale = 0;

	/// Checks the scale rule for the type; throws InvalidArgument.
	void validate() const;
	bool operator==(const EventRecord&) const = default;
};

/// Knobs of the calendar encoding.
struct EncodingConfig {
	int marketing_days = 7;
	/// Promotion effects last `promotion_decay_factor * scale` days.
	int promotion_decay_factor = 2;
	/// Overlapping event contributions are summed, then capped here.
	double cap = 4.0;
};

/// Dated event records plus an optional daily temperature covariate.
class EventCalendar {
public:
	EventCalendar() = default;
	explicit EventCalendar(DateRange range) : range_(range), has_range_(true) {}

	const DateRange& range() const { return range_; }
	bool has_range() const { return has_range_; }
	/// Grows the covered range; never shrinks it.
	void extend(const DateRange& range);

	/// Game-event subtype labels. Each gets its own design column.
	const std::set<std::string>& vocabulary() const { return vocabulary_; }
	void register_subtype(const std::string& subtype);

	/// Throws RangeOutsideCalendar, UnknownEventType (unregistered subtype),
	/// DuplicateEvent, or InvalidArgument (bad scale).
	void add(const EventRecord& record);
	const std::vector<EventRecord>& records() const { return records_; }
	std::vector<EventRecord> records_in(const DateRange& range) const;

	void set_temperature(Date date, double celsius);
	bool has_temperature() const { return !temperature_.empty(); }
	std::optional<double> temperature(Date date) const;
	const std::map<Date, double>& temperature_values() const { return temperature_; }

	/// Union with another calendar; duplicates are rejected.
	void merge(const EventCalendar& other);
	/// Copy holding only records strictly before `date`, same range and temperature.
	EventCalendar before(Date date) const;

	bool operator==(const EventCalendar&) const = default;

private:
	DateRange range_{};
	bool has_range_ = false;
	std::set<std::string> vocabulary_;
	std::vector<EventRecord> records_;
	std::map<Date, double> temperature_;
};

/// Per-day weights an event contributes from its own day onwards.
std::vector<double> decay_profile(EventType type, int scale, const EncodingConfig& config = {});

} // namespace eventcast
