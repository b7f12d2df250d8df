#pragma once

#include "eventcast/features/calendar.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace eventcast {

/// `date,event_type,subtype,scale` rows. Game-event subtypes are registered on the fly.
/// The calendar range is `range` when given, else the span of the rows.
EventCalendar parse_events_csv(std::string_view text, std::optional<DateRange> range = std::nullopt);
/// Merges `date,celsius` rows into the calendar (range grows to cover them).
void add_temperature_csv(EventCalendar& calendar, std::string_view text);
/// Merges `date,name` rows as holiday events.
void add_holidays_csv(EventCalendar& calendar, std::string_view text);

std::string events_to_csv(const EventCalendar& calendar);

nlohmann::json event_to_json(const EventRecord& record);
/// Throws Error with a field path such as `events[2].scale` relative to `path`.
EventRecord event_from_json(const nlohmann::json& j, const std::string& path = "event");

/// {from, to, vocabulary, events, temperature}
nlohmann::json calendar_to_json(const EventCalendar& calendar);
EventCalendar calendar_from_json(const nlohmann::json& j);

} // namespace eventcast
