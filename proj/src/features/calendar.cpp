#include "eventcast/features/calendar.hpp"

#include "eventcast/error.hpp"

#include <algorithm>

namespace eventcast {

std::string_view to_string(EventType type) {
	switch (type) {
	case EventType::GameEvent: return "game_event";
	case EventType::Gacha: return "gacha";
	case EventType::Promotion: return "promotion";
	case EventType::Marketing: return "marketing";
	case EventType::Holiday: return "holiday";
	}
	return "unknown";
}

EventType parse_event_type(std::string_view text) {
	if (text == "game_event") return EventType::GameEvent;
	if (text == "gacha") return EventType::Gacha;
	if (text == "promotion") return EventType::Promotion;
	if (text == "marketing") return EventType::Marketing;
	if (text == "holiday") return EventType::Holiday;
	throw Error(ErrorCode::UnknownEventType, "unknown event type '" + std::string(text) + "'", "type");
}

bool has_scale(EventType type) { return type == EventType::Gacha || type == EventType::Promotion; }

void EventRecord::validate() const {
	if (has_scale(type)) {
		if (scale < 1 || scale > 4) {
			throw Error(ErrorCode::InvalidArgument,
			            std::string(to_string(type)) + " on " + date.to_iso() + " needs scale 1..4", "scale");
		}
	} else if (scale != 0) {
		throw Error(ErrorCode::InvalidArgument,
		            std::string(to_string(type)) + " on " + date.to_iso() + " carries no scale", "scale");
	}
	if (type == EventType::GameEvent && subtype.empty()) {
		throw Error(ErrorCode::InvalidArgument, "game event on " + date.to_iso() + " needs a subtype",
		            "subtype");
	}
}

void EventCalendar::extend(const DateRange& range) {
	if (!has_range_) {
		range_ = range;
		has_range_ = true;
		return;
	}
	range_.first = std::min(range_.first, range.first);
	range_.last = std::max(range_.last, range.last);
}

void EventCalendar::register_subtype(const std::string& subtype) {
	if (subtype.empty()) throw Error(ErrorCode::InvalidArgument, "empty event subtype", "subtype");
	vocabulary_.insert(subtype);
}

void EventCalendar::add(const EventRecord& record) {
	record.validate();
	if (!has_range_ || !range_.contains(record.date)) {
		throw Error(ErrorCode::RangeOutsideCalendar,
		            "event on " + record.date.to_iso() + " outside calendar " + range_.first.to_iso() + ".." +
		                range_.last.to_iso(),
		            "date");
	}
	if (record.type == EventType::GameEvent && !vocabulary_.contains(record.subtype)) {
		throw Error(ErrorCode::UnknownEventType, "unregistered game event subtype '" + record.subtype + "'",
		            "subtype");
	}
	const bool duplicate = std::any_of(records_.begin(), records_.end(), [&](const EventRecord& r) {
		return r.date == record.date && r.type == record.type && r.subtype == record.subtype;
	});
	if (duplicate) {
		throw Error(ErrorCode::DuplicateEvent,
		            "duplicate " + std::string(to_string(record.type)) +
		                (record.subtype.empty() ? "" : "/" + record.subtype) + " on " + record.date.to_iso(),
		            "events");
	}
	// Keep records sorted so that encodings and serializations are order-independent.
	const auto key = [](const EventRecord& r) { return std::tie(r.date, r.type, r.subtype); };
	const auto pos = std::upper_bound(records_.begin(), records_.end(), record,
	                                  [&](const EventRecord& a, const EventRecord& b) { return key(a) < key(b); });
	records_.insert(pos, record);
}

std::vector<EventRecord> EventCalendar::records_in(const DateRange& range) const {
	std::vector<EventRecord> out;
	for (const auto& r : records_) {
		if (range.contains(r.date)) out.push_back(r);
	}
	return out;
}

void EventCalendar::set_temperature(Date date, double celsius) {
	if (!has_range_ || !range_.contains(date)) {
		throw Error(ErrorCode::RangeOutsideCalendar, "temperature on " + date.to_iso() + " outside calendar",
		            "date");
	}
	temperature_[date] = celsius;
}

std::optional<double> EventCalendar::temperature(Date date) const {
	const auto it = temperature_.find(date);
	if (it == temperature_.end()) return std::nullopt;
	return it->second;
}

void EventCalendar::merge(const EventCalendar& other) {
	if (other.has_range()) extend(other.range());
	for (const auto& s : other.vocabulary()) vocabulary_.insert(s);
	for (const auto& r : other.records()) add(r);
	for (const auto& [d, t] : other.temperature_values()) temperature_[d] = t;
}

EventCalendar EventCalendar::before(Date date) const {
	EventCalendar out = *this;
	out.records_.clear();
	for (const auto& r : records_) {
		if (r.date < date) out.records_.push_back(r);
	}
	return out;
}

std::vector<double> decay_profile(EventType type, int scale, const EncodingConfig& config) {
	EventRecord probe{Date{}, type, type == EventType::GameEvent ? "probe" : "", scale};
	probe.validate();
	switch (type) {
	case EventType::Marketing: {
		const int n = config.marketing_days;
		std::vector<double> w(static_cast<std::size_t>(n));
		for (int t = 0; t < n; ++t) w[static_cast<std::size_t>(t)] = 1.0 - static_cast<double>(t) / n;
		return w;
	}
	case EventType::Promotion: {
		const int n = config.promotion_decay_factor * scale;
		std::vector<double> w(static_cast<std::size_t>(n));
		for (int t = 0; t < n; ++t) w[static_cast<std::size_t>(t)] = scale * (1.0 - static_cast<double>(t) / n);
		return w;
	}
	case EventType::Gacha:
		return {static_cast<double>(scale)};
	case EventType::GameEvent:
	case EventType::Holiday:
		return {1.0};
	}
	throw Error(ErrorCode::UnknownEventType, "unknown event type");
}

} // namespace eventcast
