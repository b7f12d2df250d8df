#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace eventcast {

/// Calendar day stored as days since 1970-01-01 (proleptic Gregorian).
class Date {
public:
	constexpr Date() = default;
	constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

	static Date from_ymd(int year, unsigned month, unsigned day);
	/// Parses YYYY-MM-DD; throws Error(ParseError) on malformed or invalid dates.
	static Date parse(std::string_view iso);

	std::string to_iso() const;

	constexpr std::int32_t days() const { return days_; }
	int year() const;
	unsigned month() const; // 1..12
	unsigned day() const;
	/// Monday = 0 ... Sunday = 6.
	unsigned weekday() const;
	/// 0-based day of the year.
	unsigned day_of_year() const;

	constexpr Date operator+(std::int32_t n) const { return Date(days_ + n); }
	constexpr Date operator-(std::int32_t n) const { return Date(days_ - n); }
	constexpr std::int32_t operator-(Date other) const { return days_ - other.days_; }
	constexpr Date& operator+=(std::int32_t n) {
		days_ += n;
		return *this;
	}
	constexpr auto operator<=>(const Date&) const = default;

private:
	std::int32_t days_ = 0;
};

/// Closed interval of days [first, last].
struct DateRange {
	Date first;
	Date last;

	std::int32_t length() const { return last - first + 1; }
	bool contains(Date d) const { return first <= d && d <= last; }
	bool contains(const DateRange& other) const { return first <= other.first && other.last <= last; }
	bool operator==(const DateRange&) const = default;
};

} // namespace eventcast
