#include "eventcast/core/date.hpp"

#include "eventcast/error.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace eventcast {

namespace {

std::chrono::year_month_day to_ymd(Date d) {
	return std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{d.days()}}};
}

int parse_int(std::string_view text, std::string_view whole) {
	int value = 0;
	auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
	if (ec != std::errc{} || ptr != text.data() + text.size()) {
		throw Error(ErrorCode::ParseError, "malformed date '" + std::string(whole) + "'");
	}
	return value;
}

} // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
	const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
	                                      std::chrono::day{day}};
	if (!ymd.ok()) {
		throw Error(ErrorCode::ParseError, "invalid calendar date " + std::to_string(year) + "-" +
		                                       std::to_string(month) + "-" + std::to_string(day));
	}
	return Date(static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count()));
}

Date Date::parse(std::string_view iso) {
	// Tolerate surrounding whitespace and a UTF-8 BOM on the first CSV field.
	while (!iso.empty() && (iso.front() == ' ' || iso.front() == '\t')) iso.remove_prefix(1);
	if (iso.size() >= 3 && static_cast<unsigned char>(iso[0]) == 0xEF) iso.remove_prefix(3);
	while (!iso.empty() && (iso.back() == ' ' || iso.back() == '\r' || iso.back() == '\t')) {
		iso.remove_suffix(1);
	}
	if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
		throw Error(ErrorCode::ParseError, "expected YYYY-MM-DD, got '" + std::string(iso) + "'");
	}
	const int y = parse_int(iso.substr(0, 4), iso);
	const int m = parse_int(iso.substr(5, 2), iso);
	const int d = parse_int(iso.substr(8, 2), iso);
	if (m < 1 || m > 12 || d < 1 || d > 31) {
		throw Error(ErrorCode::ParseError, "invalid date '" + std::string(iso) + "'");
	}
	return from_ymd(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

std::string Date::to_iso() const {
	const auto ymd = to_ymd(*this);
	char buf[16];
	std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
	              static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
	return buf;
}

int Date::year() const { return static_cast<int>(to_ymd(*this).year()); }
unsigned Date::month() const { return static_cast<unsigned>(to_ymd(*this).month()); }
unsigned Date::day() const { return static_cast<unsigned>(to_ymd(*this).day()); }

unsigned Date::weekday() const {
	const std::chrono::weekday wd{std::chrono::sys_days{std::chrono::days{days_}}};
	return wd.iso_encoding() - 1;
}

unsigned Date::day_of_year() const {
	const Date jan1 = from_ymd(year(), 1, 1);
	return static_cast<unsigned>(*this - jan1);
}

} // namespace eventcast
