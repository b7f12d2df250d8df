#pragma once

#include "eventcast/core/time_series.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace eventcast {

struct CsvTable {
	std::vector<std::string> header;
	std::vector<std::vector<std::string>> rows;

	/// Index of a header column; throws ParseError when absent.
	std::size_t column(std::string_view name) const;
};

/// Minimal RFC-4180 reader: header row required, quoted fields allowed, CRLF tolerated.
CsvTable parse_csv(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Parses `date,value` CSV. Rejects gaps (MissingDay names the first missing date),
/// duplicates and out-of-order rows.
TimeSeries parse_series_csv(std::string_view text, std::string name = {});
std::string series_to_csv(const TimeSeries& series);

/// Shortest round-trip decimal text of a double.
std::string format_double(double value);

} // namespace eventcast
