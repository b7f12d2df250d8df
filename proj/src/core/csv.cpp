#include "eventcast/core/csv.hpp"

#include "eventcast/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace eventcast {

std::size_t CsvTable::column(std::string_view name) const {
	for (std::size_t i = 0; i < header.size(); ++i) {
		if (header[i] == name) return i;
	}
	throw Error(ErrorCode::ParseError, "missing CSV column '" + std::string(name) + "'", std::string(name));
}

namespace {

std::string trim(std::string_view s) {
	while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
	while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
	return std::string(s);
}

std::vector<std::string> split_line(std::string_view line) {
	std::vector<std::string> fields;
	std::string field;
	bool quoted = false;
	for (std::size_t i = 0; i < line.size(); ++i) {
		const char c = line[i];
		if (quoted) {
			if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
				field += '"';
				++i;
			} else if (c == '"') {
				quoted = false;
			} else {
				field += c;
			}
		} else if (c == '"') {
			quoted = true;
		} else if (c == ',') {
			fields.push_back(trim(field));
			field.clear();
		} else {
			field += c;
		}
	}
	if (quoted) throw Error(ErrorCode::ParseError, "unterminated quote in CSV line");
	fields.push_back(trim(field));
	return fields;
}

double parse_double(const std::string& text, std::size_t line) {
	double value = 0.0;
	auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
	if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
		throw Error(ErrorCode::ParseError,
		            "line " + std::to_string(line) + ": not a number '" + text + "'", "value");
	}
	return value;
}

} // namespace

CsvTable parse_csv(std::string_view text) {
	if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
	    static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF) {
		text.remove_prefix(3);
	}
	CsvTable table;
	bool have_header = false;
	std::size_t pos = 0;
	while (pos <= text.size()) {
		const std::size_t nl = text.find('\n', pos);
		const std::string_view line =
		    text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
		pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
		if (trim(line).empty()) continue;
		auto fields = split_line(line);
		if (!have_header) {
			table.header = std::move(fields);
			have_header = true;
		} else {
			if (fields.size() != table.header.size()) {
				throw Error(ErrorCode::ParseError, "row " + std::to_string(table.rows.size() + 2) + " has " +
				                                       std::to_string(fields.size()) + " fields, expected " +
				                                       std::to_string(table.header.size()));
			}
			table.rows.push_back(std::move(fields));
		}
	}
	if (!have_header) throw Error(ErrorCode::ParseError, "empty CSV: header row required");
	return table;
}

std::string read_text_file(const std::filesystem::path& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) throw Error(ErrorCode::NotFound, "cannot open " + path.string());
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
	out << text;
}

TimeSeries parse_series_csv(std::string_view text, std::string name) {
	const auto table = parse_csv(text);
	if (table.header.size() != 2 || table.header[0] != "date") {
		throw Error(ErrorCode::ParseError, "series CSV must have header 'date,value'");
	}
	if (table.rows.empty()) throw Error(ErrorCode::EmptyData, "series CSV has no rows");

	const Date start = Date::parse(table.rows.front()[0]);
	std::vector<double> values;
	values.reserve(table.rows.size());
	Date expected = start;
	for (std::size_t i = 0; i < table.rows.size(); ++i) {
		const Date d = Date::parse(table.rows[i][0]);
		if (d > expected) {
			throw Error(ErrorCode::MissingDay, "missing date " + expected.to_iso(), expected.to_iso());
		}
		if (d < expected) {
			throw Error(ErrorCode::ParseError, "date " + d.to_iso() + " duplicated or out of order", "date");
		}
		values.push_back(parse_double(table.rows[i][1], i + 2));
		expected += 1;
	}
	if (name.empty()) name = table.header[1];
	return TimeSeries(start, std::move(values), std::move(name));
}

std::string format_double(double value) {
	char buf[64];
	auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
	return std::string(buf, ptr);
}

std::string series_to_csv(const TimeSeries& series) {
	std::string out = "date," + (series.name().empty() ? std::string("value") : series.name()) + "\n";
	for (std::size_t i = 0; i < series.size(); ++i) {
		out += series.date_at(i).to_iso();
		out += ',';
		out += format_double(series[i]);
		out += '\n';
	}
	return out;
}

} // namespace eventcast
