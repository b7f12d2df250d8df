#include "eventcast/features/design_matrix.hpp"

#include "eventcast/error.hpp"

#include <algorithm>
#include <set>

namespace eventcast {

DesignMatrix::DesignMatrix(Date start, std::vector<std::string> columns, Eigen::MatrixXd values)
    : start_(start), columns_(std::move(columns)), values_(std::move(values)) {
	if (static_cast<std::size_t>(values_.cols()) != columns_.size()) {
		throw Error(ErrorCode::DimensionMismatch, "design matrix has " + std::to_string(values_.cols()) +
		                                              " value columns but " + std::to_string(columns_.size()) +
		                                              " names");
	}
}

DesignMatrix DesignMatrix::zeros(const DateRange& range, std::vector<std::string> columns) {
	const auto n = columns.size();
	return DesignMatrix(range.first, std::move(columns),
	                    Eigen::MatrixXd::Zero(range.length(), static_cast<Eigen::Index>(n)));
}

DateRange DesignMatrix::range() const {
	return {start_, start_ + static_cast<std::int32_t>(rows()) - 1};
}

std::optional<std::size_t> DesignMatrix::find(const std::string& column) const {
	const auto it = std::find(columns_.begin(), columns_.end(), column);
	if (it == columns_.end()) return std::nullopt;
	return static_cast<std::size_t>(it - columns_.begin());
}

Eigen::VectorXd DesignMatrix::column(const std::string& name) const {
	const auto idx = find(name);
	if (!idx) throw Error(ErrorCode::MissingCovariate, "no column '" + name + "'", name);
	return values_.col(static_cast<Eigen::Index>(*idx));
}

DesignMatrix DesignMatrix::slice(const DateRange& range) const {
	if (!this->range().contains(range)) {
		throw Error(ErrorCode::DateMismatch, "rows " + range.first.to_iso() + ".." + range.last.to_iso() +
		                                         " outside design matrix");
	}
	const auto begin = range.first - start_;
	return DesignMatrix(range.first, columns_, values_.middleRows(begin, range.length()));
}

DesignMatrix DesignMatrix::select(const std::vector<std::string>& columns) const {
	Eigen::MatrixXd out(values_.rows(), static_cast<Eigen::Index>(columns.size()));
	for (std::size_t j = 0; j < columns.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = column(columns[j]);
	return DesignMatrix(start_, columns, std::move(out));
}

bool DesignMatrix::operator==(const DesignMatrix& other) const {
	return start_ == other.start_ && columns_ == other.columns_ && values_.rows() == other.values_.rows() &&
	       values_.cols() == other.values_.cols() && values_ == other.values_;
}

std::string game_event_column(const std::string& subtype) { return "event_" + subtype; }

std::vector<std::string> event_columns(const EventCalendar& calendar) {
	std::vector<std::string> cols{"gacha", "promotion", "marketing", "holiday"};
	for (const auto& s : calendar.vocabulary()) cols.push_back(game_event_column(s));
	if (calendar.has_temperature()) cols.emplace_back("temperature");
	return cols;
}

namespace {

std::size_t column_for(const EventRecord& r, const std::vector<std::string>& cols) {
	std::string name;
	switch (r.type) {
	case EventType::Gacha: name = "gacha"; break;
	case EventType::Promotion: name = "promotion"; break;
	case EventType::Marketing: name = "marketing"; break;
	case EventType::Holiday: name = "holiday"; break;
	case EventType::GameEvent: name = game_event_column(r.subtype); break;
	}
	return static_cast<std::size_t>(std::find(cols.begin(), cols.end(), name) - cols.begin());
}

} // namespace

DesignMatrix encode_calendar(const EventCalendar& calendar, const DateRange& range, const EncodingConfig& config) {
	if (range.length() < 1) throw Error(ErrorCode::InvalidArgument, "empty encoding range");
	if (!calendar.has_range() || !calendar.range().contains(range)) {
		throw Error(ErrorCode::RangeOutsideCalendar,
		            "range " + range.first.to_iso() + ".." + range.last.to_iso() + " not covered by calendar");
	}
	auto cols = event_columns(calendar);
	const std::size_t n_events = cols.size() - (calendar.has_temperature() ? 1 : 0);
	Eigen::MatrixXd values = Eigen::MatrixXd::Zero(range.length(), static_cast<Eigen::Index>(cols.size()));

	for (const auto& r : calendar.records()) {
		if (r.date > range.last) continue;
		const auto profile = decay_profile(r.type, r.scale, config);
		const auto col = static_cast<Eigen::Index>(column_for(r, cols));
		for (std::size_t t = 0; t < profile.size(); ++t) {
			const Date d = r.date + static_cast<std::int32_t>(t);
			if (range.contains(d)) values(d - range.first, col) += std::max(0.0, profile[t]);
		}
	}
	values.leftCols(static_cast<Eigen::Index>(n_events)) =
	    values.leftCols(static_cast<Eigen::Index>(n_events)).cwiseMin(config.cap);

	if (calendar.has_temperature()) {
		const auto tcol = static_cast<Eigen::Index>(cols.size() - 1);
		for (Date d = range.first; d <= range.last; d += 1) {
			const auto t = calendar.temperature(d);
			if (!t) {
				throw Error(ErrorCode::RangeOutsideCalendar, "no temperature for " + d.to_iso(), "temperature");
			}
			values(d - range.first, tcol) = *t;
		}
	}
	return DesignMatrix(range.first, std::move(cols), std::move(values));
}

DesignMatrix calendar_features(const DateRange& range, bool one_hot) {
	if (range.length() < 1) throw Error(ErrorCode::InvalidArgument, "empty calendar range");
	std::vector<std::string> cols{"day_of_week", "month", "day_of_year"};
	if (one_hot) {
		for (int i = 0; i < 7; ++i) cols.push_back("dow_" + std::to_string(i));
		for (int i = 1; i <= 12; ++i) cols.push_back("month_" + std::to_string(i));
	}
	Eigen::MatrixXd values = Eigen::MatrixXd::Zero(range.length(), static_cast<Eigen::Index>(cols.size()));
	for (Date d = range.first; d <= range.last; d += 1) {
		const auto row = d - range.first;
		const unsigned dow = d.weekday();
		const unsigned month = d.month();
		values(row, 0) = dow;
		values(row, 1) = month;
		values(row, 2) = d.day_of_year();
		if (one_hot) {
			values(row, 3 + dow) = 1.0;
			values(row, 10 + month - 1) = 1.0;
		}
	}
	return DesignMatrix(range.first, std::move(cols), std::move(values));
}

DesignMatrix join_covariates(const DesignMatrix& base, const DesignMatrix& extra) {
	if (extra.cols() == 0) return base;
	if (base.cols() == 0 && base.rows() == 0) return extra;
	if (base.start() != extra.start() || base.rows() != extra.rows()) {
		throw Error(ErrorCode::DateMismatch, "cannot join matrices over different date ranges");
	}
	auto cols = base.columns();
	std::set<std::string> used(cols.begin(), cols.end());
	for (const auto& name : extra.columns()) {
		std::string unique = name;
		for (int k = 2; used.contains(unique); ++k) unique = name + "_" + std::to_string(k);
		used.insert(unique);
		cols.push_back(unique);
	}
	Eigen::MatrixXd values(static_cast<Eigen::Index>(base.rows()), static_cast<Eigen::Index>(cols.size()));
	values << base.values(), extra.values();
	return DesignMatrix(base.start(), std::move(cols), std::move(values));
}

DesignMatrix align_columns(const DesignMatrix& matrix, const std::vector<std::string>& columns) {
	for (std::size_t j = 0; j < matrix.cols(); ++j) {
		const auto& name = matrix.columns()[j];
		if (std::find(columns.begin(), columns.end(), name) == columns.end() &&
		    !matrix.values().col(static_cast<Eigen::Index>(j)).isZero(0.0)) {
			throw Error(ErrorCode::ColumnMismatch, "covariate '" + name + "' unknown to the model", name);
		}
	}
	Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(matrix.rows()),
	                                            static_cast<Eigen::Index>(columns.size()));
	for (std::size_t j = 0; j < columns.size(); ++j) {
		if (const auto idx = matrix.find(columns[j])) {
			out.col(static_cast<Eigen::Index>(j)) = matrix.values().col(static_cast<Eigen::Index>(*idx));
		}
	}
	return DesignMatrix(matrix.start(), columns, std::move(out));
}

} // namespace eventcast
