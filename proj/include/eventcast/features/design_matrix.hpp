#pragma once

#include "eventcast/core/date.hpp"
#include "eventcast/features/calendar.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace eventcast {

/// Per-day covariate rows over a contiguous date range.
class DesignMatrix {
public:
	DesignMatrix() = default;
	/// Throws DimensionMismatch when the value width differs from the column count.
	DesignMatrix(Date start, std::vector<std::string> columns, Eigen::MatrixXd values);
	/// All-zero matrix with the given columns.
	static DesignMatrix zeros(const DateRange& range, std::vector<std::string> columns);

	Date start() const { return start_; }
	std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
	std::size_t cols() const { return columns_.size(); }
	DateRange range() const;
	Date date_at(std::size_t i) const { return start_ + static_cast<std::int32_t>(i); }

	const std::vector<std::string>& columns() const { return columns_; }
	const Eigen::MatrixXd& values() const { return values_; }
	Eigen::MatrixXd& values() { return values_; }

	std::optional<std::size_t> find(const std::string& column) const;
	/// Column by name; throws MissingCovariate.
	Eigen::VectorXd column(const std::string& name) const;

	/// Rows covering `range` (must lie inside this matrix).
	DesignMatrix slice(const DateRange& range) const;
	/// Keeps only the named columns, in the given order; throws MissingCovariate.
	DesignMatrix select(const std::vector<std::string>& columns) const;

	bool operator==(const DesignMatrix& other) const;

private:
	Date start_{};
	std::vector<std::string> columns_;
	Eigen::MatrixXd values_;
};

/// Column names produced by encode_calendar for this calendar, in order.
std::vector<std::string> event_columns(const EventCalendar& calendar);
std::string game_event_column(const std::string& subtype);

/// Step-function encoding of events over `range`; decays from earlier events carry over.
DesignMatrix encode_calendar(const EventCalendar& calendar, const DateRange& range,
                             const EncodingConfig& config = {});

/// day_of_week (Monday = 0), month (1..12), day_of_year, and optionally their one-hot
/// expansions dow_0..dow_6 and month_1..month_12.
DesignMatrix calendar_features(const DateRange& range, bool one_hot = true);

/// Column-wise concatenation. Repeated names get _2, _3, ... suffixes.
DesignMatrix join_covariates(const DesignMatrix& base, const DesignMatrix& extra);

/// Reorders `matrix` onto `columns`. Missing columns become zero; extra columns with any
/// non-zero entry throw ColumnMismatch.
DesignMatrix align_columns(const DesignMatrix& matrix, const std::vector<std::string>& columns);

} // namespace eventcast
