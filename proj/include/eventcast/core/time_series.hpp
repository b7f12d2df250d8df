#pragma once

#include "eventcast/core/date.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace eventcast {

/// Daily, gap-free series of one target. Index i is start + i days.
class TimeSeries {
public:
	/// Throws InvalidArgument when empty or when any value is non-finite.
	TimeSeries(Date start, std::vector<double> values, std::string name = {});

	Date start() const { return start_; }
	Date end() const { return start_ + static_cast<std::int32_t>(values_.size()) - 1; }
	DateRange range() const { return {start(), end()}; }
	Date date_at(std::size_t i) const { return start_ + static_cast<std::int32_t>(i); }

	std::size_t size() const { return values_.size(); }
	double operator[](std::size_t i) const { return values_[i]; }
	const std::vector<double>& values() const { return values_; }
	std::span<const double> view() const { return values_; }
	const std::string& name() const { return name_; }

	/// Sub-series [begin, end) by index.
	TimeSeries slice(std::size_t begin, std::size_t end) const;
	/// Sub-series covering the given dates, which must lie inside this series.
	TimeSeries slice(const DateRange& range) const;

	bool operator==(const TimeSeries&) const = default;

private:
	Date start_;
	std::vector<double> values_;
	std::string name_;
};

/// Throws NegativeValue if any value is < 0 (raw sales/playtime space).
void require_non_negative(const TimeSeries& series);

enum class TransformKind { None, Log, BoxCox };

struct TransformSpec {
	TransformKind kind = TransformKind::None;
	double lambda = 0.0;

	static TransformSpec none() { return {}; }
	static TransformSpec log() { return {TransformKind::Log, 0.0}; }
	static TransformSpec box_cox(double lambda) { return {TransformKind::BoxCox, lambda}; }

	bool operator==(const TransformSpec&) const = default;
};

double transform_value(double y, const TransformSpec& spec);
double inverse_transform_value(double z, const TransformSpec& spec);

TimeSeries transform(const TimeSeries& series, const TransformSpec& spec);
TimeSeries inverse_transform(const TimeSeries& series, const TransformSpec& spec);

/// Guerrero-style choice of the Box-Cox exponent over {-1, -0.5, 0, 0.5, 1}:
/// minimizes the coefficient of variation of sd/mean^(1-lambda) across
/// consecutive subseries of length `season`.
double guerrero_lambda(const TimeSeries& series, int season = 7);

struct DifferenceSpec {
	int d = 0;
	int seasonal_d = 0;
	int period = 1;

	/// Number of observations consumed: d + D*m.
	int lost() const { return d + seasonal_d * period; }
	/// Coefficients c_0..c_lost of (1-L)^d (1-L^m)^D, c_0 = 1.
	std::vector<double> polynomial() const;
	void validate() const;
};

TimeSeries difference(const TimeSeries& series, const DifferenceSpec& spec);
/// Undoes difference(); `head` holds the first spec.lost() raw values.
TimeSeries integrate(const TimeSeries& diffed, const DifferenceSpec& spec,
                     std::span<const double> head);

/// Sample autocorrelations r_0..r_max_lag (r_0 = 1). Zero variance gives 0 for lags >= 1.
std::vector<double> acf(const TimeSeries& series, int max_lag);
/// Partial autocorrelations by Durbin-Levinson; index = lag, element 0 is 1.
std::vector<double> pacf(const TimeSeries& series, int max_lag);

struct LjungBoxResult {
	double statistic = 0.0;
	int dof = 0;
	double p_value = 1.0;
};

/// Portmanteau test on residuals; `fitted_params` is subtracted from the degrees of freedom.
LjungBoxResult ljung_box(std::span<const double> residuals, int lags, int fitted_params = 0);

} // namespace eventcast
