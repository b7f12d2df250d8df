#include "eventcast/core/time_series.hpp"

#include "eventcast/error.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace eventcast {

TimeSeries::TimeSeries(Date start, std::vector<double> values, std::string name)
    : start_(start), values_(std::move(values)), name_(std::move(name)) {
	if (values_.empty()) {
		throw Error(ErrorCode::InvalidArgument, "time series must contain at least one value");
	}
	for (std::size_t i = 0; i < values_.size(); ++i) {
		if (!std::isfinite(values_[i])) {
			throw Error(ErrorCode::InvalidArgument,
			            "non-finite value at " + date_at(i).to_iso() + " in series '" + name_ + "'");
		}
	}
}

TimeSeries TimeSeries::slice(std::size_t begin, std::size_t end) const {
	if (begin >= end || end > values_.size()) {
		throw Error(ErrorCode::InvalidArgument, "slice [" + std::to_string(begin) + ", " +
		                                            std::to_string(end) + ") out of bounds");
	}
	return TimeSeries(date_at(begin),
	                  std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(begin),
	                                      values_.begin() + static_cast<std::ptrdiff_t>(end)),
	                  name_);
}

TimeSeries TimeSeries::slice(const DateRange& range) const {
	if (!this->range().contains(range)) {
		throw Error(ErrorCode::InvalidArgument, "requested dates " + range.first.to_iso() + ".." +
		                                            range.last.to_iso() + " outside series");
	}
	const auto begin = static_cast<std::size_t>(range.first - start_);
	return slice(begin, begin + static_cast<std::size_t>(range.length()));
}

void require_non_negative(const TimeSeries& series) {
	for (std::size_t i = 0; i < series.size(); ++i) {
		if (series[i] < 0.0) {
			throw Error(ErrorCode::NegativeValue, "negative value at " + series.date_at(i).to_iso());
		}
	}
}

double transform_value(double y, const TransformSpec& spec) {
	switch (spec.kind) {
	case TransformKind::None:
		return y;
	case TransformKind::Log:
		if (y <= 0.0) throw Error(ErrorCode::NonPositiveValue, "log transform of " + std::to_string(y));
		return std::log(y);
	case TransformKind::BoxCox:
		if (!std::isfinite(spec.lambda)) throw Error(ErrorCode::InvalidArgument, "Box-Cox lambda not finite");
		if (spec.lambda <= 0.0 ? y <= 0.0 : y < 0.0) {
			throw Error(ErrorCode::NonPositiveValue, "Box-Cox transform of " + std::to_string(y));
		}
		if (spec.lambda == 0.0) return std::log(y);
		if (y == 0.0) return -1.0 / spec.lambda;
		return std::expm1(spec.lambda * std::log(y)) / spec.lambda;
	}
	return y;
}

double inverse_transform_value(double z, const TransformSpec& spec) {
	switch (spec.kind) {
	case TransformKind::None:
		return z;
	case TransformKind::Log:
		return std::exp(z);
	case TransformKind::BoxCox: {
		if (spec.lambda == 0.0) return std::exp(z);
		const double base = 1.0 + spec.lambda * z;
		if (base < 0.0 || (base == 0.0 && spec.lambda < 0.0)) {
			throw Error(ErrorCode::DomainError, "inverse Box-Cox undefined for " + std::to_string(z) +
			                                        " at lambda " + std::to_string(spec.lambda));
		}
		if (base == 0.0) return 0.0;
		return std::exp(std::log1p(spec.lambda * z) / spec.lambda);
	}
	}
	return z;
}

TimeSeries transform(const TimeSeries& series, const TransformSpec& spec) {
	std::vector<double> out(series.size());
	std::transform(series.values().begin(), series.values().end(), out.begin(),
	               [&](double y) { return transform_value(y, spec); });
	return TimeSeries(series.start(), std::move(out), series.name());
}

TimeSeries inverse_transform(const TimeSeries& series, const TransformSpec& spec) {
	std::vector<double> out(series.size());
	std::transform(series.values().begin(), series.values().end(), out.begin(),
	               [&](double z) { return inverse_transform_value(z, spec); });
	return TimeSeries(series.start(), std::move(out), series.name());
}

double guerrero_lambda(const TimeSeries& series, int season) {
	if (season < 2) throw Error(ErrorCode::InvalidArgument, "season must be >= 2");
	const auto& y = series.values();
	for (double v : y) {
		if (v <= 0.0) throw Error(ErrorCode::NonPositiveValue, "Box-Cox lambda search needs positive data");
	}
	const std::size_t groups = y.size() / static_cast<std::size_t>(season);
	if (groups < 2) throw Error(ErrorCode::SeriesTooShort, "need at least two complete seasons");

	std::vector<double> means(groups), sds(groups);
	for (std::size_t g = 0; g < groups; ++g) {
		const auto first = y.begin() + static_cast<std::ptrdiff_t>(g * season);
		const double mean = std::accumulate(first, first + season, 0.0) / season;
		double ss = 0.0;
		for (auto it = first; it != first + season; ++it) ss += (*it - mean) * (*it - mean);
		means[g] = mean;
		sds[g] = std::sqrt(ss / (season - 1));
	}

	constexpr std::array<double, 5> grid{-1.0, -0.5, 0.0, 0.5, 1.0};
	double best_lambda = 1.0;
	double best_cv = std::numeric_limits<double>::infinity();
	for (double lambda : grid) {
		std::vector<double> ratio(groups);
		for (std::size_t g = 0; g < groups; ++g) ratio[g] = sds[g] / std::pow(means[g], 1.0 - lambda);
		const double mean = std::accumulate(ratio.begin(), ratio.end(), 0.0) / groups;
		double ss = 0.0;
		for (double r : ratio) ss += (r - mean) * (r - mean);
		const double cv = mean > 0.0 ? std::sqrt(ss / (groups - 1)) / mean : 0.0;
		if (cv < best_cv) {
			best_cv = cv;
			best_lambda = lambda;
		}
	}
	return best_lambda;
}

void DifferenceSpec::validate() const {
	if (d < 0 || d > 2) throw Error(ErrorCode::InvalidArgument, "d must be in [0, 2]");
	if (seasonal_d < 0 || seasonal_d > 1) throw Error(ErrorCode::InvalidArgument, "D must be in [0, 1]");
	if (period < 1) throw Error(ErrorCode::InvalidArgument, "season length must be >= 1");
}

std::vector<double> DifferenceSpec::polynomial() const {
	std::vector<double> poly{1.0};
	auto multiply = [&poly](int lag) {
		std::vector<double> next(poly.size() + static_cast<std::size_t>(lag), 0.0);
		for (std::size_t i = 0; i < poly.size(); ++i) {
			next[i] += poly[i];
			next[i + static_cast<std::size_t>(lag)] -= poly[i];
		}
		poly = std::move(next);
	};
	for (int i = 0; i < d; ++i) multiply(1);
	for (int i = 0; i < seasonal_d; ++i) multiply(period);
	return poly;
}

TimeSeries difference(const TimeSeries& series, const DifferenceSpec& spec) {
	spec.validate();
	const auto lost = static_cast<std::size_t>(spec.lost());
	if (series.size() <= lost) {
		throw Error(ErrorCode::SeriesTooShort, "differencing needs more than " + std::to_string(lost) +
		                                           " observations, got " + std::to_string(series.size()));
	}
	const auto poly = spec.polynomial();
	std::vector<double> out(series.size() - lost);
	for (std::size_t t = lost; t < series.size(); ++t) {
		double acc = 0.0;
		for (std::size_t k = 0; k < poly.size(); ++k) acc += poly[k] * series[t - k];
		out[t - lost] = acc;
	}
	return TimeSeries(series.start() + static_cast<std::int32_t>(lost), std::move(out), series.name());
}

TimeSeries integrate(const TimeSeries& diffed, const DifferenceSpec& spec, std::span<const double> head) {
	spec.validate();
	const auto lost = static_cast<std::size_t>(spec.lost());
	if (head.size() != lost) {
		throw Error(ErrorCode::HeadLengthMismatch, "expected " + std::to_string(lost) +
		                                               " head values, got " + std::to_string(head.size()));
	}
	const auto poly = spec.polynomial();
	std::vector<double> y(head.begin(), head.end());
	y.reserve(lost + diffed.size());
	for (std::size_t i = 0; i < diffed.size(); ++i) {
		const std::size_t t = lost + i;
		double acc = diffed[i];
		for (std::size_t k = 1; k < poly.size(); ++k) acc -= poly[k] * y[t - k];
		y.push_back(acc);
	}
	return TimeSeries(diffed.start() - static_cast<std::int32_t>(lost), std::move(y), diffed.name());
}

std::vector<double> acf(const TimeSeries& series, int max_lag) {
	if (max_lag < 1) throw Error(ErrorCode::InvalidArgument, "max_lag must be positive");
	const std::size_t n = series.size();
	if (static_cast<std::size_t>(max_lag) >= n) {
		throw Error(ErrorCode::LagTooLarge, "max_lag " + std::to_string(max_lag) + " >= length " +
		                                        std::to_string(n));
	}
	const auto& y = series.values();
	const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
	double denom = 0.0;
	for (double v : y) denom += (v - mean) * (v - mean);

	std::vector<double> r(static_cast<std::size_t>(max_lag) + 1, 0.0);
	r[0] = 1.0;
	const double scale = std::max(std::abs(mean), 1.0);
	if (denom <= 1e-24 * scale * scale * static_cast<double>(n)) return r;
	for (int k = 1; k <= max_lag; ++k) {
		double acc = 0.0;
		for (std::size_t t = 0; t + static_cast<std::size_t>(k) < n; ++t) {
			acc += (y[t] - mean) * (y[t + static_cast<std::size_t>(k)] - mean);
		}
		r[static_cast<std::size_t>(k)] = std::clamp(acc / denom, -1.0, 1.0);
	}
	return r;
}

std::vector<double> pacf(const TimeSeries& series, int max_lag) {
	if (max_lag < 1) throw Error(ErrorCode::InvalidArgument, "max_lag must be positive");
	if (2 * static_cast<std::size_t>(max_lag) >= series.size()) {
		throw Error(ErrorCode::LagTooLarge, "pacf needs max_lag < length/2");
	}
	const auto r = acf(series, max_lag);
	std::vector<double> out(static_cast<std::size_t>(max_lag) + 1, 0.0);
	out[0] = 1.0;
	out[1] = r[1];
	std::vector<double> phi{r[1]};
	for (int k = 2; k <= max_lag; ++k) {
		double num = r[static_cast<std::size_t>(k)];
		double den = 1.0;
		for (int j = 1; j < k; ++j) {
			num -= phi[static_cast<std::size_t>(j - 1)] * r[static_cast<std::size_t>(k - j)];
			den -= phi[static_cast<std::size_t>(j - 1)] * r[static_cast<std::size_t>(j)];
		}
		const double kk = std::abs(den) < 1e-15 ? 0.0 : std::clamp(num / den, -1.0, 1.0);
		std::vector<double> next(static_cast<std::size_t>(k));
		for (int j = 1; j < k; ++j) {
			next[static_cast<std::size_t>(j - 1)] =
			    phi[static_cast<std::size_t>(j - 1)] - kk * phi[static_cast<std::size_t>(k - j - 1)];
		}
		next[static_cast<std::size_t>(k - 1)] = kk;
		phi = std::move(next);
		out[static_cast<std::size_t>(k)] = kk;
	}
	return out;
}

LjungBoxResult ljung_box(std::span<const double> residuals, int lags, int fitted_params) {
	const int dof = lags - fitted_params;
	if (dof < 1) throw Error(ErrorCode::InvalidArgument, "Ljung-Box needs lags > fitted parameters");
	TimeSeries series(Date{}, std::vector<double>(residuals.begin(), residuals.end()));
	const auto r = acf(series, lags);
	const double n = static_cast<double>(residuals.size());
	double q = 0.0;
	for (int k = 1; k <= lags; ++k) q += r[static_cast<std::size_t>(k)] * r[static_cast<std::size_t>(k)] / (n - k);
	q *= n * (n + 2.0);
	return {q, dof, boost::math::gamma_q(dof / 2.0, q / 2.0)};
}

} // namespace eventcast
