#include "eventcast/models/arima.hpp"

#include "eventcast/core/json_io.hpp"
#include "eventcast/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace eventcast::arima {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void ArimaOrder::validate() const {
	auto in = [](int v, int lo, int hi) { return v >= lo && v <= hi; };
	if (!in(p, 0, 5) || !in(q, 0, 5) || !in(P, 0, 5) || !in(Q, 0, 5)) {
		throw Error(ErrorCode::InvalidArgument, "ARMA orders must lie in [0, 5]: " + to_string(), "order");
	}
	if (!in(d, 0, 2) || !in(D, 0, 1) || m < 1) {
		throw Error(ErrorCode::InvalidArgument, "need d <= 2, D <= 1, m >= 1: " + to_string(), "order");
	}
}

std::string ArimaOrder::to_string() const {
	return "(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")(" + std::to_string(P) +
	       "," + std::to_string(D) + "," + std::to_string(Q) + ")_" + std::to_string(m);
}

ArimaOrder preset_order(std::string_view name) {
	if (name == "aoi_sales") return {2, 1, 1, 1, 1, 1, 7};
	if (name == "gs_sales") return {2, 1, 1, 1, 0, 1, 7};
	if (name == "aoi_playtime") return {2, 1, 2, 1, 1, 1, 7};
	if (name == "gs_playtime") return {1, 1, 1, 1, 1, 1, 7};
	throw Error(ErrorCode::InvalidArgument, "unknown ARIMA preset '" + std::string(name) + "'", "preset");
}

std::vector<double> constrain_ar(std::span<const double> raw) {
	const std::size_t p = raw.size();
	std::vector<double> out(p), work(p);
	for (std::size_t i = 0; i < p; ++i) out[i] = std::tanh(raw[i]);
	work = out;
	for (std::size_t j = 1; j < p; ++j) {
		const double a = out[j];
		for (std::size_t k = 0; k < j; ++k) work[k] -= a * out[j - k - 1];
		std::copy(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(j), out.begin());
	}
	return out;
}

namespace {

// Step-down (reverse Durbin-Levinson) to partial autocorrelations.
std::optional<std::vector<double>> to_partials(std::span<const double> coefficients) {
	const std::size_t p = coefficients.size();
	std::vector<double> cur(coefficients.begin(), coefficients.end()), work(p);
	for (std::size_t j = p; j-- > 1;) {
		const double a = cur[j];
		if (!(std::abs(a) < 1.0)) return std::nullopt;
		for (std::size_t k = 0; k < j; ++k) work[k] = (cur[k] + a * cur[j - k - 1]) / (1.0 - a * a);
		std::copy(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(j), cur.begin());
	}
	if (p > 0 && !(std::abs(cur[0]) < 1.0)) return std::nullopt;
	return cur;
}

} // namespace

std::optional<std::vector<double>> unconstrain_ar(std::span<const double> coefficients) {
	auto partials = to_partials(coefficients);
	if (!partials) return std::nullopt;
	for (double& v : *partials) v = std::atanh(v);
	return partials;
}

bool is_stationary(std::span<const double> coefficients) {
	const auto partials = to_partials(coefficients);
	if (!partials) return false;
	return std::all_of(partials->begin(), partials->end(), [](double v) { return std::abs(v) < 1.0 - 1e-10; });
}

namespace {

std::vector<double> multiply_lag_polys(const std::vector<double>& a, const std::vector<double>& b, int m, double sign) {
	// (1 + sign*sum a_i L^i)(1 + sign*sum b_j L^{jm}); returns coefficients of L^1.. (sign applied back).
	const std::size_t n = a.size() + b.size() * static_cast<std::size_t>(m);
	std::vector<double> left(n + 1, 0.0), right(n + 1, 0.0), prod(n + 1, 0.0);
	left[0] = right[0] = 1.0;
	for (std::size_t i = 0; i < a.size(); ++i) left[i + 1] = sign * a[i];
	for (std::size_t j = 0; j < b.size(); ++j) right[(j + 1) * static_cast<std::size_t>(m)] = sign * b[j];
	for (std::size_t i = 0; i <= n; ++i) {
		if (left[i] == 0.0) continue;
		for (std::size_t j = 0; i + j <= n; ++j) prod[i + j] += left[i] * right[j];
	}
	std::vector<double> out(n);
	for (std::size_t k = 1; k <= n; ++k) out[k - 1] = sign * prod[k];
	return out;
}

struct Coefficients {
	std::vector<double> ar, ma, sar, sma;
};

std::vector<double> negate(std::vector<double> v) {
	for (double& x : v) x = -x;
	return v;
}

Coefficients unpack(std::span<const double> raw, const ArimaOrder& o) {
	const auto p = static_cast<std::size_t>(o.p), q = static_cast<std::size_t>(o.q),
	           P = static_cast<std::size_t>(o.P), Q = static_cast<std::size_t>(o.Q);
	return {constrain_ar(raw.subspan(0, p)), negate(constrain_ar(raw.subspan(p, q))),
	        constrain_ar(raw.subspan(p + q, P)), negate(constrain_ar(raw.subspan(p + q + P, Q)))};
}

std::vector<double> pack(const Coefficients& c) {
	std::vector<double> raw;
	auto append = [&raw](const std::vector<double>& coefs, bool ma) {
		auto u = unconstrain_ar(ma ? negate(coefs) : coefs);
		if (!u) u = std::vector<double>(coefs.size(), 0.0);
		for (double& v : *u) v = std::clamp(v, -3.0, 3.0);
		raw.insert(raw.end(), u->begin(), u->end());
	};
	append(c.ar, false);
	append(c.ma, true);
	append(c.sar, false);
	append(c.sma, true);
	return raw;
}

// Shrinks a coefficient vector until it is stationary, or zeroes it.
std::vector<double> make_stationary(std::vector<double> c) {
	for (int i = 0; i < 20 && !is_stationary(c); ++i) {
		for (double& v : c) v *= 0.9;
	}
	if (!is_stationary(c)) std::fill(c.begin(), c.end(), 0.0);
	return c;
}

// Conditional residual filter applied to every column of `m` at once.
RowMatrix css_filter(const RowMatrix& m, const std::vector<double>& a, const std::vector<double>& b, int cond) {
	RowMatrix e = RowMatrix::Zero(m.rows(), m.cols());
	for (Eigen::Index t = cond; t < m.rows(); ++t) {
		auto row = e.row(t);
		row = m.row(t);
		for (std::size_t i = 0; i < a.size(); ++i) row -= a[i] * m.row(t - 1 - static_cast<Eigen::Index>(i));
		for (std::size_t j = 0; j < b.size(); ++j) {
			const Eigen::Index s = t - 1 - static_cast<Eigen::Index>(j);
			if (s < 0) break;
			row -= b[j] * e.row(s);
		}
	}
	return e;
}

struct CssProblem {
	ArimaOrder order;
	RowMatrix data; // column 0: differenced target; then regressors (and constant)
	int cond = 0;

	Eigen::Index n_eff() const { return data.rows() - cond; }
	Eigen::Index k() const { return data.cols() - 1; }

	struct Evaluation {
		double ssr = 0.0;
		Eigen::VectorXd beta;
		Eigen::VectorXd residuals;
	};

	Evaluation evaluate(const Coefficients& c) const {
		FittedArima shell;
		shell.order = order;
		shell.ar = c.ar;
		shell.ma = c.ma;
		shell.seasonal_ar = c.sar;
		shell.seasonal_ma = c.sma;
		const auto e = css_filter(data, shell.expanded_ar(), shell.expanded_ma(), cond);
		const auto tail = e.bottomRows(n_eff());
		Evaluation out;
		if (k() == 0) {
			out.residuals = tail.col(0);
		} else {
			const Eigen::MatrixXd fu = tail.rightCols(k());
			const Eigen::VectorXd fw = tail.col(0);
			out.beta = (fu.transpose() * fu).ldlt().solve(fu.transpose() * fw);
			out.residuals = fw - fu * out.beta;
		}
		out.ssr = out.residuals.squaredNorm();
		return out;
	}

	double objective(std::span<const double> raw) const {
		const double ssr = evaluate(unpack(raw, order)).ssr;
		return 0.5 * std::log(std::max(ssr, 1e-300) / static_cast<double>(n_eff()));
	}
};

Eigen::VectorXd least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
	return x.colPivHouseholderQr().solve(y);
}

// Levinson-Durbin solution of the Yule-Walker equations.
std::vector<double> yule_walker(const Eigen::VectorXd& e, int order) {
	const Eigen::Index n = e.size();
	const double mean = e.mean();
	std::vector<double> gamma(static_cast<std::size_t>(order) + 1, 0.0);
	for (int k = 0; k <= order; ++k) {
		double acc = 0.0;
		for (Eigen::Index t = k; t < n; ++t) acc += (e[t] - mean) * (e[t - k] - mean);
		gamma[static_cast<std::size_t>(k)] = acc / static_cast<double>(n);
	}
	std::vector<double> phi;
	if (gamma[0] <= 0.0) return std::vector<double>(static_cast<std::size_t>(order), 0.0);
	double v = gamma[0];
	for (int k = 1; k <= order; ++k) {
		double num = gamma[static_cast<std::size_t>(k)];
		for (int j = 1; j < k; ++j) num -= phi[static_cast<std::size_t>(j - 1)] * gamma[static_cast<std::size_t>(k - j)];
		const double kk = num / v;
		std::vector<double> next(static_cast<std::size_t>(k));
		for (int j = 1; j < k; ++j) {
			next[static_cast<std::size_t>(j - 1)] =
			    phi[static_cast<std::size_t>(j - 1)] - kk * phi[static_cast<std::size_t>(k - j - 1)];
		}
		next[static_cast<std::size_t>(k - 1)] = kk;
		phi = std::move(next);
		v *= (1.0 - kk * kk);
		if (v <= 0.0) break;
	}
	phi.resize(static_cast<std::size_t>(order), 0.0);
	return phi;
}

// Hannan-Rissanen: long-AR residual proxy, then OLS on lagged values and proxy residuals.
Coefficients hannan_rissanen(const CssProblem& problem) {
	const auto& o = problem.order;
	Coefficients c{std::vector<double>(static_cast<std::size_t>(o.p), 0.0),
	               std::vector<double>(static_cast<std::size_t>(o.q), 0.0),
	               std::vector<double>(static_cast<std::size_t>(o.P), 0.0),
	               std::vector<double>(static_cast<std::size_t>(o.Q), 0.0)};
	if (o.p + o.q == 0) return c;

	Eigen::VectorXd e = problem.data.col(0);
	if (problem.k() > 0) {
		const Eigen::MatrixXd u = problem.data.rightCols(problem.k());
		e -= u * least_squares(u, e);
	}
	const Eigen::Index n = e.size();
	const int long_order = o.q == 0 ? 0 : static_cast<int>(std::min<Eigen::Index>(std::max(o.p + o.q + 5, 10), n / 4));
	Eigen::VectorXd proxy = Eigen::VectorXd::Zero(n);
	if (long_order > 0) {
		const auto phi = yule_walker(e, long_order);
		for (Eigen::Index t = long_order; t < n; ++t) {
			double acc = e[t];
			for (int i = 1; i <= long_order; ++i) acc -= phi[static_cast<std::size_t>(i - 1)] * e[t - i];
			proxy[t] = acc;
		}
	}
	const Eigen::Index start = long_order + std::max(o.p, o.q);
	const Eigen::Index rows = n - start;
	if (rows <= o.p + o.q + 2) return c;
	Eigen::MatrixXd x(rows, o.p + o.q);
	for (Eigen::Index t = start; t < n; ++t) {
		for (int i = 0; i < o.p; ++i) x(t - start, i) = e[t - 1 - i];
		for (int j = 0; j < o.q; ++j) x(t - start, o.p + j) = proxy[t - 1 - j];
	}
	const Eigen::VectorXd beta = least_squares(x, e.tail(rows));
	for (int i = 0; i < o.p; ++i) c.ar[static_cast<std::size_t>(i)] = beta[i];
	for (int j = 0; j < o.q; ++j) c.ma[static_cast<std::size_t>(j)] = beta[o.p + j];
	c.ar = make_stationary(c.ar);
	c.ma = negate(make_stationary(negate(c.ma)));
	return c;
}

Eigen::MatrixXd difference_columns(const Eigen::MatrixXd& x, const DifferenceSpec& spec) {
	const auto poly = spec.polynomial();
	const Eigen::Index lost = spec.lost();
	Eigen::MatrixXd out(x.rows() - lost, x.cols());
	for (Eigen::Index t = lost; t < x.rows(); ++t) {
		Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(x.cols());
		for (std::size_t k = 0; k < poly.size(); ++k) acc += poly[k] * x.row(t - static_cast<Eigen::Index>(k));
		out.row(t - lost) = acc;
	}
	return out;
}

} // namespace

std::vector<double> FittedArima::expanded_ar() const { return multiply_lag_polys(ar, seasonal_ar, order.m, -1.0); }

std::vector<double> FittedArima::expanded_ma() const { return multiply_lag_polys(ma, seasonal_ma, order.m, 1.0); }

int FittedArima::parameter_count() const {
	return order.arma_params() + static_cast<int>(regression.size()) + (constant ? 1 : 0) + 1;
}

FittedArima fit_arima(const TimeSeries& series, const ArimaOrder& order, const DesignMatrix* covariates,
                      const FitOptions& options) {
	order.validate();
	const DifferenceSpec diff = order.differencing();
	const bool use_constant = options.include_constant.value_or(order.d + order.D == 0);
	const Eigen::Index k_x = covariates ? static_cast<Eigen::Index>(covariates->cols()) : 0;
	const auto n = static_cast<Eigen::Index>(series.size());
	if (order.arma_params() == 0 && order.d + order.D == 0 && !use_constant && k_x == 0) {
		throw Error(ErrorCode::InvalidArgument, "ARIMA" + order.to_string() + " without a constant has nothing to fit",
		            "order");
	}

	const Eigen::Index min_len = 5 * order.arma_params() + diff.lost() + k_x + 10;
	if (n < min_len) {
		throw Error(ErrorCode::SeriesTooShort, "ARIMA" + order.to_string() + " needs at least " +
		                                           std::to_string(min_len) + " observations, got " +
		                                           std::to_string(n));
	}
	if (covariates && (covariates->start() != series.start() || static_cast<Eigen::Index>(covariates->rows()) != n)) {
		throw Error(ErrorCode::DateMismatch, "covariates must align with the series dates");
	}

	const TimeSeries z = transform(series, options.transform);
	const TimeSeries w = difference(z, diff);
	const Eigen::Index nw = static_cast<Eigen::Index>(w.size());

	Eigen::MatrixXd u(nw, k_x + (use_constant ? 1 : 0));
	if (k_x > 0) {
		u.leftCols(k_x) = options.covariate_mode == CovariateMode::Differenced
		                      ? difference_columns(covariates->values(), diff)
		                      : Eigen::MatrixXd(covariates->values().bottomRows(nw));
	}
	if (use_constant) u.col(k_x).setOnes();

	if (u.cols() > 0) {
		Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(u);
		qr.setThreshold(1e-10);
		if (qr.rank() < u.cols()) {
			throw Error(ErrorCode::SingularDesign, "regressors are collinear (rank " + std::to_string(qr.rank()) +
			                                           " of " + std::to_string(u.cols()) + ")");
		}
	}

	CssProblem problem;
	problem.order = order;
	problem.data.resize(nw, 1 + u.cols());
	problem.data.col(0) = Eigen::Map<const Eigen::VectorXd>(w.values().data(), nw);
	if (u.cols() > 0) problem.data.rightCols(u.cols()) = u;
	problem.cond = std::max(order.full_ar(), options.min_conditioning);
	const int n_params = order.arma_params() + static_cast<int>(u.cols()) + 1;
	if (problem.n_eff() <= n_params) {
		throw Error(ErrorCode::SeriesTooShort, "too few observations after differencing and conditioning");
	}

	const auto objective = [&problem](std::span<const double> raw) { return problem.objective(raw); };
	std::vector<std::vector<double>> starts{pack(hannan_rissanen(problem)),
	                                        std::vector<double>(static_cast<std::size_t>(order.arma_params()), 0.0)};
	optim::OptimResult best;
	best.value = std::numeric_limits<double>::infinity();
	for (auto& start : starts) {
		auto result = optim::nelder_mead(objective, start, options.optimizer);
		if (result.value < best.value) best = std::move(result);
	}

	auto coefs = unpack(best.x, order);
	const auto admissible = [](const Coefficients& c) {
		return is_stationary(c.ar) && is_stationary(c.sar) && is_stationary(negate(c.ma)) &&
		       is_stationary(negate(c.sma));
	};
	if (!admissible(coefs)) {
		// Project saturated partial autocorrelations back inside the unit interval.
		for (double& v : best.x) v = std::clamp(v, -7.0, 7.0);
		coefs = unpack(best.x, order);
		if (!admissible(coefs)) {
			throw Error(ErrorCode::NonInvertibleEstimate, "ARIMA" + order.to_string() +
			                                                  " estimate outside the stationary/invertible region");
		}
	}

	const auto eval = problem.evaluate(coefs);
	FittedArima model;
	model.order = order;
	model.ar = coefs.ar;
	model.ma = coefs.ma;
	model.seasonal_ar = coefs.sar;
	model.seasonal_ma = coefs.sma;
	model.covariate_mode = options.covariate_mode;
	model.transform = options.transform;
	if (covariates) {
		model.regressors = covariates->columns();
		model.regression.assign(eval.beta.data(), eval.beta.data() + k_x);
	}
	if (use_constant) model.constant = eval.beta[k_x];
	model.n_effective = static_cast<int>(problem.n_eff());
	model.sigma2 = std::max(eval.ssr / static_cast<double>(problem.n_eff()), 1e-300);
	model.loglik = -0.5 * static_cast<double>(problem.n_eff()) *
	               (std::log(2.0 * std::numbers::pi * model.sigma2) + 1.0);

	// Regression-adjusted differenced series and the full residual sequence.
	Eigen::VectorXd adjusted = problem.data.col(0);
	if (u.cols() > 0) adjusted -= u * eval.beta;
	Eigen::VectorXd residuals = Eigen::VectorXd::Zero(nw);
	residuals.tail(problem.n_eff()) = eval.residuals;
	model.residuals.assign(eval.residuals.data(), eval.residuals.data() + eval.residuals.size());

	model.last_date = series.end();
	const auto lost = static_cast<std::size_t>(diff.lost());
	model.tail_levels.assign(z.values().end() - static_cast<std::ptrdiff_t>(lost), z.values().end());
	if (covariates && options.covariate_mode == CovariateMode::Differenced) {
		for (Eigen::Index t = n - static_cast<Eigen::Index>(lost); t < n; ++t) {
			const Eigen::RowVectorXd row = covariates->values().row(t);
			model.tail_covariates.emplace_back(row.data(), row.data() + row.size());
		}
	}
	const Eigen::Index pf = std::min<Eigen::Index>(order.full_ar(), nw);
	const Eigen::Index qf = std::min<Eigen::Index>(order.full_ma(), nw);
	model.tail_errors.assign(adjusted.data() + nw - pf, adjusted.data() + nw);
	model.tail_innovations.assign(residuals.data() + nw - qf, residuals.data() + nw);
	return model;
}

TimeSeries forecast_arima(const FittedArima& model, int horizon, const DesignMatrix* future) {
	if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be positive", "horizon");
	const auto h = static_cast<Eigen::Index>(horizon);
	const auto k = static_cast<Eigen::Index>(model.regressors.size());
	const DifferenceSpec diff = model.order.differencing();

	Eigen::VectorXd shift = Eigen::VectorXd::Constant(h, model.constant.value_or(0.0));
	if (k > 0) {
		if (!future) {
			throw Error(ErrorCode::MissingFutureCovariates, "model has regressors; future covariates required");
		}
		if (future->start() != model.last_date + 1 || static_cast<Eigen::Index>(future->rows()) != h) {
			throw Error(ErrorCode::DateMismatch, "future covariates must cover the " + std::to_string(horizon) +
			                                         " days after " + model.last_date.to_iso());
		}
		DesignMatrix selected;
		try {
			selected = future->select(model.regressors);
		} catch (const Error& e) {
			throw Error(ErrorCode::ColumnMismatch, e.message(), e.field_path());
		}
		Eigen::MatrixXd u;
		if (model.covariate_mode == CovariateMode::Differenced) {
			const auto lost = static_cast<Eigen::Index>(diff.lost());
			Eigen::MatrixXd stacked(lost + h, k);
			for (Eigen::Index t = 0; t < lost; ++t) {
				stacked.row(t) = Eigen::Map<const Eigen::RowVectorXd>(model.tail_covariates[static_cast<std::size_t>(t)].data(), k);
			}
			stacked.bottomRows(h) = selected.values();
			u = difference_columns(stacked, diff);
		} else {
			u = selected.values();
		}
		shift += u * Eigen::Map<const Eigen::VectorXd>(model.regression.data(), k);
	}

	const auto a = model.expanded_ar();
	const auto b = model.expanded_ma();
	std::vector<double> e(model.tail_errors);
	std::vector<double> eps(model.tail_innovations);
	std::vector<double> w(static_cast<std::size_t>(h));
	for (Eigen::Index t = 0; t < h; ++t) {
		double next = 0.0;
		for (std::size_t i = 0; i < a.size(); ++i) {
			if (i + 1 <= e.size()) next += a[i] * e[e.size() - 1 - i];
		}
		for (std::size_t j = 0; j < b.size(); ++j) {
			if (j + 1 <= eps.size()) next += b[j] * eps[eps.size() - 1 - j];
		}
		e.push_back(next);
		eps.push_back(0.0);
		w[static_cast<std::size_t>(t)] = next + shift[t];
	}

	const TimeSeries diffed(model.last_date + 1, std::move(w));
	const TimeSeries levels = integrate(diffed, diff, model.tail_levels);
	return inverse_transform(levels.slice(static_cast<std::size_t>(diff.lost()), levels.size()), model.transform);
}

InformationCriteria information_criteria(double loglik, int n_params, int n_effective) {
	return {-2.0 * loglik + 2.0 * n_params, -2.0 * loglik + n_params * std::log(static_cast<double>(n_effective))};
}

InformationCriteria information_criteria(const FittedArima& model) {
	return information_criteria(model.loglik, model.parameter_count(), model.n_effective);
}

SelectionResult select_order(const TimeSeries& series, const DesignMatrix* covariates,
                             const std::vector<ArimaOrder>& grid, Criterion criterion, FitOptions options) {
	if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty order grid", "grid");
	for (const auto& o : grid) options.min_conditioning = std::max(options.min_conditioning, o.full_ar());

	std::optional<SelectionResult> best;
	std::vector<std::pair<ArimaOrder, std::string>> failures;
	for (const auto& order : grid) {
		try {
			auto model = fit_arima(series, order, covariates, options);
			const auto ic = information_criteria(model);
			const double score = criterion == Criterion::Aic ? ic.aic : ic.bic;
			if (!best || score < best->score) best = SelectionResult{order, std::move(model), score, {}};
		} catch (const Error& e) {
			failures.emplace_back(order, e.what());
		}
	}
	if (!best) throw Error(ErrorCode::AllFitsFailed, "every candidate order failed to fit");
	best->failures = std::move(failures);
	return std::move(*best);
}

namespace {

nlohmann::json order_to_json(const ArimaOrder& o) {
	return {{"p", o.p}, {"d", o.d}, {"q", o.q}, {"P", o.P}, {"D", o.D}, {"Q", o.Q}, {"m", o.m}};
}

} // namespace

nlohmann::json to_json(const FittedArima& model) {
	return {{"format", "eventcast.arima"},
	        {"version", 1},
	        {"order", order_to_json(model.order)},
	        {"ar", model.ar},
	        {"ma", model.ma},
	        {"seasonal_ar", model.seasonal_ar},
	        {"seasonal_ma", model.seasonal_ma},
	        {"regressors", model.regressors},
	        {"regression", model.regression},
	        {"constant", model.constant ? nlohmann::json(*model.constant) : nlohmann::json(nullptr)},
	        {"covariate_mode", model.covariate_mode == CovariateMode::Differenced ? "differenced" : "raw"},
	        {"sigma2", model.sigma2},
	        {"loglik", model.loglik},
	        {"n_effective", model.n_effective},
	        {"transform", eventcast::to_json(model.transform)},
	        {"tail",
	         {{"last_date", model.last_date.to_iso()},
	          {"levels", model.tail_levels},
	          {"covariates", model.tail_covariates},
	          {"errors", model.tail_errors},
	          {"innovations", model.tail_innovations}}}};
}

FittedArima arima_from_json(const nlohmann::json& j) {
	check_format(j, "eventcast.arima", 1);
	FittedArima m;
	const auto& o = j.at("order");
	m.order = {o.at("p"), o.at("d"), o.at("q"), o.at("P"), o.at("D"), o.at("Q"), o.at("m")};
	m.order.validate();
	m.ar = j.at("ar").get<std::vector<double>>();
	m.ma = j.at("ma").get<std::vector<double>>();
	m.seasonal_ar = j.at("seasonal_ar").get<std::vector<double>>();
	m.seasonal_ma = j.at("seasonal_ma").get<std::vector<double>>();
	m.regressors = j.at("regressors").get<std::vector<std::string>>();
	m.regression = j.at("regression").get<std::vector<double>>();
	if (!j.at("constant").is_null()) m.constant = j.at("constant").get<double>();
	m.covariate_mode = j.at("covariate_mode") == "raw" ? CovariateMode::Raw : CovariateMode::Differenced;
	m.sigma2 = j.at("sigma2");
	m.loglik = j.at("loglik");
	m.n_effective = j.at("n_effective");
	m.transform = transform_from_json(j.at("transform"));
	const auto& tail = j.at("tail");
	m.last_date = Date::parse(tail.at("last_date").get<std::string>());
	m.tail_levels = tail.at("levels").get<std::vector<double>>();
	m.tail_covariates = tail.at("covariates").get<std::vector<std::vector<double>>>();
	m.tail_errors = tail.at("errors").get<std::vector<double>>();
	m.tail_innovations = tail.at("innovations").get<std::vector<double>>();
	if (m.regression.size() != m.regressors.size()) throw Error(ErrorCode::ParseError, "regression size mismatch");
	return m;
}

} // namespace eventcast::arima
