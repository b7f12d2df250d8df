#pragma once

#include "eventcast/core/time_series.hpp"
#include "eventcast/features/design_matrix.hpp"
#include "eventcast/optim/nelder_mead.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eventcast::arima {

/// ARIMA(p,d,q)(P,D,Q)_m orders.
struct ArimaOrder {
	int p = 0, d = 0, q = 0;
	int P = 0, D = 0, Q = 0;
	int m = 1;

	void validate() const;
	int arma_params() const { return p + q + P + Q; }
	/// Orders of the expanded AR and MA lag polynomials.
	int full_ar() const { return p + P * m; }
	int full_ma() const { return q + Q * m; }
	DifferenceSpec differencing() const { return {d, D, m}; }
	std::string to_string() const;
	bool operator==(const ArimaOrder&) const = default;
};

/// Named orders used in production: aoi_sales, gs_sales, aoi_playtime, gs_playtime.
ArimaOrder preset_order(std::string_view name);

/// How exogenous columns enter the model. `Differenced` applies the same differencing to the
/// covariates as to the target (regression on levels with ARIMA errors); `Raw` feeds the
/// covariates undifferenced into the differenced equation.
enum class CovariateMode { Differenced, Raw };

struct FitOptions {
	TransformSpec transform{};
	/// Intercept (d + D = 0) or drift term. Defaults to on only for undifferenced models.
	std::optional<bool> include_constant{};
	CovariateMode covariate_mode = CovariateMode::Differenced;
	/// Residuals before this index of the differenced series are not scored. Raised by
	/// select_order so every candidate is scored on the same observations.
	int min_conditioning = 0;
	optim::NelderMeadOptions optimizer{};
};

struct FittedArima {
	ArimaOrder order;
	std::vector<double> ar;          // phi_1..phi_p
	std::vector<double> ma;          // theta_1..theta_q
	std::vector<double> seasonal_ar; // Phi_1..Phi_P
	std::vector<double> seasonal_ma; // Theta_1..Theta_Q
	std::vector<std::string> regressors;
	std::vector<double> regression; // gamma per regressor
	std::optional<double> constant;
	CovariateMode covariate_mode = CovariateMode::Differenced;
	double sigma2 = 1.0;
	double loglik = 0.0;
	int n_effective = 0;
	TransformSpec transform{};

	// State needed to continue the recursion past the training data.
	Date last_date{};
	std::vector<double> tail_levels;                  // last d + D*m transformed observations
	std::vector<std::vector<double>> tail_covariates; // matching raw covariate rows
	std::vector<double> tail_errors;                  // last full_ar() regression-adjusted values
	std::vector<double> tail_innovations;             // last full_ma() residuals

	/// In-sample residuals on the differenced scale (not serialized).
	std::vector<double> residuals;

	/// Coefficients a_k of phi(L)Phi(L^m) = 1 - sum a_k L^k, k = 1..full_ar.
	std::vector<double> expanded_ar() const;
	/// Coefficients b_k of theta(L)Theta(L^m) = 1 + sum b_k L^k, k = 1..full_ma.
	std::vector<double> expanded_ma() const;
	int parameter_count() const;
};

/// Conditional-sum-of-squares fit. Regression coefficients are profiled out of the CSS
/// criterion by least squares at every ARMA candidate, so gamma and the ARMA terms are
/// estimated jointly.
FittedArima fit_arima(const TimeSeries& series, const ArimaOrder& order, const DesignMatrix* covariates = nullptr,
                      const FitOptions& options = {});

/// Point forecasts in raw units, starting the day after the training data.
TimeSeries forecast_arima(const FittedArima& model, int horizon, const DesignMatrix* future = nullptr);

struct InformationCriteria {
	double aic = 0.0;
	double bic = 0.0;
};

InformationCriteria information_criteria(double loglik, int n_params, int n_effective);
InformationCriteria information_criteria(const FittedArima& model);

enum class Criterion { Aic, Bic };

struct SelectionResult {
	ArimaOrder order;
	FittedArima model;
	double score = 0.0;
	std::vector<std::pair<ArimaOrder, std::string>> failures;
};

SelectionResult select_order(const TimeSeries& series, const DesignMatrix* covariates,
                             const std::vector<ArimaOrder>& grid, Criterion criterion = Criterion::Aic,
                             FitOptions options = {});

/// PACF-to-coefficient map keeping an AR polynomial stationary; exposed for tests.
std::vector<double> constrain_ar(std::span<const double> raw);
/// Inverse of constrain_ar; nullopt when the polynomial is not stationary.
std::optional<std::vector<double>> unconstrain_ar(std::span<const double> coefficients);
/// True when 1 - sum c_i L^i has all roots outside the unit circle.
bool is_stationary(std::span<const double> coefficients);

nlohmann::json to_json(const FittedArima& model);
FittedArima arima_from_json(const nlohmann::json& j);

} // namespace eventcast::arima
