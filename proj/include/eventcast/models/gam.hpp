#pragma once

#include "eventcast/features/design_matrix.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace eventcast::gam {

enum class TermKind { CyclicPSpline, CyclicCubic, PSpline, ThinPlate, Linear, RandomEffect };

std::string_view to_string(TermKind kind);
TermKind parse_term_kind(std::string_view text);

struct SmoothTerm {
	std::string covariate;
	TermKind kind = TermKind::PSpline;
	int n_basis = 10;
	std::optional<double> period{}; // cyclic kinds only
	std::optional<double> lambda{}; // nullopt selects by GCV

	void validate() const;
};

/// Everything needed to evaluate a term's basis on new data.
struct BasisSpec {
	TermKind kind = TermKind::PSpline;
	int n_basis = 0;
	double period = 0.0;
	int degree = 3;                // pspline
	std::vector<double> knots;     // pspline (extended), cyclic_cubic (K knots in [0, period))
	std::vector<double> centers;   // thinplate
	Eigen::MatrixXd transform;     // thinplate: eta(|x - c|) rows -> basis; cyclic_cubic: F = B^-1 D
	std::vector<double> levels;    // random_effect
	double center = 0.0;           // linear
	Eigen::MatrixXd tp_penalty;    // thinplate penalty on the radial block
	double lower = 0.0, upper = 0.0;
};

/// Fixes knots / centers / levels from training values.
BasisSpec make_basis(const SmoothTerm& term, std::span<const double> x);
/// Basis rows for `x` (before identifiability constraints).
Eigen::MatrixXd evaluate_basis(const BasisSpec& spec, std::span<const double> x);
/// build_basis = make_basis followed by evaluate_basis on the same values.
Eigen::MatrixXd build_basis(const SmoothTerm& term, std::span<const double> x);
/// First or second derivative of each basis function; cyclic kinds only.
Eigen::MatrixXd basis_derivative(const BasisSpec& spec, std::span<const double> x, int order);

/// (n - order) x n difference operator.
Eigen::MatrixXd difference_matrix(int n, int order);
Eigen::MatrixXd penalty_matrix(const BasisSpec& spec);

struct FitOptions {
	/// Log-spaced grid for automatic smoothing selection.
	double grid_min = 1e-6;
	double grid_max = 1e6;
	int grid_points = 30;
	int sweeps = 2;
};

struct FittedTerm {
	SmoothTerm term;
	BasisSpec basis;
	Eigen::MatrixXd constraint;  // Z: raw coefficients = Z * theta
	double penalty_scale = 1.0;  // lambda multiplies penalty_scale * S
	double lambda = 0.0;
	Eigen::VectorXd coefficients; // raw-basis coefficients (Z * theta)
	double edf = 0.0;
};

struct FittedGam {
	double intercept = 0.0;
	std::vector<FittedTerm> terms;
	double sigma2 = 0.0;
	double gcv = 0.0;
	double rss = 0.0;
	std::size_t n = 0;
	std::vector<std::string> warnings;

	double total_edf() const;
};

/// Penalized least squares with sum-to-zero constraints per smooth; lambdas left unset are
/// chosen by coordinate-wise GCV search over the grid. Throws SingularSystem.
FittedGam fit_gam(std::span<const double> y, const DesignMatrix& data, const std::vector<SmoothTerm>& terms,
                  const FitOptions& options = {});

Eigen::VectorXd predict_gam(const FittedGam& model, const DesignMatrix& data);
/// One term's contribution s_i(x) on `data`.
Eigen::VectorXd term_contribution(const FittedGam& model, std::size_t term, const DesignMatrix& data);

/// Seasonal cyclic terms on day_of_week and month, plus a term per recognised column.
std::vector<SmoothTerm> default_game_formula(const std::vector<std::string>& columns);

nlohmann::json to_json(const FittedGam& model);
FittedGam gam_from_json(const nlohmann::json& j);

} // namespace eventcast::gam
