#pragma once

#include <functional>
#include <span>
#include <vector>

namespace eventcast::optim {

struct NelderMeadOptions {
	int max_evaluations = 20000;
	/// Converged when the simplex value spread falls below f_tolerance * (|f_best| + f_tolerance)
	/// and its diameter falls below x_tolerance.
	double f_tolerance = 1e-12;
	double x_tolerance = 1e-9;
	double initial_step = 0.1;
	/// Fresh simplices built around the incumbent after convergence.
	int restarts = 2;
};

struct OptimResult {
	std::vector<double> x;
	double value = 0.0;
	int evaluations = 0;
	bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Deterministic derivative-free minimizer. Non-finite objective values are treated as +inf.
OptimResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& options = {});

} // namespace eventcast::optim
