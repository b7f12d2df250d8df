#include "eventcast/optim/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace eventcast::optim {

namespace {

struct Simplex {
	std::vector<std::vector<double>> points;
	std::vector<double> values;
};

class Runner {
public:
	Runner(const Objective& f, const NelderMeadOptions& opt) : f_(f), opt_(opt) {}

	double eval(const std::vector<double>& x) {
		++evaluations;
		const double v = f_(x);
		return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
	}

	// One full Nelder-Mead descent from `start`; returns true on convergence.
	bool descend(std::vector<double>& best, double& best_value) {
		const std::size_t n = best.size();
		Simplex s;
		s.points.push_back(best);
		s.values.push_back(best_value);
		for (std::size_t i = 0; i < n; ++i) {
			auto p = best;
			p[i] += std::abs(p[i]) > 1e-3 ? opt_.initial_step * std::max(1.0, std::abs(p[i])) : opt_.initial_step;
			s.values.push_back(eval(p));
			s.points.push_back(std::move(p));
		}

		std::vector<std::size_t> order(n + 1);
		std::vector<double> centroid(n), trial(n), trial2(n);
		while (evaluations < opt_.max_evaluations) {
			std::iota(order.begin(), order.end(), 0);
			std::stable_sort(order.begin(), order.end(),
			                 [&](std::size_t a, std::size_t b) { return s.values[a] < s.values[b]; });
			const std::size_t lo = order.front(), hi = order.back(), second = order[n - 1];

			double diameter = 0.0;
			for (std::size_t i = 0; i <= n; ++i) {
				for (std::size_t k = 0; k < n; ++k) {
					diameter = std::max(diameter, std::abs(s.points[i][k] - s.points[lo][k]));
				}
			}
			const double spread = s.values[hi] - s.values[lo];
			if (std::isfinite(spread) && spread <= opt_.f_tolerance * (std::abs(s.values[lo]) + opt_.f_tolerance) &&
			    diameter <= opt_.x_tolerance) {
				best = s.points[lo];
				best_value = s.values[lo];
				return true;
			}

			std::fill(centroid.begin(), centroid.end(), 0.0);
			for (std::size_t i = 0; i <= n; ++i) {
				if (i == hi) continue;
				for (std::size_t k = 0; k < n; ++k) centroid[k] += s.points[i][k] / static_cast<double>(n);
			}
			for (std::size_t k = 0; k < n; ++k) trial[k] = centroid[k] + (centroid[k] - s.points[hi][k]);
			const double fr = eval(trial);

			if (fr < s.values[lo]) {
				for (std::size_t k = 0; k < n; ++k) trial2[k] = centroid[k] + 2.0 * (centroid[k] - s.points[hi][k]);
				const double fe = eval(trial2);
				if (fe < fr) {
					s.points[hi] = trial2;
					s.values[hi] = fe;
				} else {
					s.points[hi] = trial;
					s.values[hi] = fr;
				}
				continue;
			}
			if (fr < s.values[second]) {
				s.points[hi] = trial;
				s.values[hi] = fr;
				continue;
			}
			const bool outside = fr < s.values[hi];
			for (std::size_t k = 0; k < n; ++k) {
				trial2[k] = outside ? centroid[k] + 0.5 * (trial[k] - centroid[k])
				                    : centroid[k] + 0.5 * (s.points[hi][k] - centroid[k]);
			}
			const double fc = eval(trial2);
			if (fc < std::min(fr, s.values[hi])) {
				s.points[hi] = trial2;
				s.values[hi] = fc;
				continue;
			}
			// Shrink towards the best vertex.
			for (std::size_t i = 0; i <= n; ++i) {
				if (i == lo) continue;
				for (std::size_t k = 0; k < n; ++k) {
					s.points[i][k] = s.points[lo][k] + 0.5 * (s.points[i][k] - s.points[lo][k]);
				}
				s.values[i] = eval(s.points[i]);
			}
		}
		const auto it = std::min_element(s.values.begin(), s.values.end());
		best = s.points[static_cast<std::size_t>(it - s.values.begin())];
		best_value = *it;
		return false;
	}

	int evaluations = 0;

private:
	const Objective& f_;
	const NelderMeadOptions& opt_;
};

} // namespace

OptimResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& options) {
	Runner runner(f, options);
	OptimResult result;
	result.x = std::move(x0);
	result.value = runner.eval(result.x);
	if (result.x.empty()) {
		result.converged = true;
		result.evaluations = runner.evaluations;
		return result;
	}
	result.converged = runner.descend(result.x, result.value);
	for (int r = 0; r < options.restarts && result.converged; ++r) {
		const double before = result.value;
		result.converged = runner.descend(result.x, result.value);
		if (before - result.value <= options.f_tolerance * (std::abs(before) + options.f_tolerance)) break;
	}
	result.evaluations = runner.evaluations;
	return result;
}

} // namespace eventcast::optim
