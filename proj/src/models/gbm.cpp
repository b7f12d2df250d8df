#include "eventcast/models/gbm.hpp"

#include "eventcast/core/json_io.hpp"
#include "eventcast/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eventcast::gbm {

void GbmParams::validate() const {
	if (max_depth < 1) throw Error(ErrorCode::InvalidArgument, "max_depth must be positive", "max_depth");
	if (!(eta > 0.0 && eta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "eta must lie in (0, 1]", "eta");
	if (n_rounds < 0) throw Error(ErrorCode::InvalidArgument, "n_rounds must be non-negative", "n_rounds");
	if (min_samples_leaf < 1) {
		throw Error(ErrorCode::InvalidArgument, "min_samples_leaf must be positive", "min_samples_leaf");
	}
	if (early_stopping_rounds && *early_stopping_rounds < 1) {
		throw Error(ErrorCode::InvalidArgument, "early_stopping_rounds must be positive", "early_stopping_rounds");
	}
}

GbmParams preset_params(std::string_view name) {
	GbmParams p;
	if (name == "aoi_sales") {
		p.max_depth = 100;
		p.eta = 0.20;
	} else if (name == "gs_sales") {
		p.max_depth = 1;
		p.eta = 0.76;
	} else if (name == "aoi_playtime") {
		p.max_depth = 1;
		p.eta = 0.66;
	} else if (name == "gs_playtime") {
		p.max_depth = 1000;
		p.eta = 0.23;
	} else {
		throw Error(ErrorCode::InvalidArgument, "unknown GBM preset '" + std::string(name) + "'", "preset");
	}
	return p;
}

double RegressionTree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
	int node = 0;
	while (feature[static_cast<std::size_t>(node)] >= 0) {
		const auto i = static_cast<std::size_t>(node);
		node = row[feature[i]] <= threshold[i] ? left[i] : right[i];
	}
	return value[static_cast<std::size_t>(node)];
}

int RegressionTree::depth() const {
	std::vector<int> level(feature.size(), 0);
	int deepest = 0;
	for (std::size_t i = 0; i < feature.size(); ++i) {
		deepest = std::max(deepest, level[i]);
		if (feature[i] >= 0) {
			level[static_cast<std::size_t>(left[i])] = level[i] + 1;
			level[static_cast<std::size_t>(right[i])] = level[i] + 1;
		}
	}
	return deepest;
}

std::size_t RegressionTree::leaf_count() const {
	return static_cast<std::size_t>(std::count_if(feature.begin(), feature.end(), [](int f) { return f < 0; }));
}

std::vector<double> negative_gradient(std::span<const double> y, std::span<const double> f) {
	if (y.size() != f.size()) {
		throw Error(ErrorCode::LengthMismatch,
		            "y has " + std::to_string(y.size()) + " values, f has " + std::to_string(f.size()));
	}
	std::vector<double> z(y.size());
	for (std::size_t i = 0; i < y.size(); ++i) z[i] = y[i] - f[i];
	return z;
}

namespace {

struct TreeBuilder {
	const Eigen::MatrixXd& x;
	std::span<const double> z;
	const GbmParams& params;
	RegressionTree tree;

	int add_leaf(double value) {
		tree.feature.push_back(-1);
		tree.threshold.push_back(0.0);
		tree.left.push_back(-1);
		tree.right.push_back(-1);
		tree.value.push_back(value);
		return static_cast<int>(tree.feature.size()) - 1;
	}

	int build(std::vector<int>& rows, int depth) {
		const auto m = rows.size();
		double sum = 0.0, lo = z[static_cast<std::size_t>(rows[0])], hi = lo;
		for (int r : rows) {
			const double v = z[static_cast<std::size_t>(r)];
			sum += v;
			lo = std::min(lo, v);
			hi = std::max(hi, v);
		}
		const double mean = sum / static_cast<double>(m);
		const auto min_leaf = static_cast<std::size_t>(params.min_samples_leaf);
		const bool pure = hi - lo <= 1e-12 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
		if (depth >= params.max_depth || m < 2 * min_leaf || pure) return add_leaf(mean);

		// Gain of a split = S_L^2/n_L + S_R^2/n_R - S^2/n.
		const double parent = sum * sum / static_cast<double>(m);
		int best_feature = -1;
		double best_threshold = 0.0, best_gain = -1.0;
		std::vector<int> order(rows);
		for (Eigen::Index f = 0; f < x.cols(); ++f) {
			std::sort(order.begin(), order.end(), [&](int a, int b) {
				const double xa = x(a, f), xb = x(b, f);
				return xa < xb || (xa == xb && a < b);
			});
			double left_sum = 0.0;
			for (std::size_t i = 0; i + 1 < m; ++i) {
				left_sum += z[static_cast<std::size_t>(order[i])];
				const std::size_t n_left = i + 1, n_right = m - n_left;
				const double xl = x(order[i], f), xr = x(order[i + 1], f);
				if (xl == xr || n_left < min_leaf || n_right < min_leaf) continue;
				const double right_sum = sum - left_sum;
				const double gain = left_sum * left_sum / static_cast<double>(n_left) +
				                    right_sum * right_sum / static_cast<double>(n_right) - parent;
				if (gain > best_gain + 1e-12 * std::max(1.0, std::abs(best_gain))) {
					best_gain = gain;
					best_feature = static_cast<int>(f);
					best_threshold = xl + 0.5 * (xr - xl);
					// Neighbours one ulp apart: the midpoint rounds onto xr.
					if (!(best_threshold < xr)) best_threshold = xl;
				}
			}
		}
		if (best_feature < 0) return add_leaf(mean);

		std::vector<int> left_rows, right_rows;
		for (int r : rows) (x(r, best_feature) <= best_threshold ? left_rows : right_rows).push_back(r);
		rows.clear();
		rows.shrink_to_fit();

		const int node = add_leaf(mean);
		const auto idx = static_cast<std::size_t>(node);
		tree.feature[idx] = best_feature;
		tree.threshold[idx] = best_threshold;
		const int l = build(left_rows, depth + 1);
		const int r = build(right_rows, depth + 1);
		tree.left[idx] = l;
		tree.right[idx] = r;
		return node;
	}
};

bool all_rows_identical(const Eigen::MatrixXd& x) {
	for (Eigen::Index i = 1; i < x.rows(); ++i) {
		if (x.row(i) != x.row(0)) return false;
	}
	return true;
}

double rmse(std::span<const double> y, const Eigen::VectorXd& f) {
	double ss = 0.0;
	for (std::size_t i = 0; i < y.size(); ++i) {
		const double r = y[i] - f[static_cast<Eigen::Index>(i)];
		ss += r * r;
	}
	return std::sqrt(ss / static_cast<double>(y.size()));
}

} // namespace

RegressionTree fit_tree(const Eigen::MatrixXd& x, std::span<const double> z, const GbmParams& params) {
	params.validate();
	if (static_cast<std::size_t>(x.rows()) != z.size()) {
		throw Error(ErrorCode::LengthMismatch, "design has " + std::to_string(x.rows()) + " rows, target has " +
		                                           std::to_string(z.size()));
	}
	if (x.rows() < 2 * params.min_samples_leaf || x.rows() == 0) {
		throw Error(ErrorCode::TooFewRows, "need at least 2 * min_samples_leaf rows");
	}
	if (all_rows_identical(x)) throw Error(ErrorCode::DegenerateInput, "all design rows are identical");
	TreeBuilder builder{x, z, params, {}};
	std::vector<int> rows(static_cast<std::size_t>(x.rows()));
	std::iota(rows.begin(), rows.end(), 0);
	builder.build(rows, 0);
	return std::move(builder.tree);
}

GbmEnsemble fit_gbm(const Eigen::MatrixXd& x, std::span<const double> y, const GbmParams& params,
                    std::optional<Validation> validation) {
	params.validate();
	if (y.empty() || x.rows() == 0) throw Error(ErrorCode::EmptyData, "no training rows");
	if (static_cast<std::size_t>(x.rows()) != y.size()) {
		throw Error(ErrorCode::LengthMismatch, "design has " + std::to_string(x.rows()) + " rows, target has " +
		                                           std::to_string(y.size()));
	}
	if (y.size() < 10) throw Error(ErrorCode::TooFewRows, "boosting needs at least 10 rows");
	if (validation) {
		if (validation->x.cols() != x.cols() || static_cast<std::size_t>(validation->x.rows()) != validation->y.size()) {
			throw Error(ErrorCode::DimensionMismatch, "validation set does not match the training design");
		}
		if (validation->y.empty()) validation.reset();
	}

	GbmEnsemble model;
	model.base_score = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
	model.eta = params.eta;
	model.n_features = static_cast<int>(x.cols());

	Eigen::VectorXd f = Eigen::VectorXd::Constant(x.rows(), model.base_score);
	Eigen::VectorXd fv;
	if (validation) fv = Eigen::VectorXd::Constant(validation->x.rows(), model.base_score);
	model.train_rmse.push_back(rmse(y, f));
	if (validation) model.validation_rmse.push_back(rmse(validation->y, fv));

	const bool degenerate = all_rows_identical(x);
	std::size_t best_round = 0;
	for (int round = 0; round < params.n_rounds && !degenerate; ++round) {
		const auto z = negative_gradient(y, std::span<const double>(f.data(), static_cast<std::size_t>(f.size())));
		auto tree = fit_tree(x, z, params);
		for (Eigen::Index i = 0; i < x.rows(); ++i) f[i] += params.eta * tree.predict(x.row(i));
		model.train_rmse.push_back(rmse(y, f));
		if (validation) {
			for (Eigen::Index i = 0; i < validation->x.rows(); ++i) fv[i] += params.eta * tree.predict(validation->x.row(i));
			model.validation_rmse.push_back(rmse(validation->y, fv));
		}
		model.trees.push_back(std::move(tree));
		if (validation && params.early_stopping_rounds) {
			const std::size_t current = model.trees.size();
			if (model.validation_rmse[current] < model.validation_rmse[best_round]) best_round = current;
			if (static_cast<int>(current - best_round) >= *params.early_stopping_rounds) break;
		}
	}
	if (validation && params.early_stopping_rounds) {
		model.trees.resize(best_round);
		model.train_rmse.resize(best_round + 1);
		model.validation_rmse.resize(best_round + 1);
	}
	return model;
}

Eigen::VectorXd predict_gbm(const GbmEnsemble& model, const Eigen::MatrixXd& x) {
	if (x.cols() != model.n_features) {
		throw Error(ErrorCode::ColumnMismatch, "model expects " + std::to_string(model.n_features) +
		                                           " features, got " + std::to_string(x.cols()));
	}
	Eigen::VectorXd out(x.rows());
	for (Eigen::Index i = 0; i < x.rows(); ++i) {
		double acc = 0.0;
		for (const auto& tree : model.trees) acc += tree.predict(x.row(i));
		out[i] = model.base_score + model.eta * acc;
	}
	return out;
}

nlohmann::json to_json(const GbmEnsemble& model) {
	nlohmann::json trees = nlohmann::json::array();
	for (const auto& t : model.trees) {
		trees.push_back({{"feature", t.feature},
		                 {"threshold", t.threshold},
		                 {"left", t.left},
		                 {"right", t.right},
		                 {"value", t.value}});
	}
	return {{"format", "eventcast.gbm"},
	        {"version", 1},
	        {"base_score", model.base_score},
	        {"eta", model.eta},
	        {"n_features", model.n_features},
	        {"trees", trees},
	        {"train_rmse", model.train_rmse},
	        {"validation_rmse", model.validation_rmse}};
}

GbmEnsemble gbm_from_json(const nlohmann::json& j) {
	check_format(j, "eventcast.gbm", 1);
	GbmEnsemble m;
	m.base_score = j.at("base_score");
	m.eta = j.at("eta");
	m.n_features = j.at("n_features");
	for (const auto& t : j.at("trees")) {
		RegressionTree tree;
		tree.feature = t.at("feature").get<std::vector<int>>();
		tree.threshold = t.at("threshold").get<std::vector<double>>();
		tree.left = t.at("left").get<std::vector<int>>();
		tree.right = t.at("right").get<std::vector<int>>();
		tree.value = t.at("value").get<std::vector<double>>();
		const auto n = tree.feature.size();
		if (n == 0 || tree.threshold.size() != n || tree.left.size() != n || tree.right.size() != n ||
		    tree.value.size() != n) {
			throw Error(ErrorCode::ParseError, "malformed tree arrays");
		}
		for (std::size_t i = 0; i < n; ++i) {
			if (tree.feature[i] >= m.n_features) throw Error(ErrorCode::ParseError, "tree feature out of range");
			if (tree.feature[i] >= 0 && (tree.left[i] <= static_cast<int>(i) || tree.right[i] <= static_cast<int>(i) ||
			                             tree.left[i] >= static_cast<int>(n) || tree.right[i] >= static_cast<int>(n))) {
				throw Error(ErrorCode::ParseError, "tree child index out of range");
			}
		}
		m.trees.push_back(std::move(tree));
	}
	m.train_rmse = j.value("train_rmse", std::vector<double>{});
	m.validation_rmse = j.value("validation_rmse", std::vector<double>{});
	return m;
}

} // namespace eventcast::gbm
