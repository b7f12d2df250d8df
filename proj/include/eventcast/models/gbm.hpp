#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace eventcast::gbm {

struct GbmParams {
	int max_depth = 6;
	double eta = 0.3; // shrinkage applied to every tree
	int n_rounds = 100;
	int min_samples_leaf = 1;
	std::optional<int> early_stopping_rounds{};

	void validate() const;
};

/// max_depth / eta pairs for aoi_sales, gs_sales, aoi_playtime, gs_playtime.
GbmParams preset_params(std::string_view name);

/// Binary tree stored as parallel arrays; node 0 is the root, feature < 0 marks a leaf.
struct RegressionTree {
	std::vector<int> feature;
	std::vector<double> threshold; // rows with x <= threshold go left
	std::vector<int> left;
	std::vector<int> right;
	std::vector<double> value;

	double predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
	int depth() const;
	std::size_t leaf_count() const;
};

/// Negative gradient of 0.5 * (y - f)^2 with respect to f.
std::vector<double> negative_gradient(std::span<const double> y, std::span<const double> f);

/// Exact greedy variance-reduction tree. Ties in gain go to the lowest feature index, then
/// the lowest threshold.
RegressionTree fit_tree(const Eigen::MatrixXd& x, std::span<const double> z, const GbmParams& params);

struct GbmEnsemble {
	double base_score = 0.0;
	double eta = 1.0;
	int n_features = 0;
	std::vector<RegressionTree> trees;
	/// Training RMSE after 0..trees.size() rounds (trimmed to the kept rounds).
	std::vector<double> train_rmse;
	/// Validation RMSE per round when a validation set was supplied.
	std::vector<double> validation_rmse;
};

struct Validation {
	const Eigen::MatrixXd& x;
	std::span<const double> y;
};

/// Boosting with squared-error loss. With a validation set and early_stopping_rounds, training
/// stops once the validation loss has not improved for that many rounds and the best round's
/// ensemble is returned.
GbmEnsemble fit_gbm(const Eigen::MatrixXd& x, std::span<const double> y, const GbmParams& params,
                    std::optional<Validation> validation = std::nullopt);

Eigen::VectorXd predict_gbm(const GbmEnsemble& model, const Eigen::MatrixXd& x);

nlohmann::json to_json(const GbmEnsemble& model);
GbmEnsemble gbm_from_json(const nlohmann::json& j);

} // namespace eventcast::gbm
