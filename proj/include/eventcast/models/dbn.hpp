#pragma once

#include "eventcast/core/time_series.hpp"
#include "eventcast/features/design_matrix.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace eventcast::dbn {

/// Bernoulli-Bernoulli restricted Boltzmann machine; w is visible x hidden.
struct Rbm {
	Eigen::MatrixXd w;
	Eigen::VectorXd b_visible;
	Eigen::VectorXd b_hidden;

	Eigen::Index visible() const { return w.rows(); }
	Eigen::Index hidden() const { return w.cols(); }
};

/// P(h = 1 | v) for one visible vector. Throws DimensionMismatch.
Eigen::VectorXd rbm_hidden_prob(const Rbm& rbm, const Eigen::VectorXd& v);
/// Row-wise hidden probabilities for a batch of visible rows.
Eigen::MatrixXd rbm_hidden_probs(const Rbm& rbm, const Eigen::MatrixXd& v);
Eigen::MatrixXd rbm_visible_probs(const Rbm& rbm, const Eigen::MatrixXd& h);
/// Mean squared error of the deterministic up-down reconstruction of each row.
double reconstruction_error(const Rbm& rbm, const Eigen::MatrixXd& v);

/// Small Gaussian weights (sd 0.01), zero biases.
Rbm rbm_initialize(Eigen::Index visible, Eigen::Index hidden, std::uint64_t seed);

struct RbmTrainOptions {
	int units = 50;
	double learning_rate = 1e-3;
	int k = 1;      // Gibbs steps of contrastive divergence
	int epochs = 50;
	int batch = 10;
	std::uint64_t seed = 0;
};

struct RbmTrainResult {
	Rbm rbm;
	/// Reconstruction error after each epoch.
	std::vector<double> reconstruction_error;
};

/// CD-k on rows in [0, 1]. Starts from rbm_initialize(.., seed); sampling is also driven by `seed`.
RbmTrainResult rbm_train(const Eigen::MatrixXd& data, const RbmTrainOptions& options);

struct DbnParams {
	int layers = 2;           // h
	int units = 50;           // n
	double plr = 1e-3;        // pre-training learning rate
	double tlr = 0.01;        // fine-tuning learning rate
	int k = 1;                // Gibbs steps
	int batch = 10;           // b
	double l2 = 1e-4;
	int window = 14;
	int pretrain_epochs = 30;
	int max_epochs = 2000;
	int patience = 20;

	void validate() const;
};

/// Table of tuned settings for aoi_sales, gs_sales, aoi_playtime, gs_playtime.
DbnParams preset_params(std::string_view name);

/// Greedy layer-wise pre-training: layer k sees the hidden probabilities of layer k-1 and
/// is trained with seed + k.
std::vector<Rbm> dbn_pretrain(const Eigen::MatrixXd& x, const DbnParams& params, std::uint64_t seed);

/// Sigmoid hidden layers initialised from an RBM stack, followed by a linear output unit.
struct Network {
	std::vector<Eigen::MatrixXd> weights; // in x out
	std::vector<Eigen::VectorXd> biases;
	Eigen::VectorXd head;
	double head_bias = 0.0;

	Eigen::VectorXd forward(const Eigen::MatrixXd& x) const;
	std::vector<double> flatten() const;
	void assign(std::span<const double> flat);
};

Network network_from_stack(const std::vector<Rbm>& stack, std::uint64_t seed);
/// 0.5 * mean squared error + 0.5 * l2 * (sum of squared weights, biases excluded).
double network_loss(const Network& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double l2);
/// Back-propagated gradient of network_loss, in flatten() order.
std::vector<double> network_gradient(const Network& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                     double l2);

struct FinetuneResult {
	Network net;
	std::vector<double> train_loss;      // per epoch, index 0 before any update
	std::vector<double> validation_loss; // per epoch, index 0 before any update
	int best_epoch = 0;
	bool diverged = false;
};

/// Mini-batch SGD on a seeded 80/20 split with early stopping on the validation loss; returns
/// the best-validation weights. Throws TooFewRows below 10 rows.
FinetuneResult dbn_finetune(const std::vector<Rbm>& stack, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            const DbnParams& params, std::uint64_t seed);

/// Regressor on raw features: min-max input scaling, z-scored target, pretrain + finetune.
struct DbnRegressor {
	Network net;
	Eigen::VectorXd x_min;
	Eigen::VectorXd x_scale;
	double y_mean = 0.0;
	double y_scale = 1.0;
	std::vector<double> train_loss;
	std::vector<double> validation_loss;
	int best_epoch = 0;

	Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

DbnRegressor fit_dbn_regressor(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const DbnParams& params,
                               std::uint64_t seed);

/// Sliding-window forecaster: inputs are the previous `window` transformed values plus the
/// day's covariates.
struct DbnModel {
	DbnRegressor regressor;
	DbnParams params;
	std::uint64_t seed = 0;
	TransformSpec transform{};
	std::vector<std::string> covariates;
	Date last_date{};
	std::vector<double> tail; // last `window` transformed observations
};

DbnModel fit_dbn(const TimeSeries& series, const DesignMatrix* covariates, const DbnParams& params,
                 const TransformSpec& transform, std::uint64_t seed);

/// Iterated one-step forecast continuing `history` (raw units). Throws HistoryTooShort.
TimeSeries dbn_forecast(const DbnModel& model, const TimeSeries& history, const DesignMatrix* future, int horizon);
/// Same, continuing from the training tail stored in the model.
TimeSeries dbn_forecast(const DbnModel& model, const DesignMatrix* future, int horizon);

nlohmann::json to_json(const DbnModel& model);
DbnModel dbn_from_json(const nlohmann::json& j);

} // namespace eventcast::dbn
