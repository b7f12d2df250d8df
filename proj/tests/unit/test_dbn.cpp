#include "eventcast/models/dbn.hpp"

#include "test_support.hpp"

#include <cmath>

using namespace eventcast;
using namespace eventcast::dbn;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Date kStart = Date::from_ymd(2018, 3, 5);

Eigen::MatrixXd bars(int repeats) {
	Eigen::MatrixXd x(2 * repeats, 4);
	for (int i = 0; i < repeats; ++i) {
		x.row(2 * i) << 1, 1, 0, 0;
		x.row(2 * i + 1) << 0, 0, 1, 1;
	}
	return x;
}

Eigen::MatrixXd uniform01(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
	std::mt19937_64 rng(seed);
	std::uniform_real_distribution<double> u(0.0, 1.0);
	Eigen::MatrixXd x(rows, cols);
	for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
	return x;
}

DbnParams small_params() {
	DbnParams p;
	p.layers = 2;
	p.units = 8;
	p.plr = 0.05;
	p.tlr = 0.05;
	p.batch = 10;
	p.pretrain_epochs = 10;
	p.max_epochs = 500;
	p.window = 7;
	return p;
}

} // namespace

TEST_CASE("hidden probability examples", "[dbn][rbm]") {
	Rbm zero{Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(2)};
	for (double p : rbm_hidden_prob(zero, Eigen::VectorXd::Ones(3))) CHECK(p == 0.5);
	Rbm biased = zero;
	biased.b_hidden.setConstant(10.0);
	for (double p : rbm_hidden_prob(biased, Eigen::VectorXd::Ones(3))) CHECK(p > 0.9999);
	Rbm single{Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};
	CHECK_THAT(rbm_hidden_prob(single, Eigen::VectorXd::Ones(1))[0], WithinAbs(0.7311, 1e-4));
	CHECK_THAT(rbm_hidden_prob(single, Eigen::VectorXd::Ones(1))[0], WithinAbs(1.0 / (1.0 + std::exp(-1.0)), 1e-15));
	REQUIRE_ERROR_CODE(rbm_hidden_prob(zero, Eigen::VectorXd::Ones(2)), ErrorCode::DimensionMismatch);
}

TEST_CASE("RBM learns the bars data", "[dbn][rbm]") {
	RbmTrainOptions o;
	o.units = 4;
	o.learning_rate = 0.1;
	o.epochs = 200;
	o.batch = 10;
	o.seed = 7;
	const auto r = rbm_train(bars(50), o);
	REQUIRE(r.reconstruction_error.size() == 200);
	CHECK(r.reconstruction_error.back() <= 0.5 * r.reconstruction_error.front());
	const auto h = rbm_hidden_probs(r.rbm, bars(50));
	CHECK(h.minCoeff() > 0.0);
	CHECK(h.maxCoeff() < 1.0);
}

TEST_CASE("RBM training is seeded and deterministic", "[dbn][rbm]") {
	RbmTrainOptions o;
	o.units = 5;
	o.epochs = 0;
	o.seed = 99;
	const auto data = uniform01(40, 6, 1);
	const auto init = rbm_train(data, o);
	CHECK(init.rbm.w == rbm_initialize(6, 5, 99).w);
	o.epochs = 20;
	o.learning_rate = 0.05;
	o.k = 2;
	const auto a = rbm_train(data, o), b = rbm_train(data, o);
	CHECK(a.rbm.w == b.rbm.w);
	CHECK(a.rbm.b_visible == b.rbm.b_visible);
	CHECK(a.rbm.b_hidden == b.rbm.b_hidden);
	o.seed = 100;
	CHECK(rbm_train(data, o).rbm.w != a.rbm.w);
	REQUIRE_ERROR_CODE(rbm_train(Eigen::MatrixXd(0, 3), o), ErrorCode::EmptyData);
}

TEST_CASE("greedy pretraining stacks layers on hidden probabilities", "[dbn][pretrain]") {
	const auto x = uniform01(60, 5, 2);
	DbnParams p = small_params();
	p.layers = 1;
	const auto one = dbn_pretrain(x, p, 11);
	REQUIRE(one.size() == 1);
	RbmTrainOptions o{p.units, p.plr, p.k, p.pretrain_epochs, p.batch, 11};
	CHECK(one[0].w == rbm_train(x, o).rbm.w);

	DbnParams aoi = preset_params("aoi_sales");
	aoi.pretrain_epochs = 2;
	const auto two = dbn_pretrain(x, aoi, 3);
	REQUIRE(two.size() == 2);
	CHECK(two[0].w.rows() == 5);
	CHECK(two[0].w.cols() == 50);
	CHECK(two[1].w.rows() == 50);
	CHECK(two[1].w.cols() == 50);
	const Eigen::MatrixXd h1 = rbm_hidden_probs(two[0], x);
	RbmTrainOptions o2{aoi.units, aoi.plr, aoi.k, aoi.pretrain_epochs, aoi.batch, 4};
	CHECK(two[1].w == rbm_train(h1, o2).rbm.w);
	for (Eigen::Index r = 0; r < 5; ++r) {
		const Eigen::VectorXd direct = rbm_hidden_prob(two[0], x.row(r).transpose());
		CHECK((direct.transpose() - h1.row(r)).cwiseAbs().maxCoeff() < 1e-10);
	}
}

TEST_CASE("back-propagation matches central finite differences", "[dbn][gradient]") {
	std::mt19937_64 rng(5);
	std::normal_distribution<double> dist(0.0, 0.7);
	std::vector<Rbm> stack{rbm_initialize(4, 6, 1), rbm_initialize(6, 3, 2)};
	auto net = network_from_stack(stack, 3);
	auto flat = net.flatten();
	for (double& v : flat) v = dist(rng);
	net.assign(flat);
	const auto x = uniform01(5, 4, 6);
	const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(5, -1.0, 2.0);
	const double l2 = 0.01;
	const auto g = network_gradient(net, x, y, l2);
	const double eps = 1e-5;
	double worst = 0.0;
	for (std::size_t i = 0; i < flat.size(); ++i) {
		auto up = flat, down = flat;
		up[i] += eps;
		down[i] -= eps;
		Network a = net, b = net;
		a.assign(up);
		b.assign(down);
		const double fd = (network_loss(a, x, y, l2) - network_loss(b, x, y, l2)) / (2 * eps);
		worst = std::max(worst, std::abs(g[i] - fd) / std::max(std::abs(g[i]) + std::abs(fd), 1e-8));
	}
	CHECK(worst < 1e-4);
}

TEST_CASE("zero fine-tuning rate keeps the pretrained weights", "[dbn][finetune]") {
	const auto x = uniform01(50, 3, 8);
	const Eigen::VectorXd y = x.rowwise().sum();
	auto p = small_params();
	p.tlr = 0.0;
	p.max_epochs = 5;
	const auto stack = dbn_pretrain(x, p, 1);
	const auto r = dbn_finetune(stack, x, y, p, 1);
	CHECK(r.net.flatten() == network_from_stack(stack, 1).flatten());
	REQUIRE_ERROR_CODE(dbn_finetune(stack, x.topRows(9), y.head(9), p, 1), ErrorCode::TooFewRows);
}

TEST_CASE("toy regression is learned", "[dbn][finetune]") {
	const auto x = uniform01(300, 3, 9);
	const Eigen::VectorXd y = x.rowwise().sum();
	auto p = small_params();
	p.tlr = 0.5;
	const auto reg = fit_dbn_regressor(x, y, p, 4);
	const double rmse = std::sqrt((reg.predict(x) - y).squaredNorm() / 300.0);
	const double sd = std::sqrt((y.array() - y.mean()).square().mean());
	CHECK(rmse < 0.1 * sd);
}

TEST_CASE("small steps give non-increasing training loss", "[dbn][finetune]") {
	const auto x = uniform01(200, 3, 10);
	const Eigen::VectorXd y = x.rowwise().sum().array() - 1.5;
	auto p = small_params();
	p.tlr = 1e-4;
	p.max_epochs = 10;
	p.patience = 1000000;
	const auto stack = dbn_pretrain(x, p, 2);
	const auto r = dbn_finetune(stack, x, y, p, 2);
	REQUIRE(r.train_loss.size() == 11);
	for (std::size_t i = 1; i < r.train_loss.size(); ++i) CHECK(r.train_loss[i] <= r.train_loss[i - 1]);
	for (double v : r.net.flatten()) CHECK(std::isfinite(v));
}

TEST_CASE("early stopping returns the best validation epoch", "[dbn][finetune]") {
	const auto x = uniform01(120, 3, 12);
	const auto noise = testing::white_noise(120, 12);
	Eigen::VectorXd y = x.col(0);
	for (Eigen::Index i = 0; i < 120; ++i) y[i] += noise[static_cast<std::size_t>(i)];
	auto p = small_params();
	p.tlr = 0.5;
	const auto r = dbn_finetune(dbn_pretrain(x, p, 3), x, y, p, 3);
	const double best = r.validation_loss[static_cast<std::size_t>(r.best_epoch)];
	for (double v : r.validation_loss) CHECK(best <= v);
	CHECK(static_cast<int>(r.validation_loss.size()) - 1 <= r.best_epoch + p.patience);
}

TEST_CASE("full training is bit-deterministic per seed", "[dbn]") {
	std::vector<double> v(120);
	for (std::size_t t = 0; t < v.size(); ++t) v[t] = 100.0 + 10.0 * std::sin(static_cast<double>(t) * 0.9);
	const TimeSeries s(kStart, v);
	auto p = small_params();
	p.max_epochs = 50;
	const auto a = fit_dbn(s, nullptr, p, TransformSpec::log(), 21);
	const auto b = fit_dbn(s, nullptr, p, TransformSpec::log(), 21);
	CHECK(a.regressor.net.flatten() == b.regressor.net.flatten());
	CHECK(dbn_forecast(a, nullptr, 10).values() == dbn_forecast(b, nullptr, 10).values());
}

TEST_CASE("forecast contract", "[dbn][forecast]") {
	std::vector<double> v(100);
	for (std::size_t t = 0; t < v.size(); ++t) v[t] = 50.0 + 5.0 * static_cast<double>(t % 7);
	const TimeSeries s(kStart, v);
	Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(130, 1);
	for (Eigen::Index i = 0; i < 130; i += 9) cov(i, 0) = 1.0;
	const DesignMatrix x(kStart, {"gacha"}, cov);
	auto p = small_params();
	p.max_epochs = 30;
	const auto m = fit_dbn(s, &x, p, TransformSpec::none(), 5);

	const auto f30 = dbn_forecast(m, &x, 30);
	CHECK(f30.size() == 30);
	CHECK(f30.start() == s.end() + 1);

	const auto f1 = dbn_forecast(m, s, &x, 1);
	Eigen::MatrixXd row(1, 8);
	for (int j = 0; j < 7; ++j) row(0, j) = v[static_cast<std::size_t>(93 + j)];
	row(0, 7) = cov(100, 0);
	CHECK(f1[0] == m.regressor.predict(row)[0]);
	CHECK(f30[0] == f1[0]);

	REQUIRE_ERROR_CODE(dbn_forecast(m, s.slice(0, 5), &x, 3), ErrorCode::HistoryTooShort);
	REQUIRE_ERROR_CODE(dbn_forecast(m, nullptr, 3), ErrorCode::MissingFutureCovariates);
	const auto other = DesignMatrix::zeros({kStart, kStart + 129}, {"promotion"});
	REQUIRE_ERROR_CODE(dbn_forecast(m, &other, 3), ErrorCode::ColumnMismatch);
}

TEST_CASE("constant series forecasts stay near the constant", "[dbn][forecast]") {
	const TimeSeries s(kStart, std::vector<double>(120, 250.0));
	const auto zeros = DesignMatrix::zeros({kStart, kStart + 149}, {"gacha", "promotion"});
	auto p = small_params();
	p.max_epochs = 100;
	const auto m = fit_dbn(s, &zeros, p, TransformSpec::none(), 8);
	const auto f = dbn_forecast(m, &zeros, 30);
	for (double v : f.values()) CHECK_THAT(v, WithinRel(250.0, 0.05));
}

TEST_CASE("presets and JSON round trip", "[dbn][json]") {
	const auto gs = preset_params("gs_sales");
	CHECK(gs.layers == 2);
	CHECK(gs.units == 300);
	CHECK(gs.plr == 1e-3);
	CHECK(gs.tlr == 0.1);
	CHECK(gs.k == 2);
	CHECK(gs.batch == 10);
	CHECK(preset_params("aoi_sales").k == 5);
	CHECK(preset_params("gs_playtime").batch == 50);
	CHECK(preset_params("aoi_playtime").plr == 1e-4);

	std::vector<double> v(80);
	for (std::size_t t = 0; t < v.size(); ++t) v[t] = 10.0 + std::cos(static_cast<double>(t));
	auto p = small_params();
	p.max_epochs = 20;
	const auto m = fit_dbn(TimeSeries(kStart, v), nullptr, p, TransformSpec::box_cox(0.5), 1);
	const auto copy = dbn_from_json(nlohmann::json::parse(to_json(m).dump()));
	CHECK(dbn_forecast(copy, nullptr, 15).values() == dbn_forecast(m, nullptr, 15).values());
}
