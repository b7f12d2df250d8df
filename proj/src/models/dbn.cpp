#include "eventcast/models/dbn.hpp"

#include "eventcast/core/json_io.hpp"
#include "eventcast/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace eventcast::dbn {

namespace {

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
	return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
	// splitmix64 step so nearby seeds give unrelated streams
	std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
	z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
	z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
	return z ^ (z >> 31);
}

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& idx, std::size_t from,
                            std::size_t to) {
	Eigen::MatrixXd out(static_cast<Eigen::Index>(to - from), x.cols());
	for (std::size_t i = from; i < to; ++i) out.row(static_cast<Eigen::Index>(i - from)) = x.row(idx[i]);
	return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& y, const std::vector<Eigen::Index>& idx, std::size_t from,
                       std::size_t to) {
	Eigen::VectorXd out(static_cast<Eigen::Index>(to - from));
	for (std::size_t i = from; i < to; ++i) out[static_cast<Eigen::Index>(i - from)] = y[idx[i]];
	return out;
}

} // namespace

// ---------------------------------------------------------------------------
// RBM

Eigen::VectorXd rbm_hidden_prob(const Rbm& rbm, const Eigen::VectorXd& v) {
	if (v.size() != rbm.visible()) {
		throw Error(ErrorCode::DimensionMismatch, "visible vector has " + std::to_string(v.size()) +
		                                              " entries, RBM expects " + std::to_string(rbm.visible()));
	}
	return sigmoid(rbm.w.transpose() * v + rbm.b_hidden);
}

Eigen::MatrixXd rbm_hidden_probs(const Rbm& rbm, const Eigen::MatrixXd& v) {
	if (v.cols() != rbm.visible()) {
		throw Error(ErrorCode::DimensionMismatch, "visible rows have " + std::to_string(v.cols()) +
		                                              " columns, RBM expects " + std::to_string(rbm.visible()));
	}
	return sigmoid((v * rbm.w).rowwise() + rbm.b_hidden.transpose());
}

Eigen::MatrixXd rbm_visible_probs(const Rbm& rbm, const Eigen::MatrixXd& h) {
	return sigmoid((h * rbm.w.transpose()).rowwise() + rbm.b_visible.transpose());
}

double reconstruction_error(const Rbm& rbm, const Eigen::MatrixXd& v) {
	const Eigen::MatrixXd r = rbm_visible_probs(rbm, rbm_hidden_probs(rbm, v));
	return (r - v).squaredNorm() / static_cast<double>(v.size());
}

Rbm rbm_initialize(Eigen::Index visible, Eigen::Index hidden, std::uint64_t seed) {
	std::mt19937_64 rng(seed);
	std::normal_distribution<double> dist(0.0, 0.01);
	Rbm rbm{Eigen::MatrixXd(visible, hidden), Eigen::VectorXd::Zero(visible), Eigen::VectorXd::Zero(hidden)};
	for (Eigen::Index i = 0; i < rbm.w.size(); ++i) rbm.w.data()[i] = dist(rng);
	return rbm;
}

RbmTrainResult rbm_train(const Eigen::MatrixXd& data, const RbmTrainOptions& options) {
	if (data.rows() == 0 || data.cols() == 0) throw Error(ErrorCode::EmptyData, "no rows to train the RBM on");
	if (options.units < 1 || options.k < 1 || options.batch < 1 || options.epochs < 0 || !(options.learning_rate >= 0.0)) {
		throw Error(ErrorCode::InvalidArgument, "RBM options must be positive");
	}
	RbmTrainResult result{rbm_initialize(data.cols(), options.units, options.seed), {}};
	Rbm& rbm = result.rbm;
	std::mt19937_64 rng(derive_seed(options.seed, 1));
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	auto sample = [&](const Eigen::MatrixXd& p) {
		Eigen::MatrixXd s(p.rows(), p.cols());
		for (Eigen::Index i = 0; i < p.size(); ++i) s.data()[i] = unit(rng) < p.data()[i] ? 1.0 : 0.0;
		return s;
	};

	std::vector<Eigen::Index> order(static_cast<std::size_t>(data.rows()));
	std::iota(order.begin(), order.end(), 0);
	const auto batch = static_cast<std::size_t>(std::min<Eigen::Index>(options.batch, data.rows()));
	for (int epoch = 0; epoch < options.epochs; ++epoch) {
		std::shuffle(order.begin(), order.end(), rng);
		for (std::size_t start = 0; start < order.size(); start += batch) {
			const std::size_t end = std::min(order.size(), start + batch);
			const Eigen::MatrixXd v0 = gather_rows(data, order, start, end);
			const Eigen::MatrixXd h0 = rbm_hidden_probs(rbm, v0);
			Eigen::MatrixXd h = sample(h0), vk, hk;
			for (int step = 0; step < options.k; ++step) {
				vk = rbm_visible_probs(rbm, h);
				hk = rbm_hidden_probs(rbm, vk);
				if (step + 1 < options.k) h = sample(hk);
			}
			const double scale = options.learning_rate / static_cast<double>(v0.rows());
			rbm.w += scale * (v0.transpose() * h0 - vk.transpose() * hk);
			rbm.b_visible += scale * (v0 - vk).colwise().sum().transpose();
			rbm.b_hidden += scale * (h0 - hk).colwise().sum().transpose();
		}
		if (!all_finite(rbm.w) || !rbm.b_visible.allFinite() || !rbm.b_hidden.allFinite()) {
			throw Error(ErrorCode::DomainError, "RBM weights became non-finite; lower the learning rate");
		}
		result.reconstruction_error.push_back(reconstruction_error(rbm, data));
	}
	return result;
}

// ---------------------------------------------------------------------------
// Parameters

void DbnParams::validate() const {
	auto positive = [](bool ok, const char* field) {
		if (!ok) throw Error(ErrorCode::InvalidArgument, std::string(field) + " must be positive", field);
	};
	positive(layers >= 1, "layers");
	positive(units >= 1, "units");
	positive(plr >= 0.0, "plr");
	positive(tlr >= 0.0, "tlr");
	positive(k >= 1, "k");
	positive(batch >= 1, "batch");
	positive(l2 >= 0.0, "l2");
	positive(window >= 1, "window");
	positive(pretrain_epochs >= 0, "pretrain_epochs");
	positive(max_epochs >= 0, "max_epochs");
	positive(patience >= 1, "patience");
}

DbnParams preset_params(std::string_view name) {
	DbnParams p;
	auto set = [&p](int h, int n, double plr, double tlr, int k, int b) {
		p.layers = h;
		p.units = n;
		p.plr = plr;
		p.tlr = tlr;
		p.k = k;
		p.batch = b;
	};
	if (name == "aoi_sales") set(2, 50, 1e-4, 0.01, 5, 50);
	else if (name == "gs_sales") set(2, 300, 1e-3, 0.1, 2, 10);
	else if (name == "aoi_playtime") set(2, 50, 1e-4, 0.01, 2, 50);
	else if (name == "gs_playtime") set(2, 300, 1e-4, 0.1, 2, 50);
	else throw Error(ErrorCode::InvalidArgument, "unknown DBN preset '" + std::string(name) + "'", "preset");
	return p;
}

std::vector<Rbm> dbn_pretrain(const Eigen::MatrixXd& x, const DbnParams& params, std::uint64_t seed) {
	params.validate();
	std::vector<Rbm> stack;
	Eigen::MatrixXd input = x;
	for (int layer = 0; layer < params.layers; ++layer) {
		RbmTrainOptions o;
		o.units = params.units;
		o.learning_rate = params.plr;
		o.k = params.k;
		o.epochs = params.pretrain_epochs;
		o.batch = params.batch;
		o.seed = seed + static_cast<std::uint64_t>(layer);
		auto trained = rbm_train(input, o);
		input = rbm_hidden_probs(trained.rbm, input);
		stack.push_back(std::move(trained.rbm));
	}
	return stack;
}

// ---------------------------------------------------------------------------
// Network

Eigen::VectorXd Network::forward(const Eigen::MatrixXd& x) const {
	Eigen::MatrixXd a = x;
	for (std::size_t l = 0; l < weights.size(); ++l) a = sigmoid((a * weights[l]).rowwise() + biases[l].transpose());
	return (a * head).array() + head_bias;
}

std::vector<double> Network::flatten() const {
	std::vector<double> out;
	for (std::size_t l = 0; l < weights.size(); ++l) {
		out.insert(out.end(), weights[l].data(), weights[l].data() + weights[l].size());
		out.insert(out.end(), biases[l].data(), biases[l].data() + biases[l].size());
	}
	out.insert(out.end(), head.data(), head.data() + head.size());
	out.push_back(head_bias);
	return out;
}

void Network::assign(std::span<const double> flat) {
	std::size_t pos = 0;
	auto take = [&](double* dst, Eigen::Index n) {
		std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos), flat.begin() + static_cast<std::ptrdiff_t>(pos) + n, dst);
		pos += static_cast<std::size_t>(n);
	};
	for (std::size_t l = 0; l < weights.size(); ++l) {
		take(weights[l].data(), weights[l].size());
		take(biases[l].data(), biases[l].size());
	}
	take(head.data(), head.size());
	head_bias = flat[pos];
}

Network network_from_stack(const std::vector<Rbm>& stack, std::uint64_t seed) {
	if (stack.empty()) throw Error(ErrorCode::InvalidArgument, "empty RBM stack");
	Network net;
	for (std::size_t l = 0; l < stack.size(); ++l) {
		if (l > 0 && stack[l].visible() != stack[l - 1].hidden()) {
			throw Error(ErrorCode::DimensionMismatch, "RBM layers do not chain");
		}
		net.weights.push_back(stack[l].w);
		net.biases.push_back(stack[l].b_hidden);
	}
	std::mt19937_64 rng(derive_seed(seed, 200));
	std::normal_distribution<double> dist(0.0, 0.01);
	net.head.resize(stack.back().hidden());
	for (Eigen::Index i = 0; i < net.head.size(); ++i) net.head[i] = dist(rng);
	return net;
}

double network_loss(const Network& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double l2) {
	const Eigen::VectorXd r = net.forward(x) - y;
	double decay = net.head.squaredNorm();
	for (const auto& w : net.weights) decay += w.squaredNorm();
	return 0.5 * r.squaredNorm() / static_cast<double>(y.size()) + 0.5 * l2 * decay;
}

std::vector<double> network_gradient(const Network& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                     double l2) {
	const std::size_t layers = net.weights.size();
	std::vector<Eigen::MatrixXd> acts{x};
	for (std::size_t l = 0; l < layers; ++l) {
		acts.push_back(sigmoid((acts.back() * net.weights[l]).rowwise() + net.biases[l].transpose()));
	}
	const Eigen::VectorXd out = (acts.back() * net.head).array() + net.head_bias;
	const Eigen::VectorXd delta_out = (out - y) / static_cast<double>(y.size());

	Network grad = net;
	grad.head = acts.back().transpose() * delta_out + l2 * net.head;
	grad.head_bias = delta_out.sum();
	Eigen::MatrixXd delta = (delta_out * net.head.transpose()).cwiseProduct(
	    acts.back().cwiseProduct((1.0 - acts.back().array()).matrix()));
	for (std::size_t l = layers; l-- > 0;) {
		grad.weights[l] = acts[l].transpose() * delta + l2 * net.weights[l];
		grad.biases[l] = delta.colwise().sum().transpose();
		if (l > 0) {
			delta = (delta * net.weights[l].transpose()).cwiseProduct(acts[l].cwiseProduct((1.0 - acts[l].array()).matrix()));
		}
	}
	return grad.flatten();
}

FinetuneResult dbn_finetune(const std::vector<Rbm>& stack, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            const DbnParams& params, std::uint64_t seed) {
	params.validate();
	if (x.rows() != y.size()) throw Error(ErrorCode::LengthMismatch, "x and y row counts differ");
	if (x.rows() < 10) throw Error(ErrorCode::TooFewRows, "fine-tuning needs at least 10 rows");

	FinetuneResult result{network_from_stack(stack, seed), {}, {}, 0, false};
	std::mt19937_64 rng(derive_seed(seed, 300));
	std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
	std::iota(order.begin(), order.end(), 0);
	std::shuffle(order.begin(), order.end(), rng);
	const std::size_t n_train = static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(order.size())));
	const Eigen::MatrixXd xt = gather_rows(x, order, 0, n_train), xv = gather_rows(x, order, n_train, order.size());
	const Eigen::VectorXd yt = gather(y, order, 0, n_train), yv = gather(y, order, n_train, order.size());

	auto validation_loss = [&](const Network& net) {
		return 0.5 * (net.forward(xv) - yv).squaredNorm() / static_cast<double>(yv.size());
	};
	Network net = result.net;
	Network best = net;
	double best_val = validation_loss(net);
	result.train_loss.push_back(network_loss(net, xt, yt, params.l2));
	result.validation_loss.push_back(best_val);

	std::vector<Eigen::Index> batch_order(n_train);
	std::iota(batch_order.begin(), batch_order.end(), 0);
	const auto batch = static_cast<std::size_t>(params.batch);
	std::vector<double> flat = net.flatten();
	for (int epoch = 1; epoch <= params.max_epochs; ++epoch) {
		std::shuffle(batch_order.begin(), batch_order.end(), rng);
		for (std::size_t start = 0; start < n_train; start += batch) {
			const std::size_t end = std::min(n_train, start + batch);
			const auto g = network_gradient(net, gather_rows(xt, batch_order, start, end), gather(yt, batch_order, start, end), params.l2);
			for (std::size_t i = 0; i < flat.size(); ++i) flat[i] -= params.tlr * g[i];
			net.assign(flat);
		}
		const bool finite = std::all_of(flat.begin(), flat.end(), [](double v) { return std::isfinite(v); });
		if (!finite) {
			result.diverged = true;
			break;
		}
		const double val = validation_loss(net);
		result.train_loss.push_back(network_loss(net, xt, yt, params.l2));
		result.validation_loss.push_back(val);
		if (val < best_val) {
			best_val = val;
			best = net;
			result.best_epoch = epoch;
		} else if (epoch - result.best_epoch >= params.patience) {
			break;
		}
	}
	result.net = std::move(best);
	return result;
}

// ---------------------------------------------------------------------------
// Regressor

Eigen::VectorXd DbnRegressor::predict(const Eigen::MatrixXd& x) const {
	if (x.cols() != x_min.size()) {
		throw Error(ErrorCode::ColumnMismatch, "expected " + std::to_string(x_min.size()) + " features, got " +
		                                           std::to_string(x.cols()));
	}
	const Eigen::MatrixXd scaled = ((x.rowwise() - x_min.transpose()).array().rowwise() / x_scale.transpose().array()).matrix();
	return (net.forward(scaled).array() * y_scale + y_mean).matrix();
}

DbnRegressor fit_dbn_regressor(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const DbnParams& params,
                               std::uint64_t seed) {
	params.validate();
	if (x.rows() != y.size()) throw Error(ErrorCode::LengthMismatch, "x and y row counts differ");
	if (x.rows() < 10) throw Error(ErrorCode::TooFewRows, "DBN needs at least 10 training rows");
	DbnRegressor reg;
	reg.x_min = x.colwise().minCoeff().transpose();
	reg.x_scale = (x.colwise().maxCoeff().transpose() - reg.x_min).unaryExpr([](double s) { return s > 0.0 ? s : 1.0; });
	const Eigen::MatrixXd scaled = ((x.rowwise() - reg.x_min.transpose()).array().rowwise() / reg.x_scale.transpose().array()).matrix();
	reg.y_mean = y.mean();
	const double var = (y.array() - reg.y_mean).square().mean();
	reg.y_scale = var > 0.0 ? std::sqrt(var) : 1.0;
	const Eigen::VectorXd target = (y.array() - reg.y_mean) / reg.y_scale;

	const auto stack = dbn_pretrain(scaled, params, seed);
	auto tuned = dbn_finetune(stack, scaled, target, params, seed);
	reg.net = std::move(tuned.net);
	reg.train_loss = std::move(tuned.train_loss);
	reg.validation_loss = std::move(tuned.validation_loss);
	reg.best_epoch = tuned.best_epoch;
	return reg;
}

// ---------------------------------------------------------------------------
// Series forecaster

namespace {

Eigen::MatrixXd covariate_rows(const DesignMatrix* x, const std::vector<std::string>& columns, Date first, int count) {
	if (columns.empty()) return Eigen::MatrixXd(count, 0);
	if (!x) throw Error(ErrorCode::MissingFutureCovariates, "model uses covariates; none supplied");
	const DateRange need{first, first + (count - 1)};
	if (!x->range().contains(need)) {
		throw Error(ErrorCode::DateMismatch, "covariates do not cover " + need.first.to_iso() + ".." + need.last.to_iso());
	}
	try {
		return x->select(columns).slice(need).values();
	} catch (const Error& e) {
		if (e.code() == ErrorCode::MissingCovariate) throw Error(ErrorCode::ColumnMismatch, e.message(), e.field_path());
		throw;
	}
}

} // namespace

DbnModel fit_dbn(const TimeSeries& series, const DesignMatrix* covariates, const DbnParams& params,
                 const TransformSpec& transform, std::uint64_t seed) {
	params.validate();
	const int window = params.window;
	const auto n = static_cast<int>(series.size());
	if (n - window < 10) {
		throw Error(ErrorCode::SeriesTooShort, "need at least window + 10 = " + std::to_string(window + 10) + " days");
	}
	DbnModel model;
	model.params = params;
	model.seed = seed;
	model.transform = transform;
	if (covariates) model.covariates = covariates->columns();
	const TimeSeries z = eventcast::transform(series, transform);
	const Eigen::MatrixXd cov = covariate_rows(covariates, model.covariates, series.start() + window, n - window);

	const int rows = n - window;
	Eigen::MatrixXd x(rows, window + cov.cols());
	Eigen::VectorXd y(rows);
	for (int r = 0; r < rows; ++r) {
		for (int j = 0; j < window; ++j) x(r, j) = z[static_cast<std::size_t>(r + j)];
		if (cov.cols() > 0) x.row(r).tail(cov.cols()) = cov.row(r);
		y[r] = z[static_cast<std::size_t>(r + window)];
	}
	model.regressor = fit_dbn_regressor(x, y, params, seed);
	model.last_date = series.end();
	model.tail.assign(z.values().end() - window, z.values().end());
	return model;
}

namespace {

TimeSeries iterate(const DbnModel& model, std::vector<double> window_values, Date last, const DesignMatrix* future,
                   int horizon) {
	if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be positive", "horizon");
	const Eigen::MatrixXd cov = covariate_rows(future, model.covariates, last + 1, horizon);
	const int window = model.params.window;
	std::vector<double> out(static_cast<std::size_t>(horizon));
	Eigen::MatrixXd row(1, window + cov.cols());
	for (int h = 0; h < horizon; ++h) {
		for (int j = 0; j < window; ++j) row(0, j) = window_values[window_values.size() - static_cast<std::size_t>(window - j)];
		if (cov.cols() > 0) row.row(0).tail(cov.cols()) = cov.row(h);
		const double next = model.regressor.predict(row)[0];
		window_values.push_back(next);
		out[static_cast<std::size_t>(h)] = next;
	}
	return inverse_transform(TimeSeries(last + 1, std::move(out)), model.transform);
}

} // namespace

TimeSeries dbn_forecast(const DbnModel& model, const TimeSeries& history, const DesignMatrix* future, int horizon) {
	const int window = model.params.window;
	if (static_cast<int>(history.size()) < window) {
		throw Error(ErrorCode::HistoryTooShort, "history has " + std::to_string(history.size()) +
		                                            " days, the window needs " + std::to_string(window));
	}
	const auto tail = history.slice(history.size() - static_cast<std::size_t>(window), history.size());
	const TimeSeries z = transform(tail, model.transform);
	return iterate(model, z.values(), history.end(), future, horizon);
}

TimeSeries dbn_forecast(const DbnModel& model, const DesignMatrix* future, int horizon) {
	return iterate(model, model.tail, model.last_date, future, horizon);
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const DbnModel& model) {
	const auto& r = model.regressor;
	nlohmann::json layers = nlohmann::json::array();
	for (std::size_t l = 0; l < r.net.weights.size(); ++l) {
		layers.push_back({{"weights", matrix_to_json(r.net.weights[l])}, {"bias", vector_to_json(r.net.biases[l])}});
	}
	const auto& p = model.params;
	return {{"format", "eventcast.dbn"},
	        {"version", 1},
	        {"params",
	         {{"layers", p.layers},
	          {"units", p.units},
	          {"plr", p.plr},
	          {"tlr", p.tlr},
	          {"k", p.k},
	          {"batch", p.batch},
	          {"l2", p.l2},
	          {"window", p.window},
	          {"pretrain_epochs", p.pretrain_epochs},
	          {"max_epochs", p.max_epochs},
	          {"patience", p.patience}}},
	        {"seed", model.seed},
	        {"transform", eventcast::to_json(model.transform)},
	        {"covariates", model.covariates},
	        {"layers", layers},
	        {"head", vector_to_json(r.net.head)},
	        {"head_bias", r.net.head_bias},
	        {"x_min", vector_to_json(r.x_min)},
	        {"x_scale", vector_to_json(r.x_scale)},
	        {"y_mean", r.y_mean},
	        {"y_scale", r.y_scale},
	        {"best_epoch", r.best_epoch},
	        {"last_date", model.last_date.to_iso()},
	        {"tail", model.tail}};
}

DbnModel dbn_from_json(const nlohmann::json& j) {
	check_format(j, "eventcast.dbn", 1);
	DbnModel m;
	const auto& p = j.at("params");
	m.params.layers = p.at("layers");
	m.params.units = p.at("units");
	m.params.plr = p.at("plr");
	m.params.tlr = p.at("tlr");
	m.params.k = p.at("k");
	m.params.batch = p.at("batch");
	m.params.l2 = p.at("l2");
	m.params.window = p.at("window");
	m.params.pretrain_epochs = p.at("pretrain_epochs");
	m.params.max_epochs = p.at("max_epochs");
	m.params.patience = p.at("patience");
	m.params.validate();
	m.seed = j.at("seed");
	m.transform = transform_from_json(j.at("transform"));
	m.covariates = j.at("covariates").get<std::vector<std::string>>();
	auto& r = m.regressor;
	for (const auto& layer : j.at("layers")) {
		r.net.weights.push_back(matrix_from_json(layer.at("weights")));
		r.net.biases.push_back(vector_from_json(layer.at("bias")));
	}
	r.net.head = vector_from_json(j.at("head"));
	r.net.head_bias = j.at("head_bias");
	r.x_min = vector_from_json(j.at("x_min"));
	r.x_scale = vector_from_json(j.at("x_scale"));
	r.y_mean = j.at("y_mean");
	r.y_scale = j.at("y_scale");
	r.best_epoch = j.at("best_epoch");
	m.last_date = Date::parse(j.at("last_date").get<std::string>());
	m.tail = j.at("tail").get<std::vector<double>>();
	Eigen::Index width = r.x_min.size();
	for (std::size_t l = 0; l < r.net.weights.size(); ++l) {
		if (r.net.weights[l].rows() != width || r.net.biases[l].size() != r.net.weights[l].cols()) {
			throw Error(ErrorCode::ParseError, "DBN layer shapes do not chain");
		}
		width = r.net.weights[l].cols();
	}
	if (r.net.head.size() != width || static_cast<int>(m.tail.size()) != m.params.window ||
	    r.x_min.size() != m.params.window + static_cast<Eigen::Index>(m.covariates.size())) {
		throw Error(ErrorCode::ParseError, "DBN head, tail, or input width inconsistent");
	}
	return m;
}

} // namespace eventcast::dbn
