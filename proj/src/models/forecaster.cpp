#include "eventcast/models/forecaster.hpp"

#include "eventcast/core/json_io.hpp"
#include "eventcast/error.hpp"

#include <algorithm>
#include <set>

namespace eventcast {

std::string_view to_string(Family family) {
	switch (family) {
	case Family::Arima: return "arima";
	case Family::Gbm: return "gbm";
	case Family::Gam: return "gam";
	case Family::Dbn: return "dbn";
	}
	return "unknown";
}

Family parse_family(std::string_view text) {
	if (text == "arima") return Family::Arima;
	if (text == "gbm") return Family::Gbm;
	if (text == "gam") return Family::Gam;
	if (text == "dbn") return Family::Dbn;
	throw Error(ErrorCode::InvalidArgument, "unknown model family '" + std::string(text) + "'", "family");
}

arima::ArimaOrder default_arima_order() { return {1, 0, 1, 0, 1, 1, 7}; }

namespace {

using nlohmann::json;

const std::set<std::string> kPresets{"aoi_sales", "gs_sales", "aoi_playtime", "gs_playtime"};

template <class T>
void read(const json& params, const std::string& key, T& out) {
	if (!params.contains(key)) return;
	try {
		out = params.at(key).get<T>();
	} catch (const json::exception&) {
		throw Error(ErrorCode::InvalidArgument, "parameter '" + key + "' has the wrong type", "params." + key);
	}
}

void check_keys(const json& params, const std::set<std::string>& allowed) {
	if (!params.is_object()) throw Error(ErrorCode::InvalidArgument, "params must be an object", "params");
	for (const auto& [key, value] : params.items()) {
		if (!allowed.contains(key)) {
			throw Error(ErrorCode::InvalidArgument, "unknown parameter '" + key + "'", "params." + key);
		}
	}
}

// Re-raise with the path rooted at the config document.
template <class F>
auto under_params(F&& f) {
	try {
		return f();
	} catch (const Error& e) {
		if (e.code() != ErrorCode::InvalidArgument || e.field_path().starts_with("params")) throw;
		const std::string path = e.field_path().empty() ? "params" : "params." + e.field_path();
		throw Error(e.code(), e.message(), path);
	}
}

// "auto" is resolved against the training series at fit time.
struct TransformChoice {
	bool automatic = false;
	TransformSpec spec{};
};

TransformChoice transform_choice(const ModelConfig& c) {
	if (!c.params.contains("transform")) {
		if (c.preset.ends_with("_sales")) return {true, {}};
		if (c.preset.ends_with("_playtime")) return {false, TransformSpec::log()};
		return {};
	}
	const auto& t = c.params.at("transform");
	if (t.is_string()) {
		const auto s = t.get<std::string>();
		if (s == "auto") return {true, {}};
		if (s == "none") return {};
		if (s == "log") return {false, TransformSpec::log()};
		throw Error(ErrorCode::InvalidArgument, "unknown transform '" + s + "'", "params.transform");
	}
	try {
		const auto spec = transform_from_json(t);
		if (spec.kind == TransformKind::BoxCox && !std::isfinite(spec.lambda)) {
			throw Error(ErrorCode::InvalidArgument, "Box-Cox lambda must be finite", "params.transform.lambda");
		}
		return {false, spec};
	} catch (const json::exception&) {
		throw Error(ErrorCode::InvalidArgument, "transform must be a name or {kind, lambda}", "params.transform");
	}
}

TransformSpec resolve_transform(const ModelConfig& c, const TimeSeries& series) {
	const auto choice = transform_choice(c);
	if (!choice.automatic) return choice.spec;
	const double lambda = guerrero_lambda(series);
	return lambda == 0.0 ? TransformSpec::log() : TransformSpec::box_cox(lambda);
}

struct ArimaSetup {
	arima::ArimaOrder order;
	std::optional<bool> include_constant;
	arima::CovariateMode mode = arima::CovariateMode::Differenced;
};

ArimaSetup arima_setup(const ModelConfig& c) {
	check_keys(c.params, {"transform", "order", "include_constant", "covariate_mode"});
	ArimaSetup s;
	s.order = c.preset.empty() ? default_arima_order() : arima::preset_order(c.preset);
	if (c.params.contains("order")) {
		const auto& o = c.params.at("order");
		if (!o.is_object()) throw Error(ErrorCode::InvalidArgument, "order must be an object", "params.order");
		for (const auto& [key, value] : o.items()) {
			int* slot = key == "p"   ? &s.order.p
			            : key == "d" ? &s.order.d
			            : key == "q" ? &s.order.q
			            : key == "P" ? &s.order.P
			            : key == "D" ? &s.order.D
			            : key == "Q" ? &s.order.Q
			            : key == "m" ? &s.order.m
			                         : nullptr;
			if (!slot) throw Error(ErrorCode::InvalidArgument, "unknown order field '" + key + "'", "params.order." + key);
			if (!value.is_number_integer()) {
				throw Error(ErrorCode::InvalidArgument, "order fields are integers", "params.order." + key);
			}
			*slot = value.get<int>();
		}
	}
	try {
		s.order.validate();
	} catch (const Error& e) {
		throw Error(e.code(), e.message(), "params.order");
	}
	if (c.params.contains("include_constant")) {
		bool v = false;
		read(c.params, "include_constant", v);
		s.include_constant = v;
	}
	if (c.params.contains("covariate_mode")) {
		std::string mode;
		read(c.params, "covariate_mode", mode);
		if (mode == "differenced") s.mode = arima::CovariateMode::Differenced;
		else if (mode == "raw") s.mode = arima::CovariateMode::Raw;
		else throw Error(ErrorCode::InvalidArgument, "covariate_mode is differenced or raw", "params.covariate_mode");
	}
	return s;
}

gbm::GbmParams gbm_setup(const ModelConfig& c) {
	check_keys(c.params, {"transform", "max_depth", "eta", "n_rounds", "min_samples_leaf", "early_stopping_rounds"});
	auto p = c.preset.empty() ? gbm::GbmParams{} : gbm::preset_params(c.preset);
	read(c.params, "max_depth", p.max_depth);
	read(c.params, "eta", p.eta);
	read(c.params, "n_rounds", p.n_rounds);
	read(c.params, "min_samples_leaf", p.min_samples_leaf);
	if (c.params.contains("early_stopping_rounds")) {
		int v = 0;
		read(c.params, "early_stopping_rounds", v);
		p.early_stopping_rounds = v;
	}
	under_params([&] {
		p.validate();
		return 0;
	});
	return p;
}

std::optional<std::vector<gam::SmoothTerm>> gam_setup(const ModelConfig& c) {
	check_keys(c.params, {"transform", "terms"});
	if (!c.preset.empty() && !kPresets.contains(c.preset)) {
		throw Error(ErrorCode::InvalidArgument, "unknown preset '" + c.preset + "'", "preset");
	}
	if (!c.params.contains("terms")) return std::nullopt;
	const auto& arr = c.params.at("terms");
	if (!arr.is_array()) throw Error(ErrorCode::InvalidArgument, "terms must be an array", "params.terms");
	std::vector<gam::SmoothTerm> terms;
	for (std::size_t i = 0; i < arr.size(); ++i) {
		const std::string path = "params.terms[" + std::to_string(i) + "]";
		const auto& j = arr[i];
		try {
			gam::SmoothTerm t;
			t.covariate = j.at("covariate").get<std::string>();
			t.kind = gam::parse_term_kind(j.at("kind").get<std::string>());
			t.n_basis = j.value("n_basis", t.n_basis);
			if (j.contains("period") && !j.at("period").is_null()) t.period = j.at("period").get<double>();
			if (j.contains("lambda") && !j.at("lambda").is_null()) t.lambda = j.at("lambda").get<double>();
			t.validate();
			terms.push_back(std::move(t));
		} catch (const json::exception& e) {
			throw Error(ErrorCode::InvalidArgument, std::string("malformed term: ") + e.what(), path);
		} catch (const Error& e) {
			throw Error(e.code(), e.message(), e.field_path().empty() ? path : path + "." + e.field_path());
		}
	}
	return terms;
}

dbn::DbnParams dbn_setup(const ModelConfig& c) {
	check_keys(c.params, {"transform", "layers", "units", "plr", "tlr", "k", "batch", "l2", "window",
	                      "pretrain_epochs", "max_epochs", "patience"});
	auto p = c.preset.empty() ? dbn::DbnParams{} : dbn::preset_params(c.preset);
	read(c.params, "layers", p.layers);
	read(c.params, "units", p.units);
	read(c.params, "plr", p.plr);
	read(c.params, "tlr", p.tlr);
	read(c.params, "k", p.k);
	read(c.params, "batch", p.batch);
	read(c.params, "l2", p.l2);
	read(c.params, "window", p.window);
	read(c.params, "pretrain_epochs", p.pretrain_epochs);
	read(c.params, "max_epochs", p.max_epochs);
	read(c.params, "patience", p.patience);
	under_params([&] {
		p.validate();
		return 0;
	});
	return p;
}

DesignMatrix trend_column(const DateRange& range) {
	Eigen::MatrixXd t(range.length(), 1);
	for (std::int32_t i = 0; i < range.length(); ++i) t(i, 0) = (range.first + i).days();
	return DesignMatrix(range.first, {"t"}, std::move(t));
}

bool varies(const Eigen::VectorXd& v) { return v.size() > 0 && v.maxCoeff() > v.minCoeff(); }

std::size_t unique_count(const Eigen::VectorXd& v) {
	std::vector<double> u(v.data(), v.data() + v.size());
	std::sort(u.begin(), u.end());
	return static_cast<std::size_t>(std::unique(u.begin(), u.end()) - u.begin());
}

// Default-formula terms adapted to the training data: smooths on columns with few distinct
// values shrink their basis, and below three values become linear.
std::vector<gam::SmoothTerm> gam_terms(const DesignMatrix& x) {
	std::vector<gam::SmoothTerm> terms;
	for (auto t : gam::default_game_formula(x.columns())) {
		if (!x.find(t.covariate)) continue;
		if (t.kind == gam::TermKind::PSpline || t.kind == gam::TermKind::ThinPlate) {
			const auto u = static_cast<int>(unique_count(x.column(t.covariate)));
			if (u < 3) {
				t.kind = gam::TermKind::Linear;
				t.n_basis = 1;
			} else {
				t.n_basis = std::min(t.n_basis, u);
			}
		}
		terms.push_back(std::move(t));
	}
	return terms;
}

Eigen::VectorXd transformed_values(const TimeSeries& series, const TransformSpec& spec) {
	const auto z = transform(series, spec);
	return Eigen::Map<const Eigen::VectorXd>(z.values().data(), static_cast<Eigen::Index>(z.size()));
}

} // namespace

DesignMatrix model_features(Family family, const EventCalendar& calendar, const DateRange& range,
                            const EncodingConfig& encoding) {
	auto x = encode_calendar(calendar, range, encoding);
	switch (family) {
	case Family::Arima: return x;
	case Family::Gbm:
		return join_covariates(join_covariates(x, calendar_features(range, true)), trend_column(range));
	case Family::Gam:
		return join_covariates(join_covariates(x, calendar_features(range, false)), trend_column(range));
	case Family::Dbn: {
		const auto cal = calendar_features(range, true);
		std::vector<std::string> dummies;
		for (const auto& c : cal.columns()) {
			if (c.starts_with("dow_") || c.starts_with("month_")) dummies.push_back(c);
		}
		return join_covariates(x, cal.select(dummies));
	}
	}
	return x;
}

void ModelConfig::validate() const {
	if (!preset.empty() && !kPresets.contains(preset)) {
		throw Error(ErrorCode::InvalidArgument, "unknown preset '" + preset + "'", "preset");
	}
	if (encoding.marketing_days < 1 || encoding.promotion_decay_factor < 1 || !(encoding.cap > 0.0)) {
		throw Error(ErrorCode::InvalidArgument, "encoding knobs must be positive", "encoding");
	}
	transform_choice(*this);
	switch (family) {
	case Family::Arima: arima_setup(*this); break;
	case Family::Gbm: gbm_setup(*this); break;
	case Family::Gam: gam_setup(*this); break;
	case Family::Dbn: dbn_setup(*this); break;
	}
}

nlohmann::json ModelConfig::to_json() const {
	return {{"family", std::string(eventcast::to_string(family))},
	        {"preset", preset},
	        {"params", params},
	        {"seed", seed},
	        {"encoding",
	         {{"marketing_days", encoding.marketing_days},
	          {"promotion_decay_factor", encoding.promotion_decay_factor},
	          {"cap", encoding.cap}}}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
	if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "model config must be an object");
	ModelConfig c;
	if (!j.contains("family") || !j.at("family").is_string()) {
		throw Error(ErrorCode::InvalidArgument, "family is required", "family");
	}
	c.family = parse_family(j.at("family").get<std::string>());
	read(j, "preset", c.preset);
	if (j.contains("params")) {
		c.params = j.at("params");
		if (c.params.is_null()) c.params = nlohmann::json::object();
		if (!c.params.is_object()) throw Error(ErrorCode::InvalidArgument, "params must be an object", "params");
	}
	if (j.contains("seed")) {
		if (!j.at("seed").is_number_integer() || j.at("seed").get<long long>() < 0) {
			throw Error(ErrorCode::InvalidArgument, "seed must be a non-negative integer", "seed");
		}
		c.seed = j.at("seed").get<std::uint64_t>();
	}
	if (j.contains("encoding")) {
		const auto& e = j.at("encoding");
		try {
			c.encoding.marketing_days = e.value("marketing_days", c.encoding.marketing_days);
			c.encoding.promotion_decay_factor = e.value("promotion_decay_factor", c.encoding.promotion_decay_factor);
			c.encoding.cap = e.value("cap", c.encoding.cap);
		} catch (const nlohmann::json::exception&) {
			throw Error(ErrorCode::InvalidArgument, "malformed encoding", "encoding");
		}
	}
	c.validate();
	return c;
}

FittedModel fit_model(const ModelConfig& config, const TimeSeries& series, const EventCalendar& calendar) {
	config.validate();
	FittedModel m;
	m.config_ = config;
	m.training_range_ = series.range();
	m.transform_ = resolve_transform(config, series);

	const auto features = model_features(config.family, calendar, series.range(), config.encoding);
	m.training_columns_ = features.columns();
	for (const auto& c : features.columns()) {
		if (!varies(features.column(c))) continue;
		// A yearly index needs two full years before it stops aliasing with the trend.
		if (config.family == Family::Gam && c == "day_of_year" && series.size() < 730) continue;
		m.used_columns_.push_back(c);
	}
	const auto x = features.select(m.used_columns_);
	const DesignMatrix* xp = x.cols() > 0 ? &x : nullptr;

	switch (config.family) {
	case Family::Arima: {
		const auto s = arima_setup(config);
		arima::FitOptions o;
		o.transform = m.transform_;
		o.include_constant = s.include_constant;
		o.covariate_mode = s.mode;
		m.inner_ = arima::fit_arima(series, s.order, xp, o);
		break;
	}
	case Family::Gbm: {
		const auto p = gbm_setup(config);
		const Eigen::VectorXd z = transformed_values(series, m.transform_);
		if (p.early_stopping_rounds) {
			const auto n = static_cast<Eigen::Index>(series.size());
			const Eigen::Index n_train = n - std::max<Eigen::Index>(1, n / 5);
			const Eigen::MatrixXd xv = x.values().bottomRows(n - n_train);
			const Eigen::VectorXd yv = z.tail(n - n_train);
			m.inner_ = gbm::fit_gbm(x.values().topRows(n_train), std::span<const double>(z.data(), n_train), p,
			                        gbm::Validation{xv, std::span<const double>(yv.data(), yv.size())});
		} else {
			m.inner_ = gbm::fit_gbm(x.values(), std::span<const double>(z.data(), z.size()), p);
		}
		break;
	}
	case Family::Gam: {
		auto terms = gam_setup(config);
		if (terms) {
			// Terms on columns that stay constant over the training window carry no information.
			std::erase_if(*terms, [&](const gam::SmoothTerm& t) {
				return features.find(t.covariate) && !x.find(t.covariate);
			});
			if (terms->empty()) throw Error(ErrorCode::DegenerateInput, "every GAM term is constant over the training window");
		}
		const Eigen::VectorXd z = transformed_values(series, m.transform_);
		m.inner_ = gam::fit_gam(std::span<const double>(z.data(), z.size()), x, terms ? *terms : gam_terms(x));
		break;
	}
	case Family::Dbn: {
		const auto p = dbn_setup(config);
		m.inner_ = dbn::fit_dbn(series, xp, p, m.transform_, config.seed);
		break;
	}
	}
	return m;
}

ModelForecast FittedModel::forecast(const EventCalendar& calendar, int horizon) const {
	if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be positive", "horizon");
	const DateRange range{training_end() + 1, training_end() + horizon};
	const auto features = model_features(family(), calendar, range, config_.encoding);
	const auto x = align_columns(features, training_columns_).select(used_columns_);
	const DesignMatrix* xp = x.cols() > 0 ? &x : nullptr;

	auto raw = [&](const Eigen::VectorXd& z) {
		return inverse_transform(TimeSeries(range.first, std::vector<double>(z.data(), z.data() + z.size())), transform_);
	};
	TimeSeries values = std::visit(
	    [&](const auto& model) -> TimeSeries {
		    using T = std::decay_t<decltype(model)>;
		    if constexpr (std::is_same_v<T, arima::FittedArima>) return arima::forecast_arima(model, horizon, xp);
		    else if constexpr (std::is_same_v<T, gbm::GbmEnsemble>) return raw(gbm::predict_gbm(model, x.values()));
		    else if constexpr (std::is_same_v<T, gam::FittedGam>) return raw(gam::predict_gam(model, x));
		    else return dbn::dbn_forecast(model, xp, horizon);
	    },
	    inner_);
	return {std::move(values), x};
}

nlohmann::json FittedModel::to_json() const {
	const nlohmann::json model = std::visit(
	    [](const auto& inner) -> nlohmann::json {
		    using T = std::decay_t<decltype(inner)>;
		    if constexpr (std::is_same_v<T, arima::FittedArima>) return arima::to_json(inner);
		    else if constexpr (std::is_same_v<T, gbm::GbmEnsemble>) return gbm::to_json(inner);
		    else if constexpr (std::is_same_v<T, gam::FittedGam>) return gam::to_json(inner);
		    else return dbn::to_json(inner);
	    },
	    inner_);
	return {{"format", "eventcast.model"},
	        {"version", 1},
	        {"family", std::string(eventcast::to_string(family()))},
	        {"config", config_.to_json()},
	        {"training_range", {{"from", training_range_.first.to_iso()}, {"to", training_range_.last.to_iso()}}},
	        {"transform", eventcast::to_json(transform_)},
	        {"training_columns", training_columns_},
	        {"used_columns", used_columns_},
	        {"model", model}};
}

FittedModel FittedModel::from_json(const nlohmann::json& j) {
	check_format(j, "eventcast.model", 1);
	FittedModel m;
	try {
		m.config_ = ModelConfig::from_json(j.at("config"));
		const auto family = parse_family(j.at("family").get<std::string>());
		if (family != m.config_.family) throw Error(ErrorCode::ParseError, "family disagrees with config", "family");
		m.training_range_ = {Date::parse(j.at("training_range").at("from").get<std::string>()),
		                     Date::parse(j.at("training_range").at("to").get<std::string>())};
		m.transform_ = transform_from_json(j.at("transform"));
		m.training_columns_ = j.at("training_columns").get<std::vector<std::string>>();
		m.used_columns_ = j.at("used_columns").get<std::vector<std::string>>();
		const auto& model = j.at("model");
		switch (family) {
		case Family::Arima: m.inner_ = arima::arima_from_json(model); break;
		case Family::Gbm: m.inner_ = gbm::gbm_from_json(model); break;
		case Family::Gam: m.inner_ = gam::gam_from_json(model); break;
		case Family::Dbn: m.inner_ = dbn::dbn_from_json(model); break;
		}
	} catch (const nlohmann::json::exception& e) {
		throw Error(ErrorCode::ParseError, std::string("malformed model document: ") + e.what());
	}
	return m;
}

} // namespace eventcast
