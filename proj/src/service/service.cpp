#include "eventcast/service/service.hpp"

#include "eventcast/core/json_io.hpp"
#include "eventcast/features/io.hpp"
#include "eventcast/simulation/scenario.hpp"

#include <ctime>
#include <future>
#include <set>
#include <thread>
#include <vector>

namespace eventcast::service {

namespace {

using json = nlohmann::json;

constexpr int kMaxForecastHorizon = 366;
constexpr int kMaxSimulationHorizon = 90;

std::string utc_now() {
	const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
	std::tm tm{};
	gmtime_r(&t, &tm);
	char buf[32];
	std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
	return buf;
}

json parse_body(const Request& r) {
	json j;
	try {
		j = json::parse(r.body.empty() ? std::string("{}") : r.body);
	} catch (const json::exception& e) {
		throw Error(ErrorCode::ParseError, std::string("body is not JSON: ") + e.what());
	}
	if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "body must be a JSON object");
	return j;
}

std::optional<std::string> optional_string(const json& j, const std::string& key) {
	if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
	if (!j.at(key).is_string()) throw Error(ErrorCode::InvalidArgument, key + " must be a string", key);
	return j.at(key).get<std::string>();
}

std::string required_string(const json& j, const std::string& key) {
	auto v = optional_string(j, key);
	if (!v) throw Error(ErrorCode::InvalidArgument, "missing field '" + key + "'", key);
	return *v;
}

int bounded_int(const json& j, const std::string& key, int fallback, int lo, int hi) {
	if (!j.contains(key)) return fallback;
	if (!j.at(key).is_number_integer()) throw Error(ErrorCode::InvalidArgument, key + " must be an integer", key);
	const auto v = j.at(key).get<long long>();
	if (v < lo || v > hi) {
		throw Error(ErrorCode::InvalidArgument,
		            key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]", key);
	}
	return static_cast<int>(v);
}

Date date_field(const std::string& text, const std::string& key) {
	try {
		return Date::parse(text);
	} catch (const Error& e) {
		throw Error(ErrorCode::InvalidArgument, e.message(), key);
	}
}

std::string checked_target(std::string target) {
	if (target != "sales" && target != "playtime") {
		throw Error(ErrorCode::InvalidArgument, "target must be 'sales' or 'playtime'", "target");
	}
	return target;
}

// Runs `f`, prefixing field paths of any Error with `prefix`.
template <class F>
auto with_prefix(const std::string& prefix, F&& f) {
	try {
		return f();
	} catch (const Error& e) {
		throw Error(e.code(), e.message(), e.field_path().empty() ? prefix : prefix + "." + e.field_path());
	}
}

json range_json(const DateRange& r) { return {{"from", r.first.to_iso()}, {"to", r.last.to_iso()}}; }

json describe(const Dataset& d, const Store& store) {
	auto j = d.summary();
	if (d.kind == DatasetKind::Series) {
		const auto s = store.series(d.id);
		j["from"] = s->start().to_iso();
		j["to"] = s->end().to_iso();
		j["rows"] = s->size();
	}
	return j;
}

Response reply(int status, const json& body) { return {status, body.dump()}; }

struct MethodNotAllowed {
	std::string message;
};

} // namespace

int http_status(ErrorCode code) {
	switch (code) {
	case ErrorCode::InvalidArgument:
	case ErrorCode::ParseError:
	case ErrorCode::UnknownEventType: return 400;
	case ErrorCode::NotFound: return 404;
	case ErrorCode::DuplicateEvent:
	case ErrorCode::RangeOutsideCalendar:
	case ErrorCode::MissingFutureCovariates: return 409;
	case ErrorCode::Timeout: return 504;
	default: return 422;
	}
}

json error_body(const Error& error) {
	return {{"code", std::string(to_string(error.code()))},
	        {"message", error.message()},
	        {"field_path", error.field_path()}};
}

Service::Service(std::shared_ptr<Store> store, ServiceOptions options)
    : store_(std::move(store)), options_(std::move(options)) {
	if (!options_.clock) options_.clock = utc_now;
}

Response Service::handle(const Request& r) const {
	try {
		std::vector<std::string> parts;
		for (std::size_t i = 0; i < r.path.size();) {
			const auto j = r.path.find('/', i);
			const auto end = j == std::string::npos ? r.path.size() : j;
			if (end > i) parts.push_back(r.path.substr(i, end - i));
			i = end + 1;
		}
		const std::string& m = r.method;
		auto allow = [&](std::initializer_list<const char*> methods) {
			for (const char* x : methods) {
				if (m == x) return;
			}
			throw MethodNotAllowed{"method " + m + " not allowed on " + r.path};
		};
		const std::string head = parts.empty() ? "" : parts[0];
		int status = 200;

		if (parts.size() == 1 && head == "health") {
			allow({"GET"});
			return reply(200, {{"status", "ok"}});
		}
		if (parts.size() == 1 && head == "openapi.json") {
			allow({"GET"});
			return reply(200, openapi_document());
		}
		if (head == "datasets" && parts.size() == 1) {
			allow({"GET", "POST"});
			if (m == "POST") {
				auto out = post_dataset(r, status);
				return reply(status, out);
			}
			json list = json::array();
			for (const auto& d : store_->datasets()) list.push_back(describe(d, *store_));
			return reply(200, list);
		}
		if (head == "datasets" && parts.size() == 2) {
			allow({"GET"});
			const auto d = store_->dataset(parts[1]);
			if (!d) throw Error(ErrorCode::NotFound, "no dataset '" + parts[1] + "'", "id");
			auto out = describe(*d, *store_);
			out["csv"] = d->csv;
			return reply(200, out);
		}
		if (parts.size() == 1 && head == "calendar") {
			allow({"GET"});
			return reply(200, get_calendar(r));
		}
		if (parts.size() == 1 && head == "train") {
			allow({"POST"});
			auto out = post_train(parse_body(r), status);
			return reply(status, out);
		}
		if (head == "models" && parts.size() == 1) {
			allow({"GET"});
			json list = json::array();
			for (const auto& rec : store_->models()) list.push_back(rec.summary());
			return reply(200, list);
		}
		if (head == "models" && parts.size() == 2) {
			allow({"GET", "DELETE"});
			if (m == "DELETE") {
				if (!store_->remove_model(parts[1])) throw Error(ErrorCode::NotFound, "no model '" + parts[1] + "'", "id");
				return reply(200, {{"deleted", parts[1]}});
			}
			const auto rec = store_->model(parts[1]);
			if (!rec) throw Error(ErrorCode::NotFound, "no model '" + parts[1] + "'", "id");
			return reply(200, rec->to_json());
		}
		if (parts.size() == 1 && head == "forecast") {
			allow({"POST"});
			return reply(200, post_forecast(parse_body(r)));
		}
		if (parts.size() == 1 && head == "simulate") {
			allow({"POST"});
			return reply(200, post_simulate(parse_body(r)));
		}
		throw Error(ErrorCode::NotFound, "no route " + r.path, "path");
	} catch (const MethodNotAllowed& e) {
		return reply(405, error_body(Error(ErrorCode::InvalidArgument, e.message, "method")));
	} catch (const Error& e) {
		return reply(http_status(e.code()), error_body(e));
	} catch (const json::exception& e) {
		return reply(400, error_body(Error(ErrorCode::InvalidArgument, e.what())));
	} catch (const std::exception& e) {
		return reply(500, {{"code", "Internal"}, {"message", e.what()}, {"field_path", ""}});
	}
}

json Service::post_dataset(const Request& r, int& status) const {
	json fields;
	std::string csv;
	if (r.content_type.starts_with("text/csv")) {
		for (const auto& [k, v] : r.query) fields[k] = v;
		csv = r.body;
	} else {
		fields = parse_body(r);
		csv = required_string(fields, "csv");
	}
	Dataset d;
	d.kind = parse_dataset_kind(required_string(fields, "kind"));
	d.name = optional_string(fields, "name").value_or("");
	d.game = optional_string(fields, "game").value_or("");
	if (auto t = optional_string(fields, "target")) d.target = checked_target(*t);
	const auto from = optional_string(fields, "from"), to = optional_string(fields, "to");
	if (from.has_value() != to.has_value()) {
		throw Error(ErrorCode::InvalidArgument, "from and to come together", from ? "to" : "from");
	}
	if (from) {
		if (d.kind != DatasetKind::Calendar) {
			throw Error(ErrorCode::InvalidArgument, "only calendars take an explicit range", "from");
		}
		d.range = DateRange{date_field(*from, "from"), date_field(*to, "to")};
		if (d.range->length() < 1) throw Error(ErrorCode::InvalidArgument, "empty range", "to");
	}
	d.csv = std::move(csv);
	json key{{"kind", std::string(to_string(d.kind))}, {"name", d.name}, {"game", d.game}, {"target", d.target},
	         {"csv", d.csv}};
	if (d.range) key["range"] = range_json(*d.range);
	d.id = "ds-" + content_hash(key.dump());
	d.created_at = options_.clock();
	try {
		status = store_->add_dataset(d) ? 201 : 200;
	} catch (const Error& e) {
		if (!e.field_path().empty()) throw;
		throw Error(e.code(), e.message(), "csv");
	}
	return describe(*store_->dataset(d.id), *store_);
}

json Service::get_calendar(const Request& r) const {
	const auto calendar = store_->calendar();
	const auto from = r.query.find("from"), to = r.query.find("to");
	if (!calendar.has_range()) return calendar_to_json(calendar);
	DateRange want = calendar.range();
	if (from != r.query.end()) want.first = date_field(from->second, "from");
	if (to != r.query.end()) want.last = date_field(to->second, "to");
	if (want.length() < 1) throw Error(ErrorCode::InvalidArgument, "from is after to", "to");
	const DateRange cut{std::max(want.first, calendar.range().first), std::min(want.last, calendar.range().last)};
	if (cut.length() < 1) {
		EventCalendar none;
		for (const auto& s : calendar.vocabulary()) none.register_subtype(s);
		return calendar_to_json(none);
	}
	EventCalendar out(cut);
	for (const auto& s : calendar.vocabulary()) out.register_subtype(s);
	for (const auto& rec : calendar.records_in(cut)) out.add(rec);
	for (const auto& [d, t] : calendar.temperature_values()) {
		if (cut.contains(d)) out.set_temperature(d, t);
	}
	return calendar_to_json(out);
}

EventCalendar Service::calendar_for(const json& body) const {
	const auto id = optional_string(body, "calendar");
	if (!id) return store_->calendar();
	const auto d = store_->dataset(*id);
	if (!d) throw Error(ErrorCode::NotFound, "no dataset '" + *id + "'", "calendar");
	if (d->kind != DatasetKind::Calendar) {
		throw Error(ErrorCode::InvalidArgument, "dataset '" + *id + "' is not a calendar", "calendar");
	}
	return parse_events_csv(d->csv, d->range);
}

json Service::post_train(const json& body, int& status) const {
	static const std::set<std::string> known{"family", "series", "calendar", "game",   "target", "preset",
	                                         "params", "seed",   "encoding", "from",   "to"};
	for (const auto& [k, v] : body.items()) {
		if (!known.contains(k)) throw Error(ErrorCode::InvalidArgument, "unknown field '" + k + "'", k);
	}
	json config_doc = json::object();
	for (const char* k : {"family", "preset", "params", "seed", "encoding"}) {
		if (body.contains(k)) config_doc[k] = body.at(k);
	}
	required_string(body, "family");
	const auto config = ModelConfig::from_json(config_doc);

	const auto series_id = required_string(body, "series");
	const auto dataset = store_->dataset(series_id);
	if (!dataset) throw Error(ErrorCode::NotFound, "no dataset '" + series_id + "'", "series");
	if (dataset->kind != DatasetKind::Series) {
		throw Error(ErrorCode::InvalidArgument, "dataset '" + series_id + "' is not a series", "series");
	}
	auto series = *store_->series(series_id);
	const auto target = checked_target(
	    optional_string(body, "target").value_or(dataset->target.empty() ? "sales" : dataset->target));
	const auto game = optional_string(body, "game").value_or(dataset->game);

	DateRange window = series.range();
	if (auto f = optional_string(body, "from")) window.first = date_field(*f, "from");
	if (auto t = optional_string(body, "to")) window.last = date_field(*t, "to");
	if (!series.range().contains(window) || window.length() < 1) {
		throw Error(ErrorCode::InvalidArgument,
		            "training window must lie inside the series " + series.range().first.to_iso() + ".." +
		                series.range().last.to_iso(),
		            body.contains("from") ? "from" : "to");
	}
	series = series.slice(window);
	const auto calendar = calendar_for(body);
	const auto calendar_hash = content_hash(calendar_to_json(calendar).dump());

	const json canonical{{"config", config.to_json()}, {"series", series_id}, {"window", range_json(window)},
	                     {"game", game},               {"target", target},    {"calendar", calendar_hash}};
	const std::string id = "m-" + content_hash(canonical.dump());
	if (const auto existing = store_->model(id)) {
		status = 200;
		return existing->summary();
	}

	// The fit runs on its own copies so an abandoned job touches nothing shared.
	auto task = std::make_shared<std::packaged_task<FittedModel()>>(
	    [config, series, calendar] { return fit_model(config, series, calendar); });
	auto result = task->get_future();
	std::thread([task] { (*task)(); }).detach();
	if (result.wait_for(options_.train_timeout) != std::future_status::ready) {
		throw Error(ErrorCode::Timeout, "training did not finish within " +
		                                    std::to_string(options_.train_timeout.count()) + " ms");
	}
	const auto model = result.get();

	ModelRecord rec;
	rec.id = id;
	rec.family = config.family;
	rec.game = game;
	rec.target = target;
	rec.trained_at = options_.clock();
	rec.params = config.to_json();
	rec.artifact = model.to_json();
	rec.training_window = window;
	rec.series_id = series_id;
	rec.calendar_hash = calendar_hash;
	status = store_->add_model(rec) ? 201 : 200;
	return store_->model(id)->summary();
}

json Service::post_forecast(const json& body) const {
	const auto id = required_string(body, "model_id");
	if (!body.contains("horizon")) throw Error(ErrorCode::InvalidArgument, "missing field 'horizon'", "horizon");
	const int horizon = bounded_int(body, "horizon", 0, 1, kMaxForecastHorizon);
	const auto model = store_->fitted(id);
	const auto f = model->forecast(calendar_for(body), horizon);
	json dates = json::array();
	for (std::size_t i = 0; i < f.values.size(); ++i) dates.push_back(f.values.date_at(i).to_iso());
	return {{"model_id", id},
	        {"dates", dates},
	        {"values", f.values.values()},
	        {"covariates", {{"columns", f.covariates.columns()}, {"rows", matrix_to_json(f.covariates.values()).at("data")}}}};
}

json Service::post_simulate(const json& body) const {
	const auto id = required_string(body, "model_id");
	const int horizon = bounded_int(body, "horizon", 30, 1, kMaxSimulationHorizon);
	const auto model = store_->fitted(id);
	const auto window = sim::simulation_window(*model, horizon);
	if (auto origin = optional_string(body, "origin")) {
		if (date_field(*origin, "origin") != window.first) {
			throw Error(ErrorCode::WindowMismatch,
			            "the model simulates from " + window.first.to_iso() + ", the day after its training data",
			            "origin");
		}
	}
	if (!body.contains("baseline")) throw Error(ErrorCode::InvalidArgument, "missing field 'baseline'", "baseline");
	const bool many = body.contains("alternatives");
	if (many == body.contains("alternative")) {
		throw Error(ErrorCode::InvalidArgument, "give exactly one of 'alternative' and 'alternatives'", "alternative");
	}
	const auto baseline = with_prefix("baseline", [&] { return sim::scenario_from_json(body.at("baseline"), window); });
	const auto history = calendar_for(body);
	json out{{"model_id", id}, {"horizon", horizon}, {"window", range_json(window)}};
	if (!many) {
		const auto alternative =
		    with_prefix("alternative", [&] { return sim::scenario_from_json(body.at("alternative"), window); });
		const auto [b, a] = with_prefix("alternative", [&] {
			return sim::simulate_scenario(*model, history, baseline, alternative, horizon);
		});
		out["baseline"] = sim::to_json(b);
		out["alternative"] = sim::to_json(a);
		return out;
	}
	const auto& list = body.at("alternatives");
	if (!list.is_array() || list.empty()) {
		throw Error(ErrorCode::InvalidArgument, "alternatives must be a non-empty array", "alternatives");
	}
	std::vector<sim::Scenario> alternatives;
	for (std::size_t i = 0; i < list.size(); ++i) {
		alternatives.push_back(with_prefix("alternatives[" + std::to_string(i) + "]",
		                                   [&] { return sim::scenario_from_json(list[i], window); }));
	}
	const auto base = sim::simulate_scenario(*model, history, baseline, baseline, horizon).first;
	out["baseline"] = sim::to_json(base);
	json ranked = json::array();
	for (const auto& r : sim::compare_scenarios(*model, history, baseline, alternatives, horizon)) {
		ranked.push_back(sim::to_json(r));
	}
	out["alternatives"] = ranked;
	return out;
}

} // namespace eventcast::service
