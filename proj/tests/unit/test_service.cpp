#include "eventcast/core/csv.hpp"
#include "eventcast/features/io.hpp"
#include "eventcast/service/service.hpp"

#include "test_support.hpp"

#include <httplib.h>

#include <chrono>
#include <filesystem>
#include <random>
#include <thread>

using namespace eventcast;
using namespace eventcast::service;
using json = nlohmann::json;

namespace {

using testing::TempDir;

ServiceOptions fixed_clock() {
	ServiceOptions o;
	o.clock = [] { return std::string("2026-01-01T00:00:00Z"); };
	return o;
}

struct Call {
	int status;
	json body;
};

Call call(const Service& s, std::string method, std::string path, const json& body = nullptr,
          std::map<std::string, std::string> query = {}) {
	Request r{std::move(method), std::move(path), std::move(query), body.is_null() ? "" : body.dump()};
	const auto out = s.handle(r);
	return {out.status, json::parse(out.body)};
}

const sim::SynthData& game() {
	static const auto d = [] {
		auto cfg = testing::game_config(31, 300);
		cfg.event_effects = {{"gacha", 30.0}, {"holiday", 50.0}, {"game_event", 80.0}};
		return sim::generate_synthetic(cfg);
	}();
	return d;
}

// Uploads the synthetic game; the calendar extends 60 days past the series.
std::pair<std::string, std::string> upload_game(const Service& s) {
	const auto& d = game();
	const auto series = call(s, "POST", "/datasets",
	                         {{"kind", "series"}, {"name", "aoi"}, {"game", "aoi"}, {"target", "sales"},
	                          {"csv", series_to_csv(d.series)}});
	REQUIRE(series.status == 201);
	const auto calendar = call(s, "POST", "/datasets",
	                           {{"kind", "calendar"},
	                            {"name", "aoi events"},
	                            {"csv", events_to_csv(d.calendar)},
	                            {"from", d.series.start().to_iso()},
	                            {"to", (d.series.end() + 60).to_iso()}});
	REQUIRE(calendar.status == 201);
	return {series.body.at("id"), calendar.body.at("id")};
}

json train_body(const std::string& series, const std::string& family = "arima") {
	return {{"family", family}, {"series", series}, {"preset", "aoi_sales"}};
}

json empty_scenario(const std::string& name) { return {{"name", name}, {"events", json::array()}}; }

} // namespace

TEST_CASE("datasets upload, dedupe and validate", "[service][datasets]") {
	Service s(std::make_shared<Store>(), fixed_clock());
	const auto& d = game();
	const json body{{"kind", "series"}, {"name", "aoi"}, {"csv", series_to_csv(d.series)}};
	const auto first = call(s, "POST", "/datasets", body);
	REQUIRE(first.status == 201);
	CHECK(first.body.at("rows") == 300);
	CHECK(first.body.at("from") == d.series.start().to_iso());
	const auto again = call(s, "POST", "/datasets", body);
	CHECK(again.status == 200);
	CHECK(again.body.at("id") == first.body.at("id"));

	const auto gap = call(s, "POST", "/datasets",
	                      {{"kind", "series"}, {"csv", "date,value\n2020-01-01,1\n2020-01-02,2\n2020-01-04,3\n"}});
	CHECK(gap.status == 422);
	CHECK(gap.body.at("code") == "MissingDay");
	CHECK(gap.body.at("message").get<std::string>().find("2020-01-03") != std::string::npos);

	CHECK(call(s, "POST", "/datasets", {{"kind", "weather"}, {"csv", ""}}).body.at("field_path") == "kind");
	CHECK(call(s, "POST", "/datasets", {{"kind", "series"}}).status == 400);
	CHECK(call(s, "POST", "/datasets", {{"kind", "series"}, {"target", "revenue"}, {"csv", "x"}}).body.at("field_path") ==
	      "target");

	const auto cal = call(s, "POST", "/datasets", {{"kind", "calendar"}, {"name", "a"}, {"csv", events_to_csv(d.calendar)}});
	CHECK(cal.status == 201);
	const auto clash = call(s, "POST", "/datasets", {{"kind", "calendar"}, {"name", "b"}, {"csv", events_to_csv(d.calendar)}});
	CHECK(clash.status == 409);
	CHECK(clash.body.at("code") == "DuplicateEvent");

	Request csv{"POST", "/datasets", {{"kind", "temperature"}, {"name", "tokyo"}}, "date,celsius\n2018-01-01,4.5\n", "text/csv"};
	CHECK(s.handle(csv).status == 201);
	CHECK(call(s, "GET", "/datasets").body.size() == 3);
	const auto one = call(s, "GET", "/datasets/" + first.body.at("id").get<std::string>());
	CHECK(one.body.at("csv") == series_to_csv(d.series));
	CHECK(call(s, "GET", "/datasets/ds-nope").status == 404);
	CHECK(call(s, "POST", "/datasets", nullptr).status == 400);
	Request broken{"POST", "/datasets", {}, "{not json"};
	const auto bad = s.handle(broken);
	CHECK(bad.status == 400);
	CHECK(json::parse(bad.body).at("code") == "ParseError");
}

TEST_CASE("calendar endpoint cuts to the requested dates", "[service][calendar]") {
	Service s(std::make_shared<Store>(), fixed_clock());
	CHECK(call(s, "GET", "/calendar").body.at("events").empty());
	upload_game(s);
	const auto all = call(s, "GET", "/calendar");
	CHECK(all.body.at("events").size() == game().calendar.records().size());
	const auto part = call(s, "GET", "/calendar", nullptr, {{"from", "2018-02-01"}, {"to", "2018-02-28"}});
	REQUIRE(part.status == 200);
	CHECK(part.body.at("from") == "2018-02-01");
	for (const auto& e : part.body.at("events")) {
		CHECK(e.at("date").get<std::string>() >= "2018-02-01");
		CHECK(e.at("date").get<std::string>() <= "2018-02-28");
	}
	CHECK(call(s, "GET", "/calendar", nullptr, {{"from", "February"}}).body.at("field_path") == "from");
	CHECK(call(s, "GET", "/calendar", nullptr, {{"from", "2018-03-01"}, {"to", "2018-02-01"}}).status == 400);
	CHECK(call(s, "GET", "/calendar", nullptr, {{"from", "2030-01-01"}, {"to", "2030-02-01"}}).body.at("events").empty());
	CHECK(call(s, "GET", "/calendar", nullptr, {{"from", "2030-01-01"}}).status == 400);
}

TEST_CASE("training is idempotent and validated", "[service][train]") {
	Service s(std::make_shared<Store>(), fixed_clock());
	const auto [series, calendar] = upload_game(s);
	const auto first = call(s, "POST", "/train", train_body(series));
	REQUIRE(first.status == 201);
	const std::string id = first.body.at("id");
	CHECK(first.body.at("family") == "arima");
	CHECK(first.body.at("game") == "aoi");
	CHECK(first.body.at("target") == "sales");
	CHECK(first.body.at("trained_at") == "2026-01-01T00:00:00Z");
	CHECK(first.body.at("training_window").at("to") == game().series.end().to_iso());
	CHECK_FALSE(first.body.contains("artifact"));

	const auto again = call(s, "POST", "/train", train_body(series));
	CHECK(again.status == 200);
	CHECK(again.body.at("id") == id);
	const auto record = call(s, "GET", "/models/" + id);
	REQUIRE(record.status == 200);
	CHECK(record.body.at("artifact").at("format") == "eventcast.model");
	CHECK_NOTHROW(FittedModel::from_json(record.body.at("artifact")));

	CHECK(call(s, "POST", "/train", train_body(series, "lstm")).body == json{{"code", "InvalidArgument"},
	                                                                      {"message", "unknown model family 'lstm'"},
	                                                                      {"field_path", "family"}});
	CHECK(call(s, "POST", "/train", train_body("ds-missing")).status == 404);
	CHECK(call(s, "POST", "/train", train_body(calendar)).body.at("field_path") == "series");
	auto extra = train_body(series);
	extra["colour"] = "red";
	CHECK(call(s, "POST", "/train", extra).body.at("field_path") == "colour");
	auto bad_params = train_body(series);
	bad_params["params"] = {{"order", {{"p", -1}}}};
	const auto bp = call(s, "POST", "/train", bad_params);
	CHECK(bp.status == 400);
	CHECK(bp.body.at("field_path").get<std::string>().starts_with("params.order"));
	auto tiny = train_body(series);
	tiny["from"] = "2018-01-01";
	tiny["to"] = "2018-01-10";
	const auto short_fit = call(s, "POST", "/train", tiny);
	CHECK(short_fit.status == 422);
	auto outside = train_body(series);
	outside["to"] = "2030-01-01";
	CHECK(call(s, "POST", "/train", outside).status == 400);

	auto gam = train_body(series, "gam");
	gam["target"] = "playtime";
	gam["preset"] = "aoi_playtime";
	const auto second = call(s, "POST", "/train", gam);
	CHECK(second.status == 201);
	CHECK(second.body.at("id") != id);
	CHECK(call(s, "GET", "/models").body.size() == 2);

	CHECK(call(s, "DELETE", "/models/" + id).status == 200);
	CHECK(call(s, "GET", "/models/" + id).status == 404);
	CHECK(call(s, "DELETE", "/models/" + id).status == 404);
	CHECK(call(s, "GET", "/models").body.size() == 1);
}

TEST_CASE("forecast endpoint", "[service][forecast]") {
	Service s(std::make_shared<Store>(), fixed_clock());
	const auto [series, calendar] = upload_game(s);
	const std::string id = call(s, "POST", "/train", train_body(series)).body.at("id");
	const json req{{"model_id", id}, {"horizon", 30}};
	const auto a = call(s, "POST", "/forecast", req);
	REQUIRE(a.status == 200);
	CHECK(a.body.at("dates").size() == 30);
	CHECK(a.body.at("values").size() == 30);
	CHECK(a.body.at("dates")[0] == (game().series.end() + 1).to_iso());
	CHECK(a.body.at("covariates").at("rows").size() == 30);
	CHECK(s.handle({"POST", "/forecast", {}, req.dump()}).body == s.handle({"POST", "/forecast", {}, req.dump()}).body);

	CHECK(call(s, "POST", "/forecast", {{"model_id", id}, {"horizon", 0}}).status == 400);
	CHECK(call(s, "POST", "/forecast", {{"model_id", id}}).body.at("field_path") == "horizon");
	CHECK(call(s, "POST", "/forecast", {{"model_id", "m-nope"}, {"horizon", 5}}).status == 404);
	const auto gap = call(s, "POST", "/forecast", {{"model_id", id}, {"horizon", 90}});
	CHECK(gap.status == 409);
	CHECK(gap.body.at("code") == "RangeOutsideCalendar");
	CHECK(call(s, "POST", "/forecast", {{"model_id", id}, {"horizon", 10}, {"calendar", calendar}}).body.at("values") ==
	      call(s, "POST", "/forecast", {{"model_id", id}, {"horizon", 10}}).body.at("values"));
}

TEST_CASE("simulate endpoint", "[service][simulate]") {
	Service s(std::make_shared<Store>(), fixed_clock());
	const auto [series, calendar] = upload_game(s);
	json train = train_body(series);
	train.erase("preset");
	const std::string id = call(s, "POST", "/train", train).body.at("id");

	const auto start = std::chrono::steady_clock::now();
	const auto same = call(s, "POST", "/simulate",
	                       {{"model_id", id}, {"baseline", empty_scenario("plan")}, {"alternative", empty_scenario("plan")}});
	const auto elapsed = std::chrono::steady_clock::now() - start;
	REQUIRE(same.status == 200);
	CHECK(same.body.at("alternative").at("delta_percent") == 0.0);
	CHECK(same.body.at("horizon") == 30);
	CHECK(same.body.at("baseline").at("values").size() == 30);
	CHECK(elapsed < std::chrono::seconds(5));

	const std::string day = (game().series.end() + 4).to_iso();
	json boosted = empty_scenario("story");
	boosted["events"].push_back({{"date", day}, {"type", "game_event"}, {"subtype", "story"}});
	const auto up = call(s, "POST", "/simulate", {{"model_id", id}, {"baseline", empty_scenario("plan")}, {"alternative", boosted}});
	REQUIRE(up.status == 200);
	CHECK(up.body.at("alternative").at("delta_percent").get<double>() > 0.0);

	json bad = empty_scenario("bad");
	bad["events"].push_back({{"date", day}, {"type", "gacha"}, {"scale", 9}});
	const auto malformed =
	    call(s, "POST", "/simulate", {{"model_id", id}, {"baseline", empty_scenario("plan")}, {"alternative", bad}});
	CHECK(malformed.status == 400);
	CHECK(malformed.body.at("field_path") == "alternative.events[0].scale");

	json shifted = empty_scenario("late");
	shifted["from"] = (game().series.end() + 2).to_iso();
	shifted["to"] = (game().series.end() + 31).to_iso();
	const auto mismatch =
	    call(s, "POST", "/simulate", {{"model_id", id}, {"baseline", empty_scenario("plan")}, {"alternative", shifted}});
	CHECK(mismatch.status == 422);
	CHECK(mismatch.body.at("code") == "WindowMismatch");
	CHECK(call(s, "POST", "/simulate",
	           {{"model_id", id}, {"origin", "2018-01-01"}, {"baseline", empty_scenario("p")}, {"alternative", empty_scenario("p")}})
	          .status == 422);
	CHECK(call(s, "POST", "/simulate",
	           {{"model_id", id}, {"horizon", 91}, {"baseline", empty_scenario("p")}, {"alternative", empty_scenario("p")}})
	          .body.at("field_path") == "horizon");
	CHECK(call(s, "POST", "/simulate", {{"model_id", id}, {"baseline", empty_scenario("p")}}).status == 400);
	CHECK(call(s, "POST", "/simulate",
	           {{"model_id", "m-nope"}, {"baseline", empty_scenario("p")}, {"alternative", empty_scenario("p")}})
	          .status == 404);

	const auto ranked = call(s, "POST", "/simulate",
	                         {{"model_id", id},
	                          {"horizon", 14},
	                          {"origin", (game().series.end() + 1).to_iso()},
	                          {"baseline", empty_scenario("plan")},
	                          {"alternatives", {empty_scenario("quiet"), boosted, empty_scenario("calm")}}});
	REQUIRE(ranked.status == 200);
	const auto& list = ranked.body.at("alternatives");
	REQUIRE(list.size() == 3);
	CHECK(list[0].at("name") == "story");
	CHECK(list[1].at("name") == "calm");
	CHECK(list[2].at("name") == "quiet");
	CHECK(ranked.body.at("baseline").at("dates").size() == 14);
}

TEST_CASE("store survives a restart bit for bit", "[service][persistence]") {
	TempDir dir;
	const auto file = dir.path / "store.json";
	std::string forecast_before, simulate_before, hash_before;
	std::map<std::string, std::vector<double>> fresh;
	const json sim_body_template{{"baseline", empty_scenario("plan")}, {"alternative", empty_scenario("plan")}};
	std::vector<std::string> ids;
	{
		Service s(std::make_shared<Store>(file), fixed_clock());
		const auto [series, calendar] = upload_game(s);
		for (const char* family : {"arima", "gbm", "gam", "dbn"}) {
			json body{{"family", family}, {"series", series}};
			if (std::string(family) == "dbn") body["params"] = {{"max_epochs", 20}, {"pretrain_epochs", 2}};
			const auto r = call(s, "POST", "/train", body);
			REQUIRE(r.status == 201);
			ids.push_back(r.body.at("id"));
			// Forecast of the in-memory fit, before any serialization.
			auto config = ModelConfig::from_json(body);
			const auto direct = fit_model(config, game().series, s.store().calendar()).forecast(s.store().calendar(), 30);
			fresh[ids.back()] = direct.values.values();
		}
		for (const auto& id : ids) {
			const auto out = call(s, "POST", "/forecast", {{"model_id", id}, {"horizon", 30}});
			CHECK(out.body.at("values").get<std::vector<double>>() == fresh[id]);
			forecast_before += out.body.dump();
		}
		auto sim = sim_body_template;
		sim["model_id"] = ids[0];
		simulate_before = s.handle({"POST", "/simulate", {}, sim.dump()}).body;
		hash_before = s.store().state_hash();
	}
	REQUIRE(std::filesystem::exists(file));
	Service s(std::make_shared<Store>(file), fixed_clock());
	CHECK(s.store().state_hash() == hash_before);
	std::string forecast_after;
	for (const auto& id : ids) forecast_after += call(s, "POST", "/forecast", {{"model_id", id}, {"horizon", 30}}).body.dump();
	CHECK(forecast_after == forecast_before);
	auto sim = sim_body_template;
	sim["model_id"] = ids[0];
	CHECK(s.handle({"POST", "/simulate", {}, sim.dump()}).body == simulate_before);
	CHECK(call(s, "GET", "/models").body.size() == 4);

	write_text_file(file, "{\"format\": \"something else\"}");
	REQUIRE_ERROR_CODE(Store(file), ErrorCode::ParseError);
	write_text_file(file, "not json");
	REQUIRE_ERROR_CODE(Store(file), ErrorCode::ParseError);
}

TEST_CASE("read-only calls leave the store untouched", "[service][audit]") {
	TempDir dir;
	Service s(std::make_shared<Store>(dir.path / "store.json"), fixed_clock());
	const auto [series, calendar] = upload_game(s);
	const std::string id = call(s, "POST", "/train", train_body(series)).body.at("id");
	const auto before = s.store().state_hash();
	const auto file_before = read_text_file(dir.path / "store.json");

	call(s, "GET", "/health");
	call(s, "GET", "/datasets");
	call(s, "GET", "/datasets/" + series);
	call(s, "GET", "/calendar", nullptr, {{"from", "2018-03-01"}});
	call(s, "GET", "/models");
	call(s, "GET", "/models/" + id);
	call(s, "POST", "/forecast", {{"model_id", id}, {"horizon", 30}});
	call(s, "POST", "/forecast", {{"model_id", id}, {"horizon", 90}});
	json boosted = empty_scenario("story");
	boosted["events"].push_back({{"date", (game().series.end() + 4).to_iso()}, {"type", "game_event"}, {"subtype", "raid"}});
	call(s, "POST", "/simulate", {{"model_id", id}, {"baseline", empty_scenario("p")}, {"alternative", empty_scenario("p")}});
	call(s, "POST", "/simulate", {{"model_id", id}, {"baseline", empty_scenario("p")}, {"alternative", boosted}});
	call(s, "GET", "/openapi.json");
	call(s, "GET", "/nowhere");

	CHECK(s.store().state_hash() == before);
	CHECK(read_text_file(dir.path / "store.json") == file_before);
}

TEST_CASE("training past the time limit reports a timeout", "[service][train]") {
	auto options = fixed_clock();
	options.train_timeout = std::chrono::milliseconds(1);
	Service s(std::make_shared<Store>(), options);
	const auto [series, calendar] = upload_game(s);
	const auto out = call(s, "POST", "/train", {{"family", "dbn"}, {"series", series}, {"params", {{"max_epochs", 30}}}});
	CHECK(out.status == 504);
	CHECK(out.body.at("code") == "Timeout");
	CHECK(call(s, "GET", "/models").body.empty());
}

TEST_CASE("routing and error envelope", "[service][routing]") {
	Service s(std::make_shared<Store>(), fixed_clock());
	const auto missing = call(s, "GET", "/nowhere");
	CHECK(missing.status == 404);
	CHECK(missing.body.at("code") == "NotFound");
	CHECK(missing.body.contains("field_path"));
	CHECK(call(s, "GET", "/train").status == 405);
	CHECK(call(s, "PUT", "/models").status == 405);
	CHECK(http_status(ErrorCode::ColumnMismatch) == 422);
	CHECK(http_status(ErrorCode::DuplicateEvent) == 409);
	CHECK(http_status(ErrorCode::SeriesTooShort) == 422);
	CHECK(http_status(ErrorCode::UnknownEventType) == 400);

	// Every documented path is routed.
	const auto doc = openapi_document();
	for (const auto& [path, ops] : doc.at("paths").items()) {
		std::string concrete = path;
		if (const auto brace = concrete.find("{id}"); brace != std::string::npos) concrete.replace(brace, 4, "x");
		for (const auto& [method, op] : ops.items()) {
			std::string m = method;
			std::transform(m.begin(), m.end(), m.begin(), ::toupper);
			const auto r = call(s, m, concrete, m == "POST" ? json::object() : json(nullptr));
			INFO(m << " " << concrete);
			CHECK(r.status != 405);
			if (r.status == 404) CHECK(r.body.at("field_path") != "path");
		}
	}
}

TEST_CASE("concurrent requests agree", "[service][concurrency]") {
	Service s(std::make_shared<Store>(), fixed_clock());
	const auto [series, calendar] = upload_game(s);
	const std::string id = call(s, "POST", "/train", train_body(series)).body.at("id");
	const std::string req = json{{"model_id", id}, {"horizon", 30}}.dump();
	const auto expected = s.handle({"POST", "/forecast", {}, req}).body;
	std::vector<std::thread> threads;
	std::atomic<int> mismatches{0};
	for (int t = 0; t < 8; ++t) {
		threads.emplace_back([&] {
			for (int i = 0; i < 5; ++i) {
				if (s.handle({"POST", "/forecast", {}, req}).body != expected) ++mismatches;
			}
		});
	}
	std::vector<std::string> trained(4);
	for (int t = 0; t < 4; ++t) {
		threads.emplace_back([&, t] {
			json body{{"family", "gam"}, {"series", series}, {"seed", t}};
			trained[static_cast<std::size_t>(t)] = s.handle({"POST", "/train", {}, body.dump()}).body;
		});
	}
	for (auto& th : threads) th.join();
	CHECK(mismatches == 0);
	CHECK(call(s, "GET", "/models").body.size() == 5);
	for (const auto& t : trained) CHECK(json::parse(t).contains("id"));
}

TEST_CASE("HTTP round trip on an ephemeral port", "[service][http]") {
	TempDir dir;
	Service s(std::make_shared<Store>(dir.path / "store.json"), fixed_clock());
	HttpServer server(s);
	const int port = server.bind("127.0.0.1", 0);
	REQUIRE(port > 0);
	std::thread worker([&] { server.serve(); });
	server.wait_until_ready();

	httplib::Client client("127.0.0.1", port);
	const auto health = client.Get("/health");
	REQUIRE(health);
	CHECK(health->status == 200);
	CHECK(health->get_header_value("Content-Type") == "application/json");
	CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");

	const auto& d = game();
	auto up = client.Post("/datasets?kind=series&name=aoi", series_to_csv(d.series), "text/csv");
	REQUIRE(up);
	CHECK(up->status == 201);
	const std::string series = json::parse(up->body).at("id");
	json cal{{"kind", "calendar"}, {"csv", events_to_csv(d.calendar)}, {"from", d.series.start().to_iso()},
	         {"to", (d.series.end() + 60).to_iso()}};
	CHECK(client.Post("/datasets", cal.dump(), "application/json")->status == 201);

	const auto trained = client.Post("/train", train_body(series).dump(), "application/json");
	REQUIRE(trained);
	CHECK(trained->status == 201);
	const std::string id = json::parse(trained->body).at("id");
	const std::string req = json{{"model_id", id}, {"horizon", 30}}.dump();
	const auto over_http = client.Post("/forecast", req, "application/json");
	REQUIRE(over_http);
	CHECK(over_http->status == 200);
	CHECK(over_http->body == s.handle({"POST", "/forecast", {}, req}).body);
	const auto cut = client.Get("/calendar?from=2018-02-01&to=2018-02-10");
	REQUIRE(cut);
	CHECK(json::parse(cut->body).at("to") == "2018-02-10");
	const auto gone = client.Delete("/models/" + id);
	CHECK(gone->status == 200);
	CHECK(client.Get("/models/" + id)->status == 404);
	CHECK(client.Options("/train")->status == 204);

	server.stop();
	worker.join();
}
