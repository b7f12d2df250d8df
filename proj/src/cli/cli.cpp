#include "eventcast/cli/cli.hpp"

#include "eventcast/core/csv.hpp"
#include "eventcast/evaluation/rolling.hpp"
#include "eventcast/features/io.hpp"
#include "eventcast/models/forecaster.hpp"
#include "eventcast/service/service.hpp"
#include "eventcast/simulation/scenario.hpp"
#include "eventcast/simulation/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace eventcast::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct Inputs {
	std::string series;
	std::string calendar;
	std::string temperature;
	std::string holidays;
};

struct FitFlags {
	std::string family;
	std::string preset;
	std::string params;
	std::string from, to;
	std::string target = "sales";
};

struct RollFlags {
	int horizon = 30;
	int step = 7;
	int min_train = 180;
	std::string mase = "window";
};

std::string env_or(const char* name, std::string fallback) {
	const char* v = std::getenv(name);
	return v && *v ? std::string(v) : fallback;
}

// Literal JSON or @path.
json json_arg(const std::string& text, const std::string& flag) {
	const std::string body = text.starts_with("@") ? read_text_file(text.substr(1)) : text;
	try {
		return json::parse(body);
	} catch (const json::exception& e) {
		throw Error(ErrorCode::ParseError, flag + " is not JSON: " + e.what(), flag);
	}
}

json json_file(const std::string& path, const std::string& flag) { return json_arg("@" + path, flag); }

void emit(const std::string& text, const std::string& path, std::ostream& out) {
	if (path.empty()) {
		out << text;
		if (!text.ends_with('\n')) out << '\n';
	} else {
		write_text_file(path, text.ends_with('\n') ? text : text + "\n");
	}
}

TimeSeries load_series(const std::string& path) {
	return parse_series_csv(read_text_file(path), fs::path(path).stem().string());
}

// Events, temperature and holidays merged into one calendar that covers at least `cover`.
EventCalendar load_calendar(const Inputs& in, std::optional<DateRange> cover) {
	EventCalendar c = in.calendar.empty() ? EventCalendar{} : parse_events_csv(read_text_file(in.calendar));
	if (cover) c.extend(*cover);
	if (!in.temperature.empty()) add_temperature_csv(c, read_text_file(in.temperature));
	if (!in.holidays.empty()) add_holidays_csv(c, read_text_file(in.holidays));
	return c;
}

ModelConfig model_config(const FitFlags& f, std::uint64_t seed) {
	json doc{{"family", f.family}, {"seed", seed}};
	if (!f.preset.empty()) doc["preset"] = f.preset;
	if (!f.params.empty()) doc["params"] = json_arg(f.params, "params");
	return ModelConfig::from_json(doc);
}

Date date_flag(const std::string& text, const std::string& flag) {
	try {
		return Date::parse(text);
	} catch (const Error& e) {
		throw Error(ErrorCode::InvalidArgument, e.message(), flag);
	}
}

DateRange training_window(const TimeSeries& series, const FitFlags& f) {
	DateRange w = series.range();
	if (!f.from.empty()) w.first = date_flag(f.from, "from");
	if (!f.to.empty()) w.last = date_flag(f.to, "to");
	if (w.length() < 1 || !series.range().contains(w)) {
		throw Error(ErrorCode::InvalidArgument,
		            "training window must lie inside the series " + series.range().first.to_iso() + ".." +
		                series.range().last.to_iso(),
		            f.from.empty() ? "to" : "from");
	}
	return w;
}

eval::ForecastFn forecaster(const FitFlags& f, std::uint64_t seed) {
	if (f.family == "naive") return eval::naive_forecaster();
	return eval::model_forecaster(model_config(f, seed));
}

eval::RollingConfig rolling_config(const RollFlags& r) {
	eval::RollingConfig c;
	c.horizon = r.horizon;
	c.step = r.step;
	c.min_train = r.min_train;
	c.mase_scaling = r.mase == "training" ? eval::MaseScaling::TrainingSeries : eval::MaseScaling::EvaluationWindow;
	c.validate();
	return c;
}

// A fit artifact, or a stored model record carrying one.
FittedModel load_model(const std::string& path) {
	const auto j = json_file(path, "model");
	try {
		return FittedModel::from_json(j.contains("artifact") ? j.at("artifact") : j);
	} catch (const json::exception& e) {
		throw Error(ErrorCode::ParseError, std::string("model file: ") + e.what(), "model");
	}
}

json range_json(const DateRange& r) { return {{"from", r.first.to_iso()}, {"to", r.last.to_iso()}}; }

// Field paths are prefixed with the flag that supplied the document.
template <class F>
auto with_prefix(const std::string& prefix, F&& f) {
	try {
		return f();
	} catch (const Error& e) {
		throw Error(e.code(), e.message(), e.field_path().empty() ? prefix : prefix + "." + e.field_path());
	}
}

} // namespace

int exit_code(ErrorCode code) {
	switch (code) {
	case ErrorCode::SeriesTooShort:
	case ErrorCode::NonInvertibleEstimate:
	case ErrorCode::SingularDesign:
	case ErrorCode::AllFitsFailed:
	case ErrorCode::DegenerateInput:
	case ErrorCode::InsufficientUniqueValues:
	case ErrorCode::SingularSystem:
	case ErrorCode::TooFewRows:
	case ErrorCode::HistoryTooShort:
	case ErrorCode::DomainError:
	case ErrorCode::NonPositiveValue:
	case ErrorCode::Timeout: return 2;
	default: return 1;
	}
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
	CLI::App app{"Event-driven forecasting and what-if simulation for daily game metrics", "eventcast"};
	app.require_subcommand(1);
	app.fallthrough();
	app.set_config("--settings", "", "key=value settings file (sections name subcommands)");

	std::uint64_t seed = 42;
	app.add_option("--seed", seed, "RNG seed for model fits and synthetic data")->capture_default_str();

	Inputs in;
	FitFlags fit;
	RollFlags roll;
	std::string out_path;
	auto add_inputs = [&](CLI::App* sub, bool series_required) {
		auto* s = sub->add_option("--series", in.series, "date,value CSV")->check(CLI::ExistingFile);
		if (series_required) s->required();
		sub->add_option("--calendar", in.calendar, "date,event_type,subtype,scale CSV")->check(CLI::ExistingFile);
		sub->add_option("--temperature", in.temperature, "date,celsius CSV")->check(CLI::ExistingFile);
		sub->add_option("--holidays", in.holidays, "date,name CSV")->check(CLI::ExistingFile);
	};
	auto add_model_flags = [&](CLI::App* sub, bool allow_naive) {
		std::vector<std::string> families{"arima", "gbm", "gam", "dbn"};
		if (allow_naive) families.push_back("naive");
		sub->add_option("family", fit.family, "Model family")->required()->check(CLI::IsMember(families));
		sub->add_option("--preset", fit.preset, "aoi_sales, gs_sales, aoi_playtime or gs_playtime");
		sub->add_option("--params", fit.params, "Family parameters as JSON, or @file");
	};
	auto add_rolling_flags = [&](CLI::App* sub) {
		sub->add_option("--step", roll.step, "Days between forecast origins")->capture_default_str();
		sub->add_option("--min-train", roll.min_train, "Days before the first origin")->capture_default_str();
		sub->add_option("--mase", roll.mase, "MASE denominator")
		    ->check(CLI::IsMember({"window", "training"}))
		    ->capture_default_str();
	};

	// ingest
	auto* ingest = app.add_subcommand("ingest", "Validate a CSV and add it to the model store");
	std::string ingest_csv, kind = "series", name, game, store_path = env_or("STORE_PATH", "eventcast-store.json");
	std::string ingest_from, ingest_to;
	ingest->add_option("csv", ingest_csv, "CSV file")->required()->check(CLI::ExistingFile);
	ingest->add_option("--kind", kind, "series, calendar or temperature")
	    ->check(CLI::IsMember({"series", "calendar", "temperature"}))
	    ->capture_default_str();
	ingest->add_option("--name", name, "Dataset name (default: file stem)");
	ingest->add_option("--game", game, "Game label");
	ingest->add_option("--target", fit.target, "sales or playtime")->check(CLI::IsMember({"sales", "playtime"}));
	ingest->add_option("--from", ingest_from, "Calendar range start");
	ingest->add_option("--to", ingest_to, "Calendar range end");
	ingest->add_option("--store", store_path, "Store file")->capture_default_str();

	// fit
	auto* fit_cmd = app.add_subcommand("fit", "Train one model and write its artifact");
	add_model_flags(fit_cmd, false);
	add_inputs(fit_cmd, true);
	fit_cmd->add_option("--target", fit.target, "sales or playtime")->check(CLI::IsMember({"sales", "playtime"}));
	fit_cmd->add_option("--from", fit.from, "First training day");
	fit_cmd->add_option("--to", fit.to, "Last training day");
	fit_cmd->add_option("--out", out_path, "Artifact path (default: stdout)");

	// forecast
	auto* forecast_cmd = app.add_subcommand("forecast", "Forecast the days after a model's training data");
	std::string model_path;
	int forecast_horizon = 30;
	forecast_cmd->add_option("--model", model_path, "Artifact from fit")->required()->check(CLI::ExistingFile);
	forecast_cmd->add_option("--horizon", forecast_horizon, "Days to forecast")->capture_default_str();
	std::string calendar_to;
	forecast_cmd->add_option("--calendar-to", calendar_to, "Last day the calendar covers; no events after its last row");
	add_inputs(forecast_cmd, false);
	forecast_cmd->add_option("--out", out_path, "Output path (default: stdout)");

	// evaluate
	auto* evaluate = app.add_subcommand("evaluate", "Rolling-origin evaluation");
	std::string format = "csv";
	add_model_flags(evaluate, true);
	add_inputs(evaluate, true);
	evaluate->add_flag("--rolling", "Rolling-origin protocol (the only one offered)");
	evaluate->add_option("--horizon", roll.horizon, "Days per forecast")->capture_default_str();
	add_rolling_flags(evaluate);
	evaluate->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
	evaluate->add_option("--out", out_path, "Report path (default: stdout)");

	// curves
	auto* curves = app.add_subcommand("curves", "Error by horizon day or by training size");
	bool per_day = false;
	std::vector<int> sizes;
	std::optional<int> origin;
	add_model_flags(curves, true);
	add_inputs(curves, true);
	auto* per_day_flag = curves->add_flag("--horizon", per_day, "Per-day errors pooled over rolling windows");
	auto* size_opt = curves->add_option("--training-size", sizes, "Comma-separated training sizes")->delimiter(',');
	per_day_flag->excludes(size_opt);
	curves->add_option("--days", roll.horizon, "Days per forecast")->capture_default_str();
	curves->add_option("--origin", origin, "Origin index for --training-size (default: largest size)");
	add_rolling_flags(curves);
	curves->add_option("--out", out_path, "CSV path (default: stdout)");

	// simulate
	auto* simulate = app.add_subcommand("simulate", "Compare event plans over the days after a model's training data");
	std::string baseline_path;
	std::vector<std::string> scenario_paths;
	int sim_horizon = 30;
	simulate->add_option("--model", model_path, "Artifact from fit")->required()->check(CLI::ExistingFile);
	simulate->add_option("--baseline", baseline_path, "Baseline scenario JSON")->required()->check(CLI::ExistingFile);
	simulate->add_option("--scenario", scenario_paths, "Alternative scenario JSON (repeatable)")
	    ->required()
	    ->check(CLI::ExistingFile);
	simulate->add_option("--horizon", sim_horizon, "Days simulated")->check(CLI::Range(1, 90))->capture_default_str();
	add_inputs(simulate, false);
	simulate->add_option("--out", out_path, "Output path (default: stdout)");

	// synth
	auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset with known effects");
	std::string synth_config, out_dir = ".";
	synth->add_option("--config", synth_config, "SynthConfig JSON")->check(CLI::ExistingFile);
	synth->add_option("--out-dir", out_dir, "Directory for series.csv, events.csv, ground_truth.json")
	    ->capture_default_str();

	// serve
	auto* serve = app.add_subcommand("serve", "Run the HTTP service");
	std::string host = env_or("HOST", "0.0.0.0");
	int port = std::atoi(env_or("PORT", "8080").c_str());
	serve->add_option("--host", host, "Bind address (env HOST)")->capture_default_str();
	serve->add_option("--port", port, "Port, 0 for any free one (env PORT)")->capture_default_str();
	serve->add_option("--store", store_path, "Store file (env STORE_PATH)")->capture_default_str();

	// openapi
	auto* openapi = app.add_subcommand("openapi", "Print the OpenAPI description of the service");
	openapi->add_option("--out", out_path, "Output path (default: stdout)");

	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp& e) {
		return app.exit(e, out, err);
	} catch (const CLI::CallForAllHelp& e) {
		return app.exit(e, out, err);
	} catch (const CLI::CallForVersion& e) {
		return app.exit(e, out, err);
	} catch (const CLI::ParseError& e) {
		if (argc > 1 && argv[1][0] != '-' && !app.get_subcommand_no_throw(argv[1])) {
			err << "error: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
			return 1;
		}
		if (app.get_subcommands().empty()) {
			err << "error: " << e.what() << "\n\n" << app.help();
		} else {
			err << "error: " << e.what() << "\nRun with --help for usage.\n";
		}
		return 1;
	}

	try {
		if (ingest->parsed()) {
			service::Service svc(std::make_shared<service::Store>(store_path));
			service::Request r;
			r.method = "POST";
			r.path = "/datasets";
			r.content_type = "text/csv";
			r.body = read_text_file(ingest_csv);
			r.query = {{"kind", kind}, {"name", name.empty() ? fs::path(ingest_csv).stem().string() : name}};
			if (!game.empty()) r.query["game"] = game;
			if (kind == "series") r.query["target"] = fit.target;
			if (!ingest_from.empty()) r.query["from"] = ingest_from;
			if (!ingest_to.empty()) r.query["to"] = ingest_to;
			const auto res = svc.handle(r);
			const auto body = json::parse(res.body);
			if (res.status >= 400) {
				err << "error: " << body.value("code", "") << ": " << body.value("message", "");
				if (!body.value("field_path", "").empty()) err << " (" << body["field_path"].get<std::string>() << ")";
				err << '\n';
				return res.status >= 500 ? 2 : 1;
			}
			emit(body.dump(2), "", out);
			return 0;
		}
		if (fit_cmd->parsed()) {
			const auto config = model_config(fit, seed);
			const auto series = load_series(in.series);
			const auto window = training_window(series, fit);
			const auto calendar = load_calendar(in, series.range());
			const auto model = fit_model(config, series.slice(window), calendar);
			auto artifact = model.to_json();
			emit(artifact.dump(), out_path, out);
			if (!out_path.empty()) {
				emit(json{{"family", fit.family}, {"target", fit.target}, {"training_window", range_json(window)},
				          {"artifact", out_path}}
				         .dump(2),
				     "", out);
			}
			return 0;
		}
		if (forecast_cmd->parsed()) {
			if (forecast_horizon < 1 || forecast_horizon > 366) {
				throw Error(ErrorCode::InvalidArgument, "horizon must lie in [1, 366]", "horizon");
			}
			const auto model = load_model(model_path);
			std::optional<DateRange> cover;
			if (!calendar_to.empty()) cover = DateRange{model.training_range().first, date_flag(calendar_to, "calendar-to")};
			const auto f = model.forecast(load_calendar(in, cover), forecast_horizon);
			json dates = json::array();
			for (std::size_t i = 0; i < f.values.size(); ++i) dates.push_back(f.values.date_at(i).to_iso());
			emit(json{{"dates", dates}, {"values", f.values.values()}}.dump(2), out_path, out);
			return 0;
		}
		if (evaluate->parsed() || curves->parsed()) {
			const auto series = load_series(in.series);
			const auto calendar = load_calendar(in, series.range());
			const auto fn = forecaster(fit, seed);
			if (evaluate->parsed()) {
				const auto report = eval::rolling_evaluate(fn, series, calendar, rolling_config(roll));
				emit(format == "json" ? eval::to_json(report).dump(2) : eval::report_to_csv(report), out_path, out);
				return 0;
			}
			if (!sizes.empty()) {
				const auto scaling = roll.mase == "training" ? eval::MaseScaling::TrainingSeries : eval::MaseScaling::EvaluationWindow;
				emit(eval::size_curve_to_csv(eval::training_size_curve(fn, series, calendar, sizes, roll.horizon, origin, scaling)),
				     out_path, out);
				return 0;
			}
			if (!per_day) {
				throw Error(ErrorCode::InvalidArgument, "give --horizon or --training-size", "horizon");
			}
			const auto report = eval::rolling_evaluate(fn, series, calendar, rolling_config(roll));
			emit(eval::horizon_curve_to_csv(eval::horizon_curve(report)), out_path, out);
			return 0;
		}
		if (simulate->parsed()) {
			const auto model = load_model(model_path);
			const auto window = sim::simulation_window(model, sim_horizon);
			const auto history = load_calendar(in, std::nullopt);
			const auto baseline =
			    with_prefix("baseline", [&] { return sim::scenario_from_json(json_file(baseline_path, "baseline"), window); });
			std::vector<sim::Scenario> alternatives;
			for (std::size_t i = 0; i < scenario_paths.size(); ++i) {
				const auto prefix = "scenario[" + std::to_string(i) + "]";
				alternatives.push_back(
				    with_prefix(prefix, [&] { return sim::scenario_from_json(json_file(scenario_paths[i], prefix), window); }));
			}
			json result{{"horizon", sim_horizon}, {"window", range_json(window)}};
			if (alternatives.size() == 1) {
				const auto [b, a] = sim::simulate_scenario(model, history, baseline, alternatives.front(), sim_horizon);
				result["baseline"] = sim::to_json(b);
				result["alternative"] = sim::to_json(a);
			} else {
				const auto base = sim::simulate_scenario(model, history, baseline, baseline, sim_horizon).first;
				result["baseline"] = sim::to_json(base);
				result["alternatives"] = json::array();
				for (const auto& r : sim::compare_scenarios(model, history, baseline, alternatives, sim_horizon)) {
					result["alternatives"].push_back(sim::to_json(r));
				}
			}
			emit(result.dump(2), out_path, out);
			return 0;
		}
		if (synth->parsed()) {
			auto config = synth_config.empty() ? sim::SynthConfig{} : sim::SynthConfig::from_json(json_file(synth_config, "config"));
			if (app.count("--seed") > 0) config.seed = seed;
			const auto data = sim::generate_synthetic(config);
			const fs::path dir(out_dir);
			fs::create_directories(dir);
			write_text_file(dir / "series.csv", series_to_csv(data.series));
			write_text_file(dir / "events.csv", events_to_csv(data.calendar));
			write_text_file(dir / "ground_truth.json", data.ground_truth.dump(2) + "\n");
			out << (dir / "series.csv").string() << '\n'
			    << (dir / "events.csv").string() << '\n'
			    << (dir / "ground_truth.json").string() << '\n';
			return 0;
		}
		if (serve->parsed()) {
			service::Service svc(std::make_shared<service::Store>(store_path));
			service::HttpServer server(svc);
			const int bound = server.bind(host, port);
			out << "listening on " << host << ":" << bound << " (store " << store_path << ")" << std::endl;
			server.serve();
			return 0;
		}
		if (openapi->parsed()) {
			emit(service::openapi_document().dump(2), out_path, out);
			return 0;
		}
	} catch (const Error& e) {
		err << "error: " << e.what();
		if (!e.field_path().empty()) err << " (" << e.field_path() << ")";
		err << '\n';
		return exit_code(e.code());
	} catch (const std::exception& e) {
		err << "error: " << e.what() << '\n';
		return 1;
	}
	return 1;
}

} // namespace eventcast::cli
