#include "eventcast/service/store.hpp"

#include "eventcast/core/csv.hpp"
#include "eventcast/core/json_io.hpp"
#include "eventcast/error.hpp"
#include "eventcast/features/io.hpp"

#include <cstdio>
#include <fstream>
#include <mutex>

namespace eventcast::service {

namespace {

using json = nlohmann::json;

json range_to_json(const DateRange& r) { return {{"from", r.first.to_iso()}, {"to", r.last.to_iso()}}; }

DateRange range_from_json(const json& j) {
	return {Date::parse(j.at("from").get<std::string>()), Date::parse(j.at("to").get<std::string>())};
}

} // namespace

std::string content_hash(std::string_view text) {
	std::uint64_t h = 14695981039346656037ull;
	for (unsigned char c : text) {
		h ^= c;
		h *= 1099511628211ull;
	}
	char buf[17];
	std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
	return buf;
}

std::string_view to_string(DatasetKind kind) {
	switch (kind) {
	case DatasetKind::Series: return "series";
	case DatasetKind::Calendar: return "calendar";
	case DatasetKind::Temperature: return "temperature";
	}
	return "?";
}

DatasetKind parse_dataset_kind(std::string_view text) {
	for (auto k : {DatasetKind::Series, DatasetKind::Calendar, DatasetKind::Temperature}) {
		if (to_string(k) == text) return k;
	}
	throw Error(ErrorCode::InvalidArgument,
	            "unknown dataset kind '" + std::string(text) + "' (series, calendar or temperature)", "kind");
}

json Dataset::summary() const {
	json j{{"id", id}, {"kind", std::string(to_string(kind))}, {"name", name}, {"game", game},
	       {"target", target}, {"created_at", created_at}};
	if (range) {
		j["from"] = range->first.to_iso();
		j["to"] = range->last.to_iso();
	}
	return j;
}

json Dataset::to_json() const {
	auto j = summary();
	j["csv"] = csv;
	return j;
}

Dataset Dataset::from_json(const json& j) {
	Dataset d;
	d.id = j.at("id").get<std::string>();
	d.kind = parse_dataset_kind(j.at("kind").get<std::string>());
	d.name = j.value("name", "");
	d.game = j.value("game", "");
	d.target = j.value("target", "");
	d.csv = j.at("csv").get<std::string>();
	if (j.contains("from")) d.range = range_from_json(j);
	d.created_at = j.value("created_at", "");
	return d;
}

json ModelRecord::summary() const {
	return {{"id", id},
	        {"family", std::string(eventcast::to_string(family))},
	        {"game", game},
	        {"target", target},
	        {"trained_at", trained_at},
	        {"params", params},
	        {"training_window", range_to_json(training_window)},
	        {"series", series_id},
	        {"calendar_hash", calendar_hash}};
}

json ModelRecord::to_json() const {
	auto j = summary();
	j["artifact"] = artifact;
	return j;
}

ModelRecord ModelRecord::from_json(const json& j) {
	ModelRecord r;
	r.id = j.at("id").get<std::string>();
	r.family = parse_family(j.at("family").get<std::string>());
	r.game = j.value("game", "");
	r.target = j.value("target", "");
	r.trained_at = j.value("trained_at", "");
	r.params = j.at("params");
	r.artifact = j.at("artifact");
	r.training_window = range_from_json(j.at("training_window"));
	r.series_id = j.value("series", "");
	r.calendar_hash = j.value("calendar_hash", "");
	return r;
}

Store::Store(std::filesystem::path path) : path_(std::move(path)) {
	if (path_.empty() || !std::filesystem::exists(path_)) return;
	json j;
	try {
		j = json::parse(read_text_file(path_));
	} catch (const json::exception& e) {
		throw Error(ErrorCode::ParseError, "store file " + path_.string() + " is not JSON: " + e.what());
	}
	load(j);
}

void Store::load(const json& j) {
	check_format(j, "eventcast.store", 1);
	try {
		for (const auto& d : j.at("datasets")) {
			auto ds = Dataset::from_json(d);
			if (ds.kind == DatasetKind::Series) {
				parsed_[ds.id] = std::make_shared<const TimeSeries>(parse_series_csv(ds.csv, ds.name));
			}
			datasets_.emplace(ds.id, std::move(ds));
		}
		for (const auto& m : j.at("models")) {
			auto r = ModelRecord::from_json(m);
			models_.emplace(r.id, std::move(r));
		}
		calendar_ = calendar_from_json(j.at("calendar"));
	} catch (const json::exception& e) {
		throw Error(ErrorCode::ParseError, std::string("malformed store document: ") + e.what());
	}
}

json Store::document_locked() const {
	json datasets = json::array(), models = json::array();
	for (const auto& [id, d] : datasets_) datasets.push_back(d.to_json());
	for (const auto& [id, m] : models_) models.push_back(m.to_json());
	return {{"format", "eventcast.store"},
	        {"version", 1},
	        {"datasets", datasets},
	        {"models", models},
	        {"calendar", calendar_to_json(calendar_)}};
}

void Store::persist_locked() const {
	if (path_.empty()) return;
	if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
	auto tmp = path_;
	tmp += ".tmp";
	{
		std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
		if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
		out << document_locked().dump();
		out.flush();
		if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
	}
	std::filesystem::rename(tmp, path_);
}

bool Store::add_dataset(const Dataset& dataset) {
	// Parse before taking the lock; only the merge needs it.
	std::shared_ptr<const TimeSeries> series;
	EventCalendar incoming;
	switch (dataset.kind) {
	case DatasetKind::Series:
		series = std::make_shared<const TimeSeries>(parse_series_csv(dataset.csv, dataset.name));
		break;
	case DatasetKind::Calendar: incoming = parse_events_csv(dataset.csv, dataset.range); break;
	case DatasetKind::Temperature: add_temperature_csv(incoming, dataset.csv); break;
	}

	std::unique_lock lock(mutex_);
	if (datasets_.contains(dataset.id)) return false;
	if (dataset.kind == DatasetKind::Series) {
		parsed_[dataset.id] = std::move(series);
	} else {
		EventCalendar merged = calendar_;
		merged.merge(incoming);
		calendar_ = std::move(merged);
	}
	datasets_.emplace(dataset.id, dataset);
	persist_locked();
	return true;
}

std::optional<Dataset> Store::dataset(const std::string& id) const {
	std::shared_lock lock(mutex_);
	const auto it = datasets_.find(id);
	if (it == datasets_.end()) return std::nullopt;
	return it->second;
}

std::vector<Dataset> Store::datasets() const {
	std::shared_lock lock(mutex_);
	std::vector<Dataset> out;
	for (const auto& [id, d] : datasets_) out.push_back(d);
	return out;
}

std::shared_ptr<const TimeSeries> Store::series(const std::string& id) const {
	std::shared_lock lock(mutex_);
	const auto it = parsed_.find(id);
	if (it == parsed_.end()) throw Error(ErrorCode::NotFound, "no series dataset '" + id + "'", "series");
	return it->second;
}

EventCalendar Store::calendar() const {
	std::shared_lock lock(mutex_);
	return calendar_;
}

bool Store::add_model(const ModelRecord& record) {
	std::unique_lock lock(mutex_);
	if (models_.contains(record.id)) return false;
	models_.emplace(record.id, record);
	try {
		persist_locked();
	} catch (...) {
		models_.erase(record.id);
		throw;
	}
	return true;
}

std::optional<ModelRecord> Store::model(const std::string& id) const {
	std::shared_lock lock(mutex_);
	const auto it = models_.find(id);
	if (it == models_.end()) return std::nullopt;
	return it->second;
}

std::vector<ModelRecord> Store::models() const {
	std::shared_lock lock(mutex_);
	std::vector<ModelRecord> out;
	for (const auto& [id, m] : models_) out.push_back(m);
	return out;
}

std::shared_ptr<const FittedModel> Store::fitted(const std::string& id) const {
	{
		std::lock_guard cache(cache_mutex_);
		const auto it = cache_.find(id);
		if (it != cache_.end()) return it->second;
	}
	nlohmann::json artifact;
	{
		std::shared_lock lock(mutex_);
		const auto it = models_.find(id);
		if (it == models_.end()) throw Error(ErrorCode::NotFound, "no model '" + id + "'", "model_id");
		artifact = it->second.artifact;
	}
	auto model = std::make_shared<const FittedModel>(FittedModel::from_json(artifact));
	std::lock_guard cache(cache_mutex_);
	return cache_.emplace(id, std::move(model)).first->second;
}

bool Store::remove_model(const std::string& id) {
	std::unique_lock lock(mutex_);
	const auto it = models_.find(id);
	if (it == models_.end()) return false;
	auto removed = std::move(it->second);
	models_.erase(it);
	try {
		persist_locked();
	} catch (...) {
		models_.emplace(id, std::move(removed));
		throw;
	}
	std::lock_guard cache(cache_mutex_);
	cache_.erase(id);
	return true;
}

std::string Store::state_hash() const {
	std::shared_lock lock(mutex_);
	return content_hash(document_locked().dump());
}

nlohmann::json Store::to_json() const {
	std::shared_lock lock(mutex_);
	return document_locked();
}

} // namespace eventcast::service
