#pragma once

#include "eventcast/core/time_series.hpp"
#include "eventcast/features/calendar.hpp"
#include "eventcast/models/forecaster.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace eventcast::service {

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string content_hash(std::string_view text);

enum class DatasetKind { Series, Calendar, Temperature };
std::string_view to_string(DatasetKind kind);
DatasetKind parse_dataset_kind(std::string_view text);

/// An uploaded CSV blob and what it was parsed as.
struct Dataset {
	std::string id;
	DatasetKind kind = DatasetKind::Series;
	std::string name;
	std::string game;
	std::string target;
	std::string csv;
	std::optional<DateRange> range; // explicit calendar span, when given
	std::string created_at;

	/// Metadata without the blob.
	nlohmann::json summary() const;
	nlohmann::json to_json() const;
	static Dataset from_json(const nlohmann::json& j);
};

struct ModelRecord {
	std::string id;
	Family family = Family::Arima;
	std::string game;
	std::string target;      // sales | playtime
	std::string trained_at;  // ISO-8601 UTC
	nlohmann::json params;   // the ModelConfig document
	nlohmann::json artifact; // FittedModel::to_json
	DateRange training_window{};
	std::string series_id;
	std::string calendar_hash;

	/// Everything except the artifact.
	nlohmann::json summary() const;
	nlohmann::json to_json() const;
	static ModelRecord from_json(const nlohmann::json& j);
};

/// Datasets, models and the shared event calendar, persisted to one JSON file. Every write replaces
/// the file atomically. Readers share a lock; writers are serialized.
class Store {
public:
	/// An empty path keeps everything in memory. An existing file is loaded; a malformed one throws
	/// ParseError.
	explicit Store(std::filesystem::path path = {});

	const std::filesystem::path& path() const { return path_; }

	/// Adds the dataset (calendar and temperature sets merge into the shared calendar). Returns false
	/// when a dataset with the same id already exists, leaving the store unchanged. Throws
	/// DuplicateEvent when a calendar clashes with the shared one.
	bool add_dataset(const Dataset& dataset);
	std::optional<Dataset> dataset(const std::string& id) const;
	std::vector<Dataset> datasets() const;
	/// Parsed series of a Series dataset; NotFound otherwise.
	std::shared_ptr<const TimeSeries> series(const std::string& id) const;

	/// The merged calendar of every calendar and temperature upload.
	EventCalendar calendar() const;

	/// False when the id is already present.
	bool add_model(const ModelRecord& record);
	std::optional<ModelRecord> model(const std::string& id) const;
	std::vector<ModelRecord> models() const;
	/// The deserialized artifact, cached. NotFound when absent.
	std::shared_ptr<const FittedModel> fitted(const std::string& id) const;
	bool remove_model(const std::string& id);

	/// Hash of the persisted document; equal hashes mean equal contents.
	std::string state_hash() const;
	nlohmann::json to_json() const;

private:
	nlohmann::json document_locked() const;
	void persist_locked() const;
	void load(const nlohmann::json& j);

	std::filesystem::path path_;
	mutable std::shared_mutex mutex_;
	std::map<std::string, Dataset> datasets_;
	std::map<std::string, std::shared_ptr<const TimeSeries>> parsed_;
	std::map<std::string, ModelRecord> models_;
	EventCalendar calendar_;
	mutable std::mutex cache_mutex_;
	mutable std::map<std::string, std::shared_ptr<const FittedModel>> cache_;
};

} // namespace eventcast::service
