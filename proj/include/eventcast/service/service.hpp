#pragma once

#include "eventcast/error.hpp"
#include "eventcast/service/store.hpp"

#include <json.hpp>

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <string>

namespace eventcast::service {

struct Request {
	std::string method; // GET, POST, DELETE
	std::string path;   // without the query string
	std::map<std::string, std::string> query;
	std::string body;
	std::string content_type = "application/json";
};

struct Response {
	int status = 200;
	std::string body; // JSON
};

struct ServiceOptions {
	/// Longest a single /train may run before the client gets a Timeout. The fit itself is not
	/// interrupted; its result is discarded.
	std::chrono::milliseconds train_timeout{120'000};
	/// ISO-8601 UTC timestamps for trained_at and created_at.
	std::function<std::string()> clock;
};

/// HTTP status for a library error code.
int http_status(ErrorCode code);
/// {code, message, field_path}
nlohmann::json error_body(const Error& error);

/// The JSON API over a Store. Handlers hold no state of their own, so one instance serves
/// concurrent requests.
class Service {
public:
	explicit Service(std::shared_ptr<Store> store, ServiceOptions options = {});

	Response handle(const Request& request) const;
	Store& store() const { return *store_; }

private:
	nlohmann::json post_dataset(const Request& r, int& status) const;
	nlohmann::json get_calendar(const Request& r) const;
	nlohmann::json post_train(const nlohmann::json& body, int& status) const;
	nlohmann::json post_forecast(const nlohmann::json& body) const;
	nlohmann::json post_simulate(const nlohmann::json& body) const;
	EventCalendar calendar_for(const nlohmann::json& body) const;

	std::shared_ptr<Store> store_;
	ServiceOptions options_;
};

/// OpenAPI 3 description of every route served by Service.
nlohmann::json openapi_document();

/// Serves a Service over HTTP/1.1.
class HttpServer {
public:
	explicit HttpServer(const Service& service);
	~HttpServer();
	HttpServer(const HttpServer&) = delete;
	HttpServer& operator=(const HttpServer&) = delete;

	/// Binds without serving; port 0 picks a free port. Returns the bound port; throws
	/// InvalidArgument when binding fails.
	int bind(const std::string& host, int port);
	/// Blocks until stop(); returns at once if stop() came first.
	void serve();
	/// Blocks until serve() accepts connections.
	void wait_until_ready() const;
	void stop();

private:
	struct Impl;
	std::unique_ptr<Impl> impl_;
};

} // namespace eventcast::service
