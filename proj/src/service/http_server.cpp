#include "eventcast/service/service.hpp"

#include <httplib.h>

#include <atomic>

namespace eventcast::service {

struct HttpServer::Impl {
	explicit Impl(const Service& s) : service(s) {}
	const Service& service;
	httplib::Server server;
	std::atomic<bool> stopped{false};
};

HttpServer::HttpServer(const Service& service) : impl_(std::make_unique<Impl>(service)) {
	auto& svr = impl_->server;
	const Service* s = &service;
	auto adapt = [s](const httplib::Request& req, httplib::Response& res) {
		Request r;
		r.method = req.method;
		r.path = req.path;
		for (const auto& [k, v] : req.params) r.query.emplace(k, v);
		r.body = req.body;
		if (req.has_header("Content-Type")) r.content_type = req.get_header_value("Content-Type");
		const auto out = s->handle(r);
		res.status = out.status;
		res.set_content(out.body, "application/json");
	};
	svr.set_default_headers({{"Access-Control-Allow-Origin", "*"},
	                         {"Access-Control-Allow-Headers", "Content-Type"},
	                         {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"}});
	svr.Get(".*", adapt);
	svr.Post(".*", adapt);
	svr.Delete(".*", adapt);
	svr.Put(".*", adapt);
	svr.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
	auto& svr = impl_->server;
	if (port == 0) {
		const int bound = svr.bind_to_any_port(host);
		if (bound < 0) throw Error(ErrorCode::InvalidArgument, "cannot bind " + host, "HOST");
		return bound;
	}
	if (!svr.bind_to_port(host, port)) {
		throw Error(ErrorCode::InvalidArgument, "cannot bind " + host + ":" + std::to_string(port), "PORT");
	}
	return port;
}

void HttpServer::serve() {
	if (!impl_->stopped) impl_->server.listen_after_bind();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void HttpServer::stop() {
	if (!impl_) return;
	impl_->stopped = true;
	impl_->server.stop();
}

} // namespace eventcast::service
