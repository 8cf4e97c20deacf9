#include "aag/service.hpp"

#include <httplib.h>

#include <random>
#include <set>

#include "aag/error.hpp"
#include "aag/provider.hpp"

namespace aag {

GraphStore::GraphStore(std::chrono::seconds idle_timeout, std::function<Clock::time_point()> now)
    : idle_timeout_(idle_timeout), now_(std::move(now)), id_state_(std::random_device{}()) {
  id_state_ = (id_state_ << 32) ^ std::random_device{}();
}

std::string GraphStore::new_session_id() {
  static constexpr char kHex[] = "0123456789abcdef";
  std::mt19937_64 rng(id_state_++);
  std::string id;
  for (int i = 0; i < 2; ++i) {
    auto bits = rng();
    for (int n = 0; n < 16; ++n, bits >>= 4) id += kHex[bits & 0xf];
  }
  return id;
}

void GraphStore::expire_locked(Clock::time_point now) {
  std::erase_if(sessions_, [&](const auto& kv) { return now - kv.second.last_used > idle_timeout_; });
}

GraphStore::Snapshot GraphStore::create(AccountAccessGraph graph) {
  std::lock_guard lock(mutex_);
  auto now = now_();
  expire_locked(now);
  std::string id;
  do {
    id = new_session_id();
  } while (sessions_.contains(id));
  auto snap = std::make_shared<const Revision>(Revision{id, 1, std::move(graph)});
  sessions_[id] = {snap, now};
  return snap;
}

GraphStore::Snapshot GraphStore::get(const std::string& session_id) {
  std::lock_guard lock(mutex_);
  auto now = now_();
  expire_locked(now);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) return nullptr;
  it->second.last_used = now;
  return it->second.current;
}

GraphStore::PutResult GraphStore::put(const std::string& session_id, AccountAccessGraph graph,
                                      std::optional<std::uint64_t> expected_revision) {
  std::lock_guard lock(mutex_);
  auto now = now_();
  expire_locked(now);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) return {PutStatus::NotFound, nullptr};
  auto& entry = it->second;
  entry.last_used = now;
  if (expected_revision && *expected_revision != entry.current->revision) {
    return {PutStatus::Conflict, entry.current};
  }
  entry.current = std::make_shared<const Revision>(
      Revision{session_id, entry.current->revision + 1, std::move(graph)});
  return {PutStatus::Ok, entry.current};
}

std::size_t GraphStore::size() {
  std::lock_guard lock(mutex_);
  expire_locked(now_());
  return sessions_.size();
}

namespace {

constexpr const char* kJson = "application/json";

void send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message,
                const std::string& path = {}) {
  Json body;
  body["code"] = code;
  body["message"] = message;
  body["path"] = path;
  send(res, status, body);
}

void send_error(httplib::Response& res, const Error& e) {
  send_error(res, 400, to_string(e.code()), e.what(), e.path());
}

Json parse_body(const httplib::Request& req, bool allow_empty = false) {
  if (req.body.empty() && allow_empty) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid JSON body: ") + e.what());
  }
}

Json warnings_json(const AccountAccessGraph& g) {
  Json out = Json::array();
  for (const auto& w : g.warnings()) out.push_back(w);
  return out;
}

Json session_json(const GraphStore::Revision& rev) {
  Json j;
  j["session_id"] = rev.session_id;
  j["revision"] = rev.revision;
  return j;
}

AnalysisOptions request_options(const Json& body, AnalysisOptions base) {
  if (auto it = body.find("unmapped"); it != body.end()) {
    auto policy = it->is_string() ? parse_unmapped_leaf_policy(it->get<std::string>()) : std::nullopt;
    if (!policy) throw Error(ErrorCode::ParseError, "unmapped must be \"abstract\" or \"unsatisfiable\"", "/unmapped");
    base.unmapped = *policy;
  }
  return base;
}

std::string request_account(const Json& body, const AccountAccessGraph& graph) {
  if (auto it = body.find("account"); it != body.end()) {
    if (!it->is_string()) throw Error(ErrorCode::ParseError, "account must be a string", "/account");
    return it->get<std::string>();
  }
  return graph.roots().front();
}

}  // namespace

struct HttpService::Impl {
  explicit Impl(ServiceConfig c) : config(std::move(c)), store(config.idle_timeout) {}

  ServiceConfig config;
  GraphStore store;
  httplib::Server server;

  void cors(httplib::Response& res) const {
    res.set_header("Access-Control-Allow-Origin", config.cors_origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, If-Match");
  }

  template <typename F>
  httplib::Server::Handler guarded(F f) {
    return [f = std::move(f)](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const Error& e) {
        send_error(res, e);
      }
    };
  }

  GraphStore::Snapshot session_or_404(const std::string& id, httplib::Response& res) {
    auto snap = store.get(id);
    if (!snap) send_error(res, 404, "NotFound", "unknown session '" + id + "'", id);
    return snap;
  }

  void routes() {
    server.set_payload_max_length(config.max_body_bytes);
    server.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) { cors(res); });
    server.set_error_handler([this](const httplib::Request&, httplib::Response& res) {
      cors(res);
      if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
      if (res.status == 413) {
        send_error(res, 413, "PayloadTooLarge",
                   "request body exceeds " + std::to_string(config.max_body_bytes) + " bytes");
      } else if (res.status == 404) {
        send_error(res, 404, "NotFound", "no such endpoint");
      } else {
        send_error(res, res.status, "HttpError", httplib::status_message(res.status));
      }
      return httplib::Server::HandlerResponse::Handled;
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        send_error(res, 500, "InternalError", e.what());
      } catch (...) {
        send_error(res, 500, "InternalError", "unknown error");
      }
    });

    server.Options(R"(.*)", [this](const httplib::Request&, httplib::Response& res) {
      cors(res);
      res.status = 204;
    });

    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      send(res, 200, Json{{"status", "ok"}});
    });

    server.Post("/graphs", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto graph = build_graph(parse_body(req), config.parse);
      auto snap = store.create(std::move(graph));
      auto body = session_json(*snap);
      body["warnings"] = warnings_json(snap->graph);
      send(res, 201, body);
    }));

    server.Get(R"(/graphs/([A-Za-z0-9]+))", [this](const httplib::Request& req, httplib::Response& res) {
      auto snap = session_or_404(req.matches[1], res);
      if (!snap) return;
      auto body = session_json(*snap);
      body["document"] = to_json(snap->graph);
      body["warnings"] = warnings_json(snap->graph);
      send(res, 200, body);
    });

    server.Put(R"(/graphs/([A-Za-z0-9]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::string id = req.matches[1];
      auto body = parse_body(req);
      std::optional<std::uint64_t> expected;
      Json document = body;
      if (body.is_object() && body.contains("document")) {
        document = body["document"];
        if (auto it = body.find("revision"); it != body.end()) {
          if (!it->is_number_unsigned()) throw Error(ErrorCode::ParseError, "revision must be a positive integer", "/revision");
          expected = it->get<std::uint64_t>();
        }
      }
      if (req.has_header("If-Match")) {
        try {
          expected = std::stoull(req.get_header_value("If-Match"));
        } catch (const std::exception&) {
          throw Error(ErrorCode::ParseError, "If-Match must hold a revision number", "If-Match");
        }
      }
      if (!store.get(id)) {
        send_error(res, 404, "NotFound", "unknown session '" + id + "'", id);
        return;
      }
      auto graph = build_graph(document, config.parse);
      auto result = store.put(id, std::move(graph), expected);
      switch (result.status) {
        case GraphStore::PutStatus::NotFound:
          send_error(res, 404, "NotFound", "unknown session '" + id + "'", id);
          return;
        case GraphStore::PutStatus::Conflict: {
          Json err;
          err["code"] = "StaleRevision";
          err["message"] = "revision " + std::to_string(*expected) + " is stale; current is " +
                           std::to_string(result.current->revision);
          err["path"] = "/revision";
          err["current_revision"] = result.current->revision;
          send(res, 409, err);
          return;
        }
        case GraphStore::PutStatus::Ok: {
          auto out = session_json(*result.current);
          out["valid"] = true;
          out["warnings"] = warnings_json(result.current->graph);
          send(res, 200, out);
          return;
        }
      }
    }));

    server.Post(R"(/graphs/([A-Za-z0-9]+)/analyze)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  auto snap = session_or_404(req.matches[1], res);
                  if (!snap) return;
                  auto body = parse_body(req, true);
                  auto options = request_options(body, config.analysis);
                  std::vector<AccountAnalysis> analyses;
                  if (body.contains("account")) {
                    analyses.push_back(analyze_account(snap->graph, request_account(body, snap->graph), options));
                  } else {
                    analyses = analyze_graph(snap->graph, options);
                  }
                  auto out = session_json(*snap);
                  auto report = analysis_report(snap->graph, analyses);
                  out["accounts"] = std::move(report["accounts"]);
                  out["warnings"] = std::move(report["warnings"]);
                  send(res, 200, out);
                }));

    server.Post(R"(/graphs/([A-Za-z0-9]+)/what-if)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  auto snap = session_or_404(req.matches[1], res);
                  if (!snap) return;
                  auto body = parse_body(req, true);
                  auto options = request_options(body, config.analysis);
                  std::set<NodeId> lost;
                  if (auto it = body.find("lose"); it != body.end()) {
                    if (!it->is_array()) throw Error(ErrorCode::ParseError, "lose must be an array of ids", "/lose");
                    for (const auto& v : *it) {
                      if (!v.is_string()) throw Error(ErrorCode::ParseError, "lose must be an array of ids", "/lose");
                      lost.insert(v.get<std::string>());
                    }
                  }
                  auto account = request_account(body, snap->graph);
                  auto result = what_if(snap->graph, account, lost, options.unmapped, options.limits);
                  auto out = session_json(*snap);
                  out.update(to_json(result, account, lost, variable_labels(snap->graph)));
                  send(res, 200, out);
                }));

    server.Get(R"(/templates/([a-z]+))", [](const httplib::Request& req, httplib::Response& res) {
      auto provider = parse_provider(req.matches[1].str());
      if (!provider) {
        send_error(res, 404, "NotFound", "no template for '" + req.matches[1].str() + "'", req.matches[1]);
        return;
      }
      send(res, 200, provider_template(*provider));
    });

    server.Post("/instantiate", guarded([](const httplib::Request& req, httplib::Response& res) {
      auto record = record_from_json(parse_body(req));
      auto graph = instantiate_user_graph(record);
      Json out;
      out["document"] = to_json(graph);
      out["warnings"] = warnings_json(graph);
      send(res, 200, out);
    }));
  }
};

HttpService::HttpService(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
  impl_->routes();
}

HttpService::~HttpService() { stop(); }

int HttpService::bind() {
  auto& c = impl_->config;
  if (c.port == 0) return impl_->server.bind_to_any_port(c.host);
  return impl_->server.bind_to_port(c.host, c.port) ? c.port : -1;
}

bool HttpService::run() { return impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void HttpService::wait_until_ready() const { impl_->server.wait_until_ready(); }

GraphStore& HttpService::store() { return impl_->store; }

}  // namespace aag
