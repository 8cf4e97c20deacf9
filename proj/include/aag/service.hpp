#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "aag/analysis.hpp"
#include "aag/graph.hpp"

namespace aag {

/// In-memory session store. Each PUT installs a new immutable revision, so
/// readers holding a snapshot never observe a half-applied update.
class GraphStore {
 public:
  using Clock = std::chrono::steady_clock;

  struct Revision {
    std::string session_id;
    std::uint64_t revision = 0;
    AccountAccessGraph graph;
  };
  using Snapshot = std::shared_ptr<const Revision>;

  enum class PutStatus { Ok, NotFound, Conflict };
  struct PutResult {
    PutStatus status = PutStatus::Ok;
    Snapshot current;  // the installed revision, or the current one on conflict
  };

  explicit GraphStore(std::chrono::seconds idle_timeout = std::chrono::minutes(30),
                      std::function<Clock::time_point()> now = Clock::now);

  Snapshot create(AccountAccessGraph graph);
  Snapshot get(const std::string& session_id);
  /// Compare-and-set when `expected_revision` is given.
  PutResult put(const std::string& session_id, AccountAccessGraph graph,
                std::optional<std::uint64_t> expected_revision);
  std::size_t size();

 private:
  struct Entry {
    Snapshot current;
    Clock::time_point last_used;
  };

  void expire_locked(Clock::time_point now);
  std::string new_session_id();

  std::chrono::seconds idle_timeout_;
  std::function<Clock::time_point()> now_;
  std::mutex mutex_;
  std::map<std::string, Entry> sessions_;
  std::uint64_t id_state_;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::chrono::seconds idle_timeout = std::chrono::minutes(30);
  std::size_t max_body_bytes = 1 << 20;
  std::string cors_origin = "*";
  ParseOptions parse;
  AnalysisOptions analysis;
};

/// JSON API over the engine: /graphs sessions, analyze, what-if, provider
/// templates, record instantiation and /healthz.
class HttpService {
 public:
  explicit HttpService(ServiceConfig config);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds the listening socket and returns the port, or -1 on failure.
  int bind();
  /// Serves until stop(); call bind() first.
  bool run();
  void stop();
  void wait_until_ready() const;

  GraphStore& store();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace aag
