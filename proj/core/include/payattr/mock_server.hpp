#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "payattr/corpus.hpp"

namespace payattr {

struct MockServerConfig {
  std::size_t page_size = 20;
  // The feed window advances once per interval; zero advances it on every
  // feed request.
  std::chrono::milliseconds refresh_interval = std::chrono::minutes(15);
  double rate_limit = 0.0;  // requests per second; <= 0 disables
  double burst = 0.0;       // <= 0 means max(1, rate_limit)
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks a free port
  std::map<std::string, std::string> usernames;  // username -> user id, on top of derived ones
  std::set<std::string> malformed_profiles;      // usernames whose page lacks the id
  std::vector<std::string> extra_users;          // known ids with no transactions
};

struct MockServerStats {
  std::size_t requests = 0;
  std::size_t rate_limited = 0;  // 429 responses sent
  std::size_t feed_requests = 0;
  std::size_t user_requests = 0;
  std::size_t profile_requests = 0;
};

/// Derived username for a display name: ASCII-lowercased, runs of
/// non-alphanumerics collapsed to '-'.
std::string username_slug(std::string_view display_name);

/// Local HTTP server imitating the public feed, per-user transaction
/// listing and profile pages of a payment app.
///   GET /feed                                  {"data": [...], "page_size", "refresh_interval_ms"}
///   GET /users/{id}/transactions[?before_id=]  {"data": [...], "next_before_id"?}
///   GET /profile/{username}                    HTML embedding "user_id": "<id>"
/// Listings are newest-first. Requests over the rate limit get 429 with a
/// Retry-After header (seconds) and Retry-After-Ms.
class MockServer {
 public:
  MockServer(std::vector<Transaction> transactions, MockServerConfig config = {});
  ~MockServer();
  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  /// Binds and starts serving on a background thread. Throws BindError.
  void start();
  void stop();

  int port() const;
  std::string endpoint() const;  // "http://host:port"
  MockServerStats stats() const;
  const MockServerConfig& config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace payattr
