#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "payattr/corpus.hpp"
#include "payattr/rate_limiter.hpp"

namespace payattr {

struct FeedPage {
  std::vector<Transaction> transactions;  // newest first
  std::optional<std::string> next_before_id;
  std::chrono::milliseconds refresh_interval{0};
};

struct ClientConfig {
  double rate = 10.0;  // requests per second; <= 0 disables
  double burst = 5.0;
  std::size_t max_retries = 5;  // transport errors and 5xx
  std::size_t max_rate_limit_waits = 100;
  std::chrono::milliseconds backoff_initial{100};
  std::chrono::milliseconds backoff_max{5000};
  std::chrono::seconds timeout{10};
  // Overrides the feed's advertised refresh interval between polls.
  std::optional<std::chrono::milliseconds> poll_interval;
};

struct ClientStats {
  std::size_t requests = 0;
  std::size_t retries = 0;
  std::size_t rate_limited = 0;
};

/// Synchronous client for the mock API. One instance per thread; the
/// limiter may be shared between instances.
class HarvestClient {
 public:
  HarvestClient(std::string endpoint, ClientConfig config = {}, std::shared_ptr<TokenBucket> limiter = nullptr);
  ~HarvestClient();
  HarvestClient(HarvestClient&&) noexcept;

  /// Polls the feed `pages` times and returns the distinct transactions in
  /// first-seen order, waiting out the refresh interval between polls.
  std::vector<Transaction> fetch_public_feed(std::size_t pages);

  /// Every transaction of the user, following before_id until exhausted.
  /// `on_page` may return false to abandon the walk (throws Interrupted).
  /// Throws UserNotFound on 404.
  std::vector<Transaction> fetch_user_transactions(
      const std::string& user_id, const std::function<bool(std::size_t page, const FeedPage&)>& on_page = {});

  /// Extracts the user id embedded in a profile page. Throws
  /// UnknownUsername on 404 and PatternNotFound if the id is missing.
  std::string resolve_user_id(const std::string& username);

  const ClientStats& stats() const { return stats_; }
  std::shared_ptr<TokenBucket> limiter() const { return limiter_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  ClientConfig config_;
  std::shared_ptr<TokenBucket> limiter_;
  ClientStats stats_;
};

/// Parses a listing body. Throws MalformedPage.
FeedPage parse_page(const std::string& body);

struct CrawlState {
  std::set<std::string> seen;       // transaction ids already written
  std::deque<std::string> pending;  // users still to crawl
  std::set<std::string> completed;
  std::string checkpoint_at;        // ISO-8601 UTC of the last save

  nlohmann::json to_json() const;
  static CrawlState from_json(const nlohmann::json& j);
  /// Writes to a sibling temp file and renames it over `path`.
  void save(const std::string& path) const;
  static CrawlState load(const std::string& path);
};

struct CrawlOptions {
  std::size_t workers = 8;
  ClientConfig client;
  std::string checkpoint_path;  // empty: no checkpointing
  std::string output_path;      // empty: results only returned in memory
  bool resume = false;          // continue from checkpoint_path/output_path
  // Stop handing out users once this many completed in this run (0 = never).
  // Simulates a kill at a checkpoint boundary.
  std::size_t stop_after_users = 0;
  const std::atomic<bool>* cancel = nullptr;
};

struct CrawlResult {
  std::vector<Transaction> transactions;  // newly written this run
  CrawlState state;
  bool interrupted = false;
  std::vector<std::string> missing_users;  // 404s
  ClientStats stats;
};

/// Crawls every user with a bounded worker pool. The dedup set, queue and
/// checkpoint are shared under one lock; the checkpoint is rewritten after
/// each completed user.
CrawlResult crawl_users(const std::string& endpoint, const std::vector<std::string>& user_ids,
                        const CrawlOptions& options);

}  // namespace payattr
