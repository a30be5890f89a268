#include "payattr/harvest.hpp"

#include <algorithm>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <httplib.h>

#include "payattr/error.hpp"

namespace payattr {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Reply {
  int status = 0;
  std::string body;
};

std::string now_iso() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

FeedPage parse_page(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw MalformedPage(std::string("body is not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("data") || !j["data"].is_array()) {
    throw MalformedPage("missing \"data\" array");
  }
  FeedPage page;
  for (const auto& item : j["data"]) {
    try {
      page.transactions.push_back(transaction_from_json(item));
    } catch (const ParseError& e) {
      throw MalformedPage(std::string("bad transaction: ") + e.what());
    }
  }
  if (auto it = j.find("next_before_id"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw MalformedPage("next_before_id must be a string");
    page.next_before_id = it->get<std::string>();
  }
  if (auto it = j.find("refresh_interval_ms"); it != j.end() && it->is_number_integer()) {
    page.refresh_interval = std::chrono::milliseconds(it->get<std::int64_t>());
  }
  return page;
}

struct HarvestClient::Impl {
  explicit Impl(const std::string& endpoint) : client(endpoint) {}
  httplib::Client client;
};

HarvestClient::HarvestClient(std::string endpoint, ClientConfig config, std::shared_ptr<TokenBucket> limiter)
    : impl_(std::make_unique<Impl>(endpoint)), config_(config), limiter_(std::move(limiter)) {
  if (!impl_->client.is_valid()) throw HttpError("invalid endpoint '" + endpoint + "'");
  if (!limiter_) limiter_ = std::make_shared<TokenBucket>(config_.rate, config_.burst);
  impl_->client.set_keep_alive(true);
  impl_->client.set_connection_timeout(config_.timeout);
  impl_->client.set_read_timeout(config_.timeout);
}

HarvestClient::~HarvestClient() = default;
HarvestClient::HarvestClient(HarvestClient&&) noexcept = default;

namespace {

Reply get_with_retries(httplib::Client& client, const std::string& path, const ClientConfig& config,
                       TokenBucket& limiter, ClientStats& stats) {
  std::size_t failures = 0;
  std::size_t waits = 0;
  auto backoff = config.backoff_initial;
  auto fail_or_back_off = [&](const std::string& why) {
    if (failures++ >= config.max_retries) {
      throw HttpError("GET " + path + " failed after " + std::to_string(config.max_retries) + " retries: " + why);
    }
    ++stats.retries;
    std::this_thread::sleep_for(backoff);
    backoff = std::min(config.backoff_max, backoff * 2);
  };
  for (;;) {
    limiter.acquire();
    ++stats.requests;
    auto res = client.Get(path);
    if (!res) {
      fail_or_back_off(httplib::to_string(res.error()));
      continue;
    }
    if (res->status == 429) {
      ++stats.rate_limited;
      if (waits++ >= config.max_rate_limit_waits) throw HttpError("GET " + path + ": still rate limited");
      std::chrono::milliseconds wait = config.backoff_initial;
      if (res->has_header("Retry-After-Ms")) {
        wait = std::chrono::milliseconds(std::stoll(res->get_header_value("Retry-After-Ms")));
      } else if (res->has_header("Retry-After")) {
        wait = std::chrono::seconds(std::stoll(res->get_header_value("Retry-After")));
      }
      std::this_thread::sleep_for(wait);
      continue;
    }
    if (res->status >= 500) {
      fail_or_back_off("HTTP " + std::to_string(res->status));
      continue;
    }
    return {res->status, res->body};
  }
}

}  // namespace

std::vector<Transaction> HarvestClient::fetch_public_feed(std::size_t pages) {
  std::vector<Transaction> out;
  std::unordered_set<std::string> seen;
  std::chrono::milliseconds interval{0};
  for (std::size_t p = 0; p < pages; ++p) {
    if (p > 0) std::this_thread::sleep_for(config_.poll_interval.value_or(interval));
    const Reply reply = get_with_retries(impl_->client, "/feed", config_, *limiter_, stats_);
    if (reply.status != 200) throw HttpError("feed page " + std::to_string(p) + ": HTTP " + std::to_string(reply.status));
    FeedPage page;
    try {
      page = parse_page(reply.body);
    } catch (const MalformedPage& e) {
      throw MalformedPage("feed page " + std::to_string(p) + ": " + e.what());
    }
    interval = page.refresh_interval;
    for (auto& t : page.transactions) {
      if (seen.insert(t.id).second) out.push_back(std::move(t));
    }
  }
  return out;
}

std::vector<Transaction> HarvestClient::fetch_user_transactions(
    const std::string& user_id, const std::function<bool(std::size_t, const FeedPage&)>& on_page) {
  std::vector<Transaction> out;
  std::unordered_set<std::string> seen;
  std::optional<std::string> cursor;
  const std::string base = "/users/" + httplib::detail::encode_url(user_id) + "/transactions";
  for (std::size_t p = 0;; ++p) {
    const std::string path = cursor ? base + "?before_id=" + httplib::detail::encode_query_param(*cursor) : base;
    const Reply reply = get_with_retries(impl_->client, path, config_, *limiter_, stats_);
    if (reply.status == 404) throw UserNotFound("no such user '" + user_id + "'");
    if (reply.status != 200) {
      throw HttpError("user " + user_id + " page " + std::to_string(p) + ": HTTP " + std::to_string(reply.status));
    }
    FeedPage page;
    try {
      page = parse_page(reply.body);
    } catch (const MalformedPage& e) {
      throw MalformedPage("user " + user_id + " page " + std::to_string(p) + ": " + e.what());
    }
    if (on_page && !on_page(p, page)) throw Interrupted("crawl of '" + user_id + "' stopped after page " + std::to_string(p));
    for (auto& t : page.transactions) {
      if (seen.insert(t.id).second) out.push_back(std::move(t));
    }
    if (!page.next_before_id) break;
    cursor = page.next_before_id;
  }
  return out;
}

std::string HarvestClient::resolve_user_id(const std::string& username) {
  const Reply reply = get_with_retries(impl_->client, "/profile/" + httplib::detail::encode_url(username), config_,
                                       *limiter_, stats_);
  if (reply.status == 404) throw UnknownUsername("unknown username '" + username + "'");
  if (reply.status != 200) throw HttpError("profile " + username + ": HTTP " + std::to_string(reply.status));
  static const std::regex pattern(R"re("user_id"\s*:\s*"([^"]+)")re");
  std::smatch m;
  if (!std::regex_search(reply.body, m, pattern)) {
    throw PatternNotFound("profile page for '" + username + "' has no user_id variable");
  }
  return m[1];
}

json CrawlState::to_json() const {
  return json{{"seen", seen},
              {"completed", completed},
              {"pending", std::vector<std::string>(pending.begin(), pending.end())},
              {"checkpoint_at", checkpoint_at}};
}

CrawlState CrawlState::from_json(const json& j) {
  CrawlState s;
  try {
    s.seen = j.at("seen").get<std::set<std::string>>();
    s.completed = j.at("completed").get<std::set<std::string>>();
    const auto pending = j.at("pending").get<std::vector<std::string>>();
    s.pending.assign(pending.begin(), pending.end());
    if (auto it = j.find("checkpoint_at"); it != j.end()) s.checkpoint_at = it->get<std::string>();
  } catch (const json::exception& e) {
    throw Error("harvest", std::string("malformed checkpoint: ") + e.what());
  }
  for (const auto& id : s.pending) {
    if (s.completed.count(id) != 0) throw Error("harvest", "checkpoint lists '" + id + "' as both pending and completed");
  }
  return s;
}

void CrawlState::save(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint '" + tmp + "'");
    out << to_json().dump() << '\n';
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place: " + ec.message());
}

CrawlState CrawlState::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error("harvest", std::string("checkpoint is not JSON: ") + e.what());
  }
}

namespace {

// Drops a trailing partial line left by a kill mid-write, then returns the
// ids already on disk.
std::set<std::string> recover_output(const std::string& path) {
  std::set<std::string> ids;
  if (!fs::exists(path)) return ids;
  std::string content;
  {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    content = ss.str();
  }
  const auto last_newline = content.rfind('\n');
  const std::size_t keep = last_newline == std::string::npos ? 0 : last_newline + 1;
  if (keep != content.size()) fs::resize_file(path, keep);
  std::istringstream in(content.substr(0, keep));
  for (const auto& t : load_transactions(in).transactions) ids.insert(t.id);
  return ids;
}

}  // namespace

CrawlResult crawl_users(const std::string& endpoint, const std::vector<std::string>& user_ids,
                        const CrawlOptions& options) {
  CrawlResult result;
  CrawlState& state = result.state;
  const bool have_checkpoint = !options.checkpoint_path.empty() && fs::exists(options.checkpoint_path);
  if (options.resume && have_checkpoint) state = CrawlState::load(options.checkpoint_path);
  if (options.resume && !options.output_path.empty()) {
    // The output may be ahead of the checkpoint if the kill landed between
    // the two writes.
    auto on_disk = recover_output(options.output_path);
    state.seen.insert(on_disk.begin(), on_disk.end());
  }
  {
    std::set<std::string> queued(state.pending.begin(), state.pending.end());
    for (const auto& id : user_ids) {
      if (state.completed.count(id) == 0 && queued.insert(id).second) state.pending.push_back(id);
    }
  }

  std::ofstream out;
  if (!options.output_path.empty()) {
    out.open(options.output_path, options.resume ? std::ios::app : std::ios::trunc);
    if (!out) throw IoError("cannot open output '" + options.output_path + "'");
  }

  std::deque<std::string> todo(state.pending.begin(), state.pending.end());
  std::mutex mutex;
  std::size_t finished = 0;
  bool stopping = false;
  std::exception_ptr error;
  auto limiter = std::make_shared<TokenBucket>(options.client.rate, options.client.burst);

  auto worker = [&](HarvestClient& client) {
    for (;;) {
      std::string user;
      {
        std::lock_guard lock(mutex);
        const bool cancelled = options.cancel != nullptr && options.cancel->load();
        if (stopping || cancelled || (options.stop_after_users > 0 && finished >= options.stop_after_users)) {
          if (!todo.empty()) result.interrupted = true;
          return;
        }
        if (todo.empty()) return;
        user = std::move(todo.front());
        todo.pop_front();
      }
      std::vector<Transaction> txns;
      bool missing = false;
      try {
        txns = client.fetch_user_transactions(user);
      } catch (const UserNotFound&) {
        missing = true;
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
        stopping = true;
        return;
      }
      std::lock_guard lock(mutex);
      for (auto& t : txns) {
        if (!state.seen.insert(t.id).second) continue;
        if (out.is_open()) out << transaction_to_json(t).dump() << '\n';
        result.transactions.push_back(std::move(t));
      }
      if (out.is_open()) out.flush();
      if (missing) result.missing_users.push_back(user);
      state.completed.insert(user);
      state.pending.erase(std::find(state.pending.begin(), state.pending.end(), user));
      ++finished;
      if (!options.checkpoint_path.empty()) {
        state.checkpoint_at = now_iso();
        state.save(options.checkpoint_path);
      }
    }
  };

  const std::size_t n_workers = std::max<std::size_t>(1, std::min(options.workers, todo.size()));
  std::vector<HarvestClient> clients;
  for (std::size_t w = 0; w < n_workers; ++w) clients.emplace_back(endpoint, options.client, limiter);
  std::vector<std::thread> threads;
  for (auto& c : clients) threads.emplace_back(worker, std::ref(c));
  for (auto& t : threads) t.join();
  for (const auto& c : clients) {
    result.stats.requests += c.stats().requests;
    result.stats.retries += c.stats().retries;
    result.stats.rate_limited += c.stats().rate_limited;
  }
  if (error) std::rethrow_exception(error);
  if (!state.pending.empty()) result.interrupted = true;
  if (!options.checkpoint_path.empty()) {
    state.checkpoint_at = now_iso();
    state.save(options.checkpoint_path);
  }
  return result;
}

}  // namespace payattr
