#include "payattr/mock_server.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <mutex>
#include <thread>
#include <unordered_map>

#include <httplib.h>

#include "payattr/error.hpp"
#include "payattr/rate_limiter.hpp"

namespace payattr {

using nlohmann::json;

std::string username_slug(std::string_view display_name) {
  std::string out;
  bool dash = false;
  for (char c : display_name) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) && uc < 0x80) {
      if (dash && !out.empty()) out += '-';
      dash = false;
      out += static_cast<char>(std::tolower(uc));
    } else {
      dash = true;
    }
  }
  return out;
}

namespace {

bool newer(const Transaction* a, const Transaction* b) {
  if (a->created_at != b->created_at) return a->created_at > b->created_at;
  return a->id > b->id;
}

json page_json(const std::vector<const Transaction*>& items) {
  json data = json::array();
  for (const Transaction* t : items) data.push_back(transaction_to_json(*t));
  return data;
}

}  // namespace

struct MockServer::Impl {
  MockServerConfig config;
  std::vector<Transaction> transactions;
  std::vector<const Transaction*> feed;  // newest first
  std::unordered_map<std::string, std::vector<const Transaction*>> by_user;
  std::unordered_map<std::string, std::string> usernames;
  TokenBucket limiter;
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::chrono::steady_clock::time_point started;

  mutable std::mutex stats_mutex;
  MockServerStats stats;

  Impl(std::vector<Transaction> txns, MockServerConfig cfg)
      : config(std::move(cfg)),
        transactions(std::move(txns)),
        limiter(config.rate_limit, config.burst > 0 ? config.burst : std::max(1.0, config.rate_limit)) {
    if (config.page_size == 0) throw std::invalid_argument("mock server page_size must be positive");
    for (const Transaction& t : transactions) {
      feed.push_back(&t);
      by_user[t.actor_id].push_back(&t);
      by_user[t.target_id].push_back(&t);
    }
    std::sort(feed.begin(), feed.end(), newer);
    for (auto& [id, list] : by_user) std::sort(list.begin(), list.end(), newer);
    for (const auto& id : config.extra_users) by_user.try_emplace(id);

    // Derived usernames go to the earliest-listed owner; explicit ones win.
    std::vector<const Transaction*> chrono(feed.rbegin(), feed.rend());
    for (const Transaction* t : chrono) {
      usernames.try_emplace(username_slug(t->actor_name), t->actor_id);
      usernames.try_emplace(username_slug(t->target_name), t->target_id);
    }
    for (const auto& [name, id] : config.usernames) usernames[name] = id;
    install_routes();
  }

  // Returns false after answering 429.
  bool admit(httplib::Response& res) {
    std::lock_guard lock(stats_mutex);
    ++stats.requests;
    if (limiter.try_acquire()) return true;
    ++stats.rate_limited;
    const auto wait = std::chrono::duration<double>(limiter.wait_time()).count();
    res.status = 429;
    res.set_header("Retry-After", std::to_string(static_cast<long>(std::ceil(wait))));
    res.set_header("Retry-After-Ms", std::to_string(static_cast<long>(std::ceil(wait * 1000.0))));
    res.set_content(R"({"error":"rate limited"})", "application/json");
    return false;
  }

  void count(std::size_t MockServerStats::*field) {
    std::lock_guard lock(stats_mutex);
    ++(stats.*field);
  }

  void install_routes() {
    server.Get("/feed", [this](const httplib::Request&, httplib::Response& res) {
      if (!admit(res)) return;
      std::size_t window = 0;
      {
        std::lock_guard lock(stats_mutex);
        if (config.refresh_interval.count() > 0) {
          window = static_cast<std::size_t>((std::chrono::steady_clock::now() - started) / config.refresh_interval);
        } else {
          window = stats.feed_requests;
        }
        ++stats.feed_requests;
      }
      std::vector<const Transaction*> items;
      const std::size_t n = feed.size();
      for (std::size_t i = 0; i < std::min(config.page_size, n); ++i) {
        items.push_back(feed[(window * config.page_size + i) % n]);
      }
      json body{{"data", page_json(items)},
                {"page_size", config.page_size},
                {"refresh_interval_ms", config.refresh_interval.count()}};
      res.set_content(body.dump(), "application/json");
    });

    server.Get(R"(/users/([^/]+)/transactions)", [this](const httplib::Request& req, httplib::Response& res) {
      if (!admit(res)) return;
      count(&MockServerStats::user_requests);
      const std::string user = req.matches[1];
      auto it = by_user.find(user);
      if (it == by_user.end()) {
        res.status = 404;
        res.set_content(R"({"error":"user not found"})", "application/json");
        return;
      }
      const auto& list = it->second;
      std::size_t start = 0;
      if (req.has_param("before_id")) {
        const std::string cursor = req.get_param_value("before_id");
        auto pos = std::find_if(list.begin(), list.end(), [&](const Transaction* t) { return t->id == cursor; });
        if (pos == list.end()) {
          res.status = 400;
          res.set_content(R"({"error":"unknown before_id"})", "application/json");
          return;
        }
        start = static_cast<std::size_t>(pos - list.begin()) + 1;
      }
      const std::size_t end = std::min(list.size(), start + config.page_size);
      std::vector<const Transaction*> items(list.begin() + static_cast<std::ptrdiff_t>(start),
                                            list.begin() + static_cast<std::ptrdiff_t>(end));
      json body{{"data", page_json(items)}};
      if (end < list.size()) body["next_before_id"] = list[end - 1]->id;
      res.set_content(body.dump(), "application/json");
    });

    server.Get(R"(/profile/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      if (!admit(res)) return;
      count(&MockServerStats::profile_requests);
      const std::string name = req.matches[1];
      auto it = usernames.find(name);
      if (it == usernames.end()) {
        res.status = 404;
        res.set_content("<html><body>Sorry, the page you requested does not exist!</body></html>", "text/html");
        return;
      }
      std::string html = "<html><head><title>" + name + "</title></head><body>\n<script>\n";
      if (config.malformed_profiles.count(name) == 0) {
        html += "  window.__INITIAL_STATE__ = {\"profile\": {\"username\": \"" + name + "\", \"user_id\": \"" +
                it->second + "\"}};\n";
      } else {
        html += "  window.__INITIAL_STATE__ = {\"profile\": {\"username\": \"" + name + "\"}};\n";
      }
      html += "</script>\n</body></html>\n";
      res.set_content(html, "text/html");
    });
  }
};

MockServer::MockServer(std::vector<Transaction> transactions, MockServerConfig config)
    : impl_(std::make_unique<Impl>(std::move(transactions), std::move(config))) {}

MockServer::~MockServer() { stop(); }

void MockServer::start() {
  if (impl_->thread.joinable()) return;
  const auto& c = impl_->config;
  // httplib's default options include SO_REUSEPORT, which would let a second
  // server silently share a busy port.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  int port = c.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(c.host);
  } else if (!impl_->server.bind_to_port(c.host, port)) {
    port = -1;
  }
  if (port <= 0) throw BindError("cannot bind " + c.host + ":" + std::to_string(c.port));
  impl_->port = port;
  impl_->started = std::chrono::steady_clock::now();
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void MockServer::stop() {
  if (!impl_ || !impl_->thread.joinable()) return;
  impl_->server.stop();
  impl_->thread.join();
}

int MockServer::port() const { return impl_->port; }

std::string MockServer::endpoint() const { return "http://" + impl_->config.host + ":" + std::to_string(impl_->port); }

MockServerStats MockServer::stats() const {
  std::lock_guard lock(impl_->stats_mutex);
  return impl_->stats;
}

const MockServerConfig& MockServer::config() const { return impl_->config; }

}  // namespace payattr
