#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "cli_common.hpp"
#include "payattr/error.hpp"
#include "payattr/harvest.hpp"
#include "payattr/mock_server.hpp"

namespace payattr::cli {

using nlohmann::json;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

void install_signal_handlers() {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
}

struct ClientFlags {
  std::optional<double> rate;
  std::optional<double> burst;
  std::optional<std::size_t> max_retries;
  std::optional<std::int64_t> poll_interval_ms;

  void add_to(CLI::App& app) {
    app.add_option("--rate", rate, "Client requests per second");
    app.add_option("--burst", burst, "Client token bucket capacity");
    app.add_option("--max-retries", max_retries, "Retry budget for transport errors");
    app.add_option("--poll-interval-ms", poll_interval_ms, "Override the feed refresh wait");
  }

  ClientConfig resolve(Context& ctx) const {
    ClientConfig c;
    c.rate = ctx.setting(rate, "harvest", "rate", c.rate);
    c.burst = ctx.setting(burst, "harvest", "burst", c.burst);
    c.max_retries = ctx.setting(max_retries, "harvest", "max_retries", c.max_retries);
    const auto poll = ctx.setting(poll_interval_ms, "harvest", "poll_interval_ms", std::int64_t{-1});
    if (poll >= 0) c.poll_interval = std::chrono::milliseconds(poll);
    return c;
  }
};

struct FeedFlags {
  std::string endpoint;
  std::size_t pages = 1;
  std::string out = "-";
  ClientFlags client;
};

void run_feed(Context& ctx, const FeedFlags& f) {
  HarvestClient client(f.endpoint, f.client.resolve(ctx));
  const auto txns = client.fetch_public_feed(f.pages);
  Output out(f.out);
  write_transactions(out.stream(), txns);
  out.close();
  std::cerr << "collected " << txns.size() << " unique transactions in " << client.stats().requests
            << " requests\n";
}

struct UsersFlags {
  std::string endpoint;
  std::string ids;
  std::optional<std::size_t> workers;
  std::string checkpoint;
  std::string out;
  bool resume = false;
  ClientFlags client;
};

void run_users(Context& ctx, const UsersFlags& f) {
  std::vector<std::string> ids;
  {
    Input in(f.ids);
    std::string line;
    while (std::getline(in.stream(), line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (!line.empty()) ids.push_back(line);
    }
  }
  CrawlOptions options;
  options.workers = ctx.setting(f.workers, "harvest", "workers", std::size_t{8});
  options.client = f.client.resolve(ctx);
  options.checkpoint_path = f.checkpoint;
  options.output_path = f.out;
  options.resume = f.resume;
  options.cancel = &g_stop;
  install_signal_handlers();
  const CrawlResult r = crawl_users(f.endpoint, ids, options);
  std::cout << json{{"written", r.transactions.size()},
                    {"seen", r.state.seen.size()},
                    {"completed", r.state.completed.size()},
                    {"pending", r.state.pending.size()},
                    {"missing_users", r.missing_users},
                    {"interrupted", r.interrupted},
                    {"requests", r.stats.requests},
                    {"rate_limited", r.stats.rate_limited}}
                   .dump()
            << '\n';
  if (r.interrupted) throw Interrupted("crawl stopped early; rerun with --resume to continue");
}

struct ResolveFlags {
  std::string endpoint;
  std::string username;
  ClientFlags client;
};

void run_resolve(Context& ctx, const ResolveFlags& f) {
  HarvestClient client(f.endpoint, f.client.resolve(ctx));
  std::cout << client.resolve_user_id(f.username) << '\n';
}

struct ServeFlags {
  std::string in;
  std::string host = "127.0.0.1";
  std::optional<int> port;
  std::optional<std::size_t> page_size;
  std::optional<std::int64_t> refresh_ms;
  std::optional<double> rate_limit;
  std::optional<double> burst;
  std::string port_file;
};

void run_serve(Context& ctx, const ServeFlags& f) {
  LoadResult loaded;
  {
    Input in(f.in);
    loaded = load_transactions(in.stream());
  }
  MockServerConfig cfg;
  cfg.host = f.host;
  cfg.port = ctx.setting(f.port, "serve-mock", "port", 0);
  cfg.page_size = ctx.setting(f.page_size, "serve-mock", "page_size", cfg.page_size);
  cfg.refresh_interval =
      std::chrono::milliseconds(ctx.setting(f.refresh_ms, "serve-mock", "refresh_ms", std::int64_t{15 * 60 * 1000}));
  cfg.rate_limit = ctx.setting(f.rate_limit, "serve-mock", "rate_limit", 0.0);
  cfg.burst = ctx.setting(f.burst, "serve-mock", "burst", 0.0);
  const auto section = ctx.section("serve-mock");
  if (section.contains("usernames")) cfg.usernames = section["usernames"].get<std::map<std::string, std::string>>();
  const std::size_t n = loaded.transactions.size();
  MockServer server(std::move(loaded.transactions), cfg);
  install_signal_handlers();
  server.start();
  if (!f.port_file.empty()) {
    Output pf(f.port_file);
    pf.stream() << server.port() << '\n';
    pf.close();
  }
  std::cout << "serving " << n << " transactions at " << server.endpoint() << std::endl;
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  const auto s = server.stats();
  std::cerr << "requests=" << s.requests << " rate_limited=" << s.rate_limited << '\n';
}

}  // namespace

void register_harvest_commands(CLI::App& app, Context& ctx) {
  auto* harvest = app.add_subcommand("harvest", "Collect transactions from a feed API");
  harvest->require_subcommand(1);
  {
    auto f = std::make_shared<FeedFlags>();
    auto* sub = harvest->add_subcommand("feed", "Poll the public feed");
    sub->add_option("--endpoint", f->endpoint, "Base URL, e.g. http://127.0.0.1:8080")->required();
    sub->add_option("--pages", f->pages, "Number of polls");
    sub->add_option("--out", f->out);
    f->client.add_to(*sub);
    sub->callback([f, &ctx] { run_feed(ctx, *f); });
  }
  {
    auto f = std::make_shared<UsersFlags>();
    auto* sub = harvest->add_subcommand("users", "Crawl every transaction of the listed users");
    sub->add_option("--endpoint", f->endpoint)->required();
    sub->add_option("--ids", f->ids, "File with one user id per line")->required();
    sub->add_option("--workers", f->workers);
    sub->add_option("--checkpoint", f->checkpoint, "Checkpoint JSON, rewritten after each user");
    sub->add_option("--out", f->out, "Output JSONL")->required();
    sub->add_flag("--resume", f->resume, "Continue from --checkpoint and --out");
    f->client.add_to(*sub);
    sub->callback([f, &ctx] { run_users(ctx, *f); });
  }
  {
    auto f = std::make_shared<ResolveFlags>();
    auto* sub = harvest->add_subcommand("resolve", "Look up a user id from a profile page");
    sub->add_option("--endpoint", f->endpoint)->required();
    sub->add_option("--username", f->username)->required();
    f->client.add_to(*sub);
    sub->callback([f, &ctx] { run_resolve(ctx, *f); });
  }
  {
    auto f = std::make_shared<ServeFlags>();
    auto* sub = app.add_subcommand("serve-mock", "Serve a corpus through the mock feed API until interrupted");
    sub->add_option("--in", f->in)->required();
    sub->add_option("--host", f->host);
    sub->add_option("--port", f->port, "0 picks a free port");
    sub->add_option("--page-size", f->page_size);
    sub->add_option("--refresh-ms", f->refresh_ms, "Feed refresh interval; 0 advances every request");
    sub->add_option("--rate-limit", f->rate_limit, "Requests per second; 0 disables");
    sub->add_option("--burst", f->burst);
    sub->add_option("--port-file", f->port_file, "Write the bound port here");
    sub->callback([f, &ctx] { run_serve(ctx, *f); });
  }
}

}  // namespace payattr::cli
