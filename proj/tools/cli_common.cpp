#include "cli_common.hpp"

#include <charconv>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "payattr/error.hpp"
#include "payattr/random.hpp"

namespace payattr::cli {

using nlohmann::json;

const json& Context::config() {
  if (!config_) {
    config_ = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw IoError("cannot open config '" + config_path + "'");
      try {
        config_ = json::parse(in);
      } catch (const json::exception& e) {
        throw ConfigError("config '" + config_path + "' is not valid JSON: " + e.what());
      }
      if (!config_->is_object()) throw ConfigError("config must be a JSON object");
    }
  }
  return *config_;
}

json Context::section(const std::string& command) {
  const auto& c = config();
  auto it = c.find(command);
  return it != c.end() && it->is_object() ? *it : json::object();
}

const Lexicons& Context::lexicons() {
  if (!lexicons_) lexicons_ = load_lexicons(data_directory());
  return *lexicons_;
}

const NameCorpus& Context::names(const std::optional<std::string>& path) {
  if (!names_) {
    if (path) {
      names_ = NameCorpus::load_tsv(*path);
    } else if (const auto bundled = std::filesystem::path(data_directory()) / "names_us.tsv";
               std::filesystem::exists(bundled)) {
      names_ = NameCorpus::load_tsv(bundled.string());
    } else {
      names_ = default_name_corpus();
    }
  }
  return *names_;
}

Input::Input(const std::string& path) {
  if (path == "-") {
    in_ = &std::cin;
    return;
  }
  file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*file_) throw IoError("cannot open '" + path + "'");
  in_ = file_.get();
}

Output::Output(const std::string& path) : path_(path) {
  if (path == "-") {
    out_ = &std::cout;
    return;
  }
  file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
  if (!*file_) throw IoError("cannot write '" + path + "'");
  out_ = file_.get();
}

void Output::close() {
  out_->flush();
  if (!*out_) throw IoError("write failed for '" + path_ + "'");
  if (file_) file_->close();
}

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

Corpus read_corpus(const std::string& path, bool strict, std::size_t min_posts) {
  Input in(path);
  LoadResult loaded = load_transactions(in.stream(), LoadOptions{strict});
  if (loaded.skipped_malformed > 0) {
    std::cerr << "warning: skipped " << loaded.skipped_malformed << " malformed line(s) in " << path << '\n';
  }
  Corpus corpus = group_by_user(loaded.transactions);
  return min_posts > 1 ? filter_min_posts(corpus, min_posts) : corpus;
}

void DatasetFlags::add_to(CLI::App& app) {
  app.add_option("--in", corpus_path, "Transactions JSONL ('-' for stdin)")->required();
  app.add_option("--task", task, "gender or politics");
  app.add_option("--labels", labels_path, "Political label CSV (user_id,label)");
  app.add_option("--names", names_path, "Name corpus TSV (name, region, male_count, female_count)");
  app.add_option("--region", region, "Name corpus region, or * to pool all");
  app.add_option("--min-posts", min_posts, "Drop users with fewer posts");
  app.add_option("--balance", balance, "Downsample the majority class (true/false)");
  app.add_option("--actor-share", actor_share, "Add the pct_as_actor column (true/false)");
  app.add_option("--seed", seed, "Root seed");
}

DatasetOptions DatasetFlags::resolve(Context& ctx, const std::string& command) const {
  DatasetOptions o;
  o.corpus_path = corpus_path;
  o.task = parse_task(ctx.setting(task, command, "task", std::string("gender")));
  o.labels_path = labels_path;
  if (!o.labels_path) {
    auto p = ctx.setting<std::string>(std::nullopt, command, "labels", "");
    if (!p.empty()) o.labels_path = p;
  }
  o.names_path = names_path;
  if (!o.names_path) {
    auto p = ctx.setting<std::string>(std::nullopt, command, "names", "");
    if (!p.empty()) o.names_path = p;
  }
  o.region = ctx.setting(region, command, "region", std::string("US"));
  o.min_posts = ctx.setting(min_posts, command, "min_posts", std::size_t{5});
  o.balance = ctx.setting(balance, command, "balance", true);
  o.actor_share = ctx.setting(actor_share, command, "actor_share", false);
  o.seed = ctx.setting(seed, command, "seed", std::uint64_t{0});
  return o;
}

PreparedData prepare_dataset(Context& ctx, const DatasetOptions& options) {
  const Corpus corpus = read_corpus(options.corpus_path, false, options.min_posts);
  std::map<std::string, ClassLabel> political;
  LabelOptions label_options;
  label_options.region = options.region;
  if (options.task == Task::politics) {
    if (!options.labels_path) throw MissingLabelFile("politics task requires --labels");
    political = load_political_labels(*options.labels_path);
    label_options.political_labels = &political;
  } else {
    label_options.names = &ctx.names(options.names_path);
  }
  PreparedData out;
  out.labeled = build_labeled_dataset(corpus, options.task, label_options);
  if (options.balance) out.labeled = balance_classes(out.labeled, derive_seed(options.seed, "balance"));
  out.dataset = build_dataset(corpus, out.labeled, FeatureOptions{options.actor_share}, ctx.lexicons());
  return out;
}

}  // namespace payattr::cli
