#pragma once

#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "payattr/corpus.hpp"
#include "payattr/eval.hpp"
#include "payattr/label.hpp"
#include "payattr/lexicon.hpp"

namespace CLI {
class App;
}

namespace payattr::cli {

// Settings resolve as: command-line flag, then config[command][key], then
// config[key], then the built-in default.
class Context {
 public:
  std::string config_path;

  const nlohmann::json& config();
  nlohmann::json section(const std::string& command);

  template <typename T>
  T setting(const std::optional<T>& flag, const std::string& command, const std::string& key, T fallback) {
    if (flag) return *flag;
    const auto& c = config();
    if (auto it = c.find(command); it != c.end() && it->is_object() && it->contains(key)) return (*it)[key].get<T>();
    if (auto it = c.find(key); it != c.end()) return it->get<T>();
    return fallback;
  }

  const Lexicons& lexicons();
  const NameCorpus& names(const std::optional<std::string>& path);

 private:
  std::optional<nlohmann::json> config_;
  std::optional<Lexicons> lexicons_;
  std::optional<NameCorpus> names_;
};

// "-" means stdin / stdout.
class Input {
 public:
  explicit Input(const std::string& path);
  std::istream& stream() { return *in_; }

 private:
  std::unique_ptr<std::ifstream> file_;
  std::istream* in_;
};

class Output {
 public:
  explicit Output(const std::string& path);
  std::ostream& stream() { return *out_; }
  void close();

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

std::string format_double(double v);

Corpus read_corpus(const std::string& path, bool strict, std::size_t min_posts);

struct DatasetOptions {
  std::string corpus_path;
  Task task = Task::gender;
  std::optional<std::string> labels_path;
  std::optional<std::string> names_path;
  std::string region = "US";
  std::size_t min_posts = 5;
  bool balance = true;
  bool actor_share = false;
  std::uint64_t seed = 0;
};

struct PreparedData {
  std::vector<LabeledUser> labeled;
  Dataset dataset;
};

PreparedData prepare_dataset(Context& ctx, const DatasetOptions& options);

/// Adds the shared dataset flags to a subcommand. Values are resolved
/// against the config file by resolve_dataset_options.
struct DatasetFlags {
  std::string corpus_path;
  std::optional<std::string> task;
  std::optional<std::string> labels_path;
  std::optional<std::string> names_path;
  std::optional<std::string> region;
  std::optional<std::size_t> min_posts;
  std::optional<bool> balance;
  std::optional<bool> actor_share;
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App& app);
  DatasetOptions resolve(Context& ctx, const std::string& command) const;
};

void register_data_commands(CLI::App& app, Context& ctx);
void register_model_commands(CLI::App& app, Context& ctx);
void register_harvest_commands(CLI::App& app, Context& ctx);

}  // namespace payattr::cli
