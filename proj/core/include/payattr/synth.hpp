#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "payattr/corpus.hpp"
#include "payattr/label.hpp"

namespace payattr {

/// Planted-signal corpus generator. class_a users get female first names
/// and the democrat label, class_b users male names and republican, so one
/// corpus serves both tasks.
struct SynthSpec {
  std::size_t users_per_class = 1000;
  std::size_t min_posts = 5;
  std::size_t max_posts = 12;
  std::vector<std::string> signal_a{"brunch", "yoga", "wine", "candle", "barre",
                                    "latte", "nail", "spa", "boutique", "salon"};
  std::vector<std::string> signal_b{"beer", "golf", "poker", "bbq", "steak",
                                    "fantasy", "gym", "hockey", "bourbon", "tailgate"};
  double p_signal = 0.6;  // per post, own-class token
  double p_noise = 0.1;   // per post, other-class token
  std::vector<std::string> background;  // empty: built-in pool
  double zipf_exponent = 1.1;
  double emoji_fraction = 0.45;  // notes that are a single emoji
  std::uint64_t seed = 0;

  /// Throws InvalidSpec.
  void validate() const;

  nlohmann::json to_json() const;
  static SynthSpec from_json(const nlohmann::json& j, const SynthSpec& base);
  static SynthSpec from_json(const nlohmann::json& j);
};

struct SynthCorpus {
  std::vector<Transaction> transactions;  // chronological
  std::vector<std::pair<std::string, ClassLabel>> labels;  // user id order
};

SynthCorpus generate_synthetic_corpus(const SynthSpec& spec);

/// "user_id,label" with democrat/republican values.
void write_labels_csv(std::ostream& out, const SynthCorpus& corpus);

}  // namespace payattr
