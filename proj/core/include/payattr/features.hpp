#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "payattr/corpus.hpp"
#include "payattr/lexicon.hpp"
#include "payattr/tokenize.hpp"

namespace payattr {

enum class ContentFeature : std::size_t {
  emoji,
  emoticon,
  venmo_emoji,
  repeated_chars,
  excitement,
  single_exclaim,
  ellipses,
  shouting,
  laughing,
  omg,
  curse,
};

inline constexpr std::size_t kContentFeatureCount = 11;

std::string_view to_string(ContentFeature f);

/// Per-post occurrence counts of the socio-linguistic features.
struct ContentCounts {
  std::array<int, kContentFeatureCount> counts{};

  int& operator[](ContentFeature f) { return counts[static_cast<std::size_t>(f)]; }
  int operator[](ContentFeature f) const { return counts[static_cast<std::size_t>(f)]; }
  bool operator==(const ContentCounts&) const = default;
};

/// Punctuation features (excitement, single_exclaim, ellipses, shouting) are
/// read off the raw note; lexical features off the tokens.
ContentCounts detect_content_features(const TokenizedPost& post, const Lexicons& lexicons = default_lexicons());

struct FeatureOptions {
  bool include_actor_share = false;
};

/// Per-user aggregate of content and structural features.
struct EngineeredFeatures {
  std::array<double, kContentFeatureCount> avg_per_post{};
  std::array<double, kContentFeatureCount> pct_posts_containing{};
  double pct_charge = 0.0;
  double avg_likes = 0.0;
  double avg_len_chars = 0.0;
  double avg_len_tokens = 0.0;
  double pct_as_actor = 0.0;
  bool has_actor_share = false;

  /// Flattened in column order (see engineered_column_names).
  std::vector<double> values() const;
};

/// Stable column order: "<feature>_avg", "<feature>_pct" for each content
/// feature, then pct_charge, avg_likes, avg_len_chars, avg_len_tokens and,
/// when enabled, pct_as_actor.
std::vector<std::string> engineered_column_names(const FeatureOptions& options = {});

/// `posts[i]` must be the tokenization of `profile.posts[i]`. Throws
/// EmptyProfile when the profile has no posts.
EngineeredFeatures aggregate_user_features(const UserProfile& profile, const std::vector<TokenizedPost>& posts,
                                           const FeatureOptions& options = {},
                                           const Lexicons& lexicons = default_lexicons());

}  // namespace payattr
