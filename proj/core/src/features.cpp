#include "payattr/features.hpp"


#include "payattr/error.hpp"
#include "payattr/unicode.hpp"

namespace payattr {

namespace u = unicode;

std::string_view to_string(ContentFeature f) {
  static constexpr std::array<std::string_view, kContentFeatureCount> names{
      "emoji",    "emoticon", "venmo_emoji", "repeated_chars", "excitement", "single_exclaim",
      "ellipses", "shouting", "laughing",    "omg",            "curse",
  };
  return names[static_cast<std::size_t>(f)];
}

namespace {

bool has_triple_repeat(std::string_view surface) {
  const std::u32string cps = u::decode_utf8(surface);
  std::size_t run = 1;
  for (std::size_t i = 1; i < cps.size(); ++i) {
    run = u::ascii_lower(cps[i]) == u::ascii_lower(cps[i - 1]) ? run + 1 : 1;
    if (run >= 3) return true;
  }
  return false;
}

// Maximal runs of `c` with length >= min_len.
int count_runs(std::u32string_view text, char32_t c, std::size_t min_len) {
  int runs = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != c) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && text[j] == c) ++j;
    if (j - i >= min_len) ++runs;
    i = j;
  }
  return runs;
}

bool is_shouting(std::u32string_view text) {
  std::size_t letters = 0;
  for (char32_t c : text) {
    if (!u::is_ascii_alpha(c)) continue;
    if (c >= U'a' && c <= U'z') return false;
    ++letters;
  }
  return letters >= 2;
}

bool is_single_exclaim(std::u32string_view text) {
  std::size_t end = text.size();
  while (end > 0 && u::is_whitespace(text[end - 1])) --end;
  if (end == 0 || text[end - 1] != U'!') return false;
  std::size_t bangs = 0;
  for (char32_t c : text) bangs += c == U'!';
  return bangs == 1;
}

// (ha|he){2,} with an optional trailing 'h' ("hahah").
bool is_haha(std::string_view w) {
  if (w.ends_with('h') && w.size() % 2 == 1) w.remove_suffix(1);
  if (w.size() < 4 || w.size() % 2 != 0) return false;
  for (std::size_t i = 0; i < w.size(); i += 2) {
    if (w[i] != 'h' || (w[i + 1] != 'a' && w[i + 1] != 'e')) return false;
  }
  return true;
}

bool is_laugh(const std::string& lower, const Lexicons& lexicons) {
  return lexicons.laughing.contains(lower) || is_haha(lower);
}

// o+m+g+
bool is_omg(std::string_view w) {
  std::size_t i = 0;
  for (char letter : {'o', 'm', 'g'}) {
    const std::size_t start = i;
    while (i < w.size() && w[i] == letter) ++i;
    if (i == start) return false;
  }
  return i == w.size();
}

}  // namespace

ContentCounts detect_content_features(const TokenizedPost& post, const Lexicons& lexicons) {
  ContentCounts c;
  for (const Token& t : post.tokens) {
    switch (t.kind) {
      case TokenKind::emoji: ++c[ContentFeature::emoji]; break;
      case TokenKind::emoticon: ++c[ContentFeature::emoticon]; break;
      case TokenKind::shortcode: ++c[ContentFeature::venmo_emoji]; break;
      case TokenKind::word: {
        const std::string lower = u::ascii_lower(t.surface);
        if (has_triple_repeat(t.surface)) ++c[ContentFeature::repeated_chars];
        if (is_laugh(lower, lexicons)) ++c[ContentFeature::laughing];
        if (is_omg(lower)) ++c[ContentFeature::omg];
        if (lexicons.curse_words.contains(lower)) ++c[ContentFeature::curse];
        break;
      }
      default: break;
    }
  }
  const std::u32string raw = u::decode_utf8(post.raw);
  c[ContentFeature::excitement] = count_runs(raw, U'!', 2);
  c[ContentFeature::single_exclaim] = is_single_exclaim(raw) ? 1 : 0;
  c[ContentFeature::ellipses] = count_runs(raw, U'…', 1) + count_runs(raw, U'.', 3);
  c[ContentFeature::shouting] = is_shouting(raw) ? 1 : 0;
  return c;
}

std::vector<double> EngineeredFeatures::values() const {
  std::vector<double> out;
  out.reserve(2 * kContentFeatureCount + 5);
  for (std::size_t i = 0; i < kContentFeatureCount; ++i) {
    out.push_back(avg_per_post[i]);
    out.push_back(pct_posts_containing[i]);
  }
  out.push_back(pct_charge);
  out.push_back(avg_likes);
  out.push_back(avg_len_chars);
  out.push_back(avg_len_tokens);
  if (has_actor_share) out.push_back(pct_as_actor);
  return out;
}

std::vector<std::string> engineered_column_names(const FeatureOptions& options) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < kContentFeatureCount; ++i) {
    const std::string base(to_string(static_cast<ContentFeature>(i)));
    names.push_back(base + "_avg");
    names.push_back(base + "_pct");
  }
  names.insert(names.end(), {"pct_charge", "avg_likes", "avg_len_chars", "avg_len_tokens"});
  if (options.include_actor_share) names.emplace_back("pct_as_actor");
  return names;
}

EngineeredFeatures aggregate_user_features(const UserProfile& profile, const std::vector<TokenizedPost>& posts,
                                           const FeatureOptions& options, const Lexicons& lexicons) {
  if (profile.posts.empty()) throw EmptyProfile("user '" + profile.user_id + "' has no posts");
  if (posts.size() != profile.posts.size()) {
    throw EmptyProfile("user '" + profile.user_id + "': tokenized post count does not match profile");
  }
  EngineeredFeatures f;
  f.has_actor_share = options.include_actor_share;
  const auto n = static_cast<double>(posts.size());
  std::array<double, kContentFeatureCount> sums{};
  std::array<double, kContentFeatureCount> containing{};
  double charges = 0, likes = 0, chars = 0, tokens = 0, actor = 0;
  for (std::size_t p = 0; p < posts.size(); ++p) {
    const ContentCounts counts = detect_content_features(posts[p], lexicons);
    for (std::size_t i = 0; i < kContentFeatureCount; ++i) {
      sums[i] += counts.counts[i];
      containing[i] += counts.counts[i] > 0 ? 1.0 : 0.0;
    }
    const Transaction& t = *profile.posts[p].transaction;
    charges += t.kind == TransactionKind::charge ? 1.0 : 0.0;
    likes += static_cast<double>(t.likes_count);
    chars += static_cast<double>(u::scalar_length(t.note));
    tokens += static_cast<double>(posts[p].tokens.size());
    actor += profile.posts[p].role == Role::actor ? 1.0 : 0.0;
  }
  for (std::size_t i = 0; i < kContentFeatureCount; ++i) {
    f.avg_per_post[i] = sums[i] / n;
    f.pct_posts_containing[i] = containing[i] / n;
  }
  f.pct_charge = charges / n;
  f.avg_likes = likes / n;
  f.avg_len_chars = chars / n;
  f.avg_len_tokens = tokens / n;
  f.pct_as_actor = actor / n;
  return f;
}

}  // namespace payattr
