#include "payattr/tokenize.hpp"

#include <stdexcept>

#include "payattr/unicode.hpp"

namespace payattr {

namespace u = unicode;

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::word: return "word";
    case TokenKind::emoji: return "emoji";
    case TokenKind::shortcode: return "shortcode";
    case TokenKind::emoticon: return "emoticon";
    case TokenKind::number: return "number";
    case TokenKind::punct: return "punct";
  }
  return "punct";
}

namespace {

constexpr char32_t kKeycap = 0x20E3;
constexpr char32_t kRightQuote = 0x2019;

bool is_shortcode_char(char32_t c) {
  return (c >= U'a' && c <= U'z') || u::is_ascii_digit(c) || c == U'_';
}

bool is_alnum(char32_t c) { return u::is_word_char(c) || u::is_ascii_digit(c); }

bool is_keycap_base(char32_t c) { return u::is_ascii_digit(c) || c == U'#' || c == U'*'; }

class Segmenter {
 public:
  Segmenter(std::u32string_view text, const Lexicons& lexicons) : text_(text), lexicons_(lexicons) {}

  std::vector<Token> run() {
    while (pos_ < text_.size()) {
      const char32_t c = text_[pos_];
      if (u::is_whitespace(c)) {
        ++pos_;
      } else if (std::size_t len = match_shortcode(); len > 0) {
        emit(len, TokenKind::shortcode);
      } else if (std::size_t len = match_emoticon(); len > 0) {
        emit(len, TokenKind::emoticon);
      } else if (std::size_t len = match_emoji(); len > 0) {
        emit(len, TokenKind::emoji);
      } else if (is_alnum(c)) {
        word_or_number();
      } else {
        std::size_t len = 1;
        while (pos_ + len < text_.size() && text_[pos_ + len] == c) ++len;
        emit(len, TokenKind::punct);
      }
    }
    return std::move(tokens_);
  }

 private:
  char32_t at(std::size_t i) const { return i < text_.size() ? text_[i] : char32_t{0}; }

  void emit(std::size_t len, TokenKind kind) {
    Token t;
    t.surface = u::encode_utf8(text_.substr(pos_, len));
    t.kind = kind;
    tokens_.push_back(lemmatize(std::move(t), lexicons_));
    pos_ += len;
  }

  std::size_t match_shortcode() const {
    if (text_[pos_] != U':') return 0;
    std::size_t j = pos_ + 1;
    while (j < text_.size() && is_shortcode_char(text_[j])) ++j;
    if (j == pos_ + 1 || at(j) != U':') return 0;
    return j - pos_ + 1;
  }

  std::size_t match_emoticon() const {
    for (const auto& e : lexicons_.emoticons) {
      const std::size_t n = e.size();  // emoticons are ASCII
      if (n == 0 || pos_ + n > text_.size()) continue;
      bool same = true;
      for (std::size_t k = 0; k < n && same; ++k) {
        same = text_[pos_ + k] == static_cast<unsigned char>(e[k]);
      }
      if (!same) continue;
      // "xD" inside "xDD" or ":P" inside ":Pizza" is not an emoticon.
      const bool alnum_start = is_alnum(static_cast<unsigned char>(e.front()));
      const bool alnum_end = is_alnum(static_cast<unsigned char>(e.back()));
      if (alnum_start && pos_ > 0 && is_alnum(text_[pos_ - 1])) continue;
      if (alnum_end && is_alnum(at(pos_ + n))) continue;
      return n;
    }
    return 0;
  }

  std::size_t match_emoji() const {
    std::size_t j = pos_;
    const char32_t c = text_[j];
    if (is_keycap_base(c)) {
      std::size_t k = j + 1;
      if (u::is_variation_selector(at(k))) ++k;
      return at(k) == kKeycap ? k + 1 - pos_ : 0;
    }
    if (u::is_regional_indicator(c)) {
      return u::is_regional_indicator(at(j + 1)) ? 2 : 1;
    }
    if (!u::is_extended_pictographic(c) && !u::is_skin_tone_modifier(c)) return 0;
    ++j;
    for (;;) {
      const char32_t n = at(j);
      if (u::is_variation_selector(n) || u::is_skin_tone_modifier(n) || u::is_emoji_tag(n) ||
          n == kKeycap) {
        ++j;
      } else if (n == u::kZeroWidthJoiner && u::is_extended_pictographic(at(j + 1))) {
        j += 2;
      } else {
        break;
      }
    }
    return j - pos_;
  }

  void word_or_number() {
    std::size_t j = pos_;
    bool has_letter = false;
    while (j < text_.size()) {
      const char32_t c = text_[j];
      if (u::is_word_char(c)) {
        has_letter = true;
        ++j;
      } else if (u::is_ascii_digit(c)) {
        ++j;
      } else if ((c == U'\'' || c == kRightQuote) && j > pos_ && u::is_word_char(text_[j - 1]) &&
                 u::is_word_char(at(j + 1))) {
        ++j;
      } else if ((c == U'.' || c == U',') && j > pos_ && u::is_ascii_digit(text_[j - 1]) &&
                 u::is_ascii_digit(at(j + 1)) && !has_letter) {
        ++j;
      } else {
        break;
      }
    }
    emit(j - pos_, has_letter ? TokenKind::word : TokenKind::number);
  }

  std::u32string_view text_;
  const Lexicons& lexicons_;
  std::size_t pos_ = 0;
  std::vector<Token> tokens_;
};

bool is_vowel(const std::string& w, std::size_t i) {
  switch (w[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u': return true;
    case 'y': return i > 0 && !is_vowel(w, i - 1);
    default: return false;
  }
}

bool has_vowel(const std::string& w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (is_vowel(w, i)) return true;
  }
  return false;
}

// Number of vowel-consonant sequences, as in the Porter measure.
int measure(const std::string& w) {
  int m = 0;
  bool prev_vowel = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const bool v = is_vowel(w, i);
    if (prev_vowel && !v) ++m;
    prev_vowel = v;
  }
  return m;
}

bool ends_cvc(const std::string& w) {
  const std::size_t n = w.size();
  if (n < 3) return false;
  const char last = w[n - 1];
  return !is_vowel(w, n - 3) && is_vowel(w, n - 2) && !is_vowel(w, n - 1) && last != 'w' &&
         last != 'x' && last != 'y';
}

std::string restore_stem(std::string stem) {
  if (stem.ends_with("at") || stem.ends_with("bl") || stem.ends_with("iz")) return stem + "e";
  const std::size_t n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2] && !is_vowel(stem, n - 1)) {
    const char c = stem[n - 1];
    if (c != 'l' && c != 's' && c != 'z') stem.pop_back();
    return stem;
  }
  if (measure(stem) == 1 && ends_cvc(stem)) return stem + "e";
  return stem;
}

bool all_ascii_lower(const std::string& w) {
  for (char c : w) {
    if (c < 'a' || c > 'z') return false;
  }
  return true;
}

std::string strip_suffixes(const std::string& w) {
  const std::size_t n = w.size();
  if (n <= 3) return w;
  if (w.ends_with("ies") && n > 4) return w.substr(0, n - 3) + "y";
  if (w.ends_with("sses")) return w.substr(0, n - 2);
  if (w.ends_with("ss") || w.ends_with("us") || w.ends_with("is")) return w;
  if (w.ends_with("es")) {
    const std::string base = w.substr(0, n - 2);
    if (base.ends_with("x") || base.ends_with("ch") || base.ends_with("sh") || base.ends_with("zz") ||
        base.ends_with("us")) {
      return base;
    }
    return w.substr(0, n - 1);
  }
  if (w.ends_with("s")) return w.substr(0, n - 1);
  if (w.ends_with("ing") && n >= 5) {
    const std::string stem = w.substr(0, n - 3);
    return has_vowel(stem) ? restore_stem(stem) : w;
  }
  if (w.ends_with("ed") && n >= 4 && !w.ends_with("eed")) {
    const std::string stem = w.substr(0, n - 2);
    return has_vowel(stem) ? restore_stem(stem) : w;
  }
  return w;
}

}  // namespace

std::string lemmatize_word(std::string_view word, const Lexicons& lexicons) {
  std::string w = u::ascii_lower(word);
  if (auto it = lexicons.lemma_exceptions.find(w); it != lexicons.lemma_exceptions.end()) {
    return it->second;
  }
  for (std::string_view possessive : {"'s", "\xE2\x80\x99s"}) {
    if (w.size() > possessive.size() && w.ends_with(possessive)) {
      w.resize(w.size() - possessive.size());
      if (auto it = lexicons.lemma_exceptions.find(w); it != lexicons.lemma_exceptions.end()) {
        return it->second;
      }
      break;
    }
  }
  if (!all_ascii_lower(w)) return w;
  return strip_suffixes(w);
}

Token lemmatize(Token token, const Lexicons& lexicons) {
  token.lemma = token.kind == TokenKind::word ? lemmatize_word(token.surface, lexicons) : token.surface;
  return token;
}

TokenizedPost tokenize_post(std::string_view note, const Lexicons& lexicons) {
  const std::u32string text = u::decode_utf8(note);
  TokenizedPost post;
  post.raw = std::string(note);
  post.tokens = Segmenter(text, lexicons).run();
  return post;
}

void validate(NgramRange range) {
  if (range.low < 1 || range.low > range.high || range.high > 3) {
    throw std::invalid_argument("tokenize: n-gram range must satisfy 1 <= low <= high <= 3");
  }
}

std::vector<std::string> generate_ngrams(const TokenizedPost& post, NgramRange range) {
  validate(range);
  std::vector<std::string> out;
  const auto& tokens = post.tokens;
  for (int n = range.low; n <= range.high; ++n) {
    const auto width = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + width <= tokens.size(); ++i) {
      std::string gram = tokens[i].lemma;
      for (std::size_t k = 1; k < width; ++k) {
        gram += ' ';
        gram += tokens[i + k].lemma;
      }
      out.push_back(std::move(gram));
    }
  }
  return out;
}

}  // namespace payattr
