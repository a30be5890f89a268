#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "payattr/lexicon.hpp"

namespace payattr {

enum class TokenKind { word, emoji, shortcode, emoticon, number, punct };

std::string_view to_string(TokenKind kind);

struct Token {
  std::string surface;
  std::string lemma;  // lowercase lemma for words, surface otherwise
  TokenKind kind = TokenKind::punct;

  bool operator==(const Token&) const = default;
};

struct TokenizedPost {
  std::vector<Token> tokens;
  std::string raw;

  bool operator==(const TokenizedPost&) const = default;
};

/// Splits a note into typed tokens.
///
/// Precedence at each position: whitespace, `:shortcode:`, emoticon from the
/// lexicon (longest match, word-boundary aware), emoji cluster (ZWJ
/// sequences, skin tones, variation selectors, flags, keycaps), word or
/// number run, then punctuation. A run of one repeated punctuation character
/// ("!!!") is a single token. Total and deterministic for any byte input.
TokenizedPost tokenize_post(std::string_view note, const Lexicons& lexicons = default_lexicons());

/// Fills in the lemma. Words are lowercased, looked up in the exception
/// table, then reduced by suffix rules; other kinds keep their surface.
Token lemmatize(Token token, const Lexicons& lexicons = default_lexicons());

/// Lemma of a single word; input need not be lowercase.
std::string lemmatize_word(std::string_view word, const Lexicons& lexicons = default_lexicons());

struct NgramRange {
  int low = 1;
  int high = 2;

  bool operator==(const NgramRange&) const = default;
};

/// Throws std::invalid_argument unless 1 <= low <= high <= 3.
void validate(NgramRange range);

/// N-grams over the lemmas of a single post, space-joined, ordered by n then
/// position. N-grams never cross post boundaries because each post is
/// processed on its own.
std::vector<std::string> generate_ngrams(const TokenizedPost& post, NgramRange range);

}  // namespace payattr
