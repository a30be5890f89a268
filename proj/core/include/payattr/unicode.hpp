#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace payattr::unicode {

inline constexpr char32_t kReplacement = 0xFFFD;
inline constexpr char32_t kZeroWidthJoiner = 0x200D;

// Decodes UTF-8 into scalar values. Invalid or truncated sequences decode to
// U+FFFD one byte at a time, so decoding never fails.
std::u32string decode_utf8(std::string_view bytes);

void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(std::u32string_view text);

// Number of Unicode scalar values, counting each invalid byte as one.
std::size_t scalar_length(std::string_view bytes);

bool is_extended_pictographic(char32_t cp);
bool is_regional_indicator(char32_t cp);
bool is_skin_tone_modifier(char32_t cp);
bool is_variation_selector(char32_t cp);
bool is_emoji_tag(char32_t cp);
bool is_whitespace(char32_t cp);

// ASCII letters, plus non-ASCII scalars that are not punctuation, symbols,
// emoji components, or whitespace. Good enough for word segmentation of
// short notes; not a full Unicode Alphabetic table.
bool is_word_char(char32_t cp);
bool is_ascii_alpha(char32_t cp);
bool is_ascii_digit(char32_t cp);

char32_t ascii_lower(char32_t cp);
std::string ascii_lower(std::string_view s);

}  // namespace payattr::unicode
