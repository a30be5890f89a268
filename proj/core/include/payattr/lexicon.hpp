#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace payattr {

/// Word lists used by the tokenizer and the content-feature detectors.
struct Lexicons {
  std::vector<std::string> emoticons;  // sorted longest first for greedy matching
  std::unordered_set<std::string> laughing;
  std::unordered_set<std::string> curse_words;
  std::unordered_map<std::string, std::string> lemma_exceptions;
};

/// Compiled-in copies of the files under core/data.
const Lexicons& default_lexicons();

// One entry per line; surrounding whitespace trimmed; blank lines and lines
// starting with "# " skipped.
std::vector<std::string> parse_word_list(std::string_view text);
// "surface<TAB>lemma" per line, keys lowercased.
std::unordered_map<std::string, std::string> parse_lemma_table(std::string_view text);

std::string read_text_file(const std::string& path);

/// Builds lexicons from a directory holding emoticons.txt, laughing.txt,
/// curse_words.txt and lemma_exceptions.tsv. Missing files fall back to the
/// compiled-in defaults.
Lexicons load_lexicons(const std::string& directory);

/// $PAYATTR_DATA_DIR if set, else the source tree's data directory.
std::string data_directory();

}  // namespace payattr
