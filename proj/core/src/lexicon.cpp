#include "payattr/lexicon.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "embedded_data.hpp"
#include "payattr/error.hpp"
#include "payattr/unicode.hpp"

namespace payattr {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.starts_with("# ") && !trim(line).empty()) f(line);
    start = end + 1;
  }
}

void sort_longest_first(std::vector<std::string>& v) {
  std::stable_sort(v.begin(), v.end(),
                   [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
}

std::unordered_set<std::string> lowered_set(const std::vector<std::string>& words) {
  std::unordered_set<std::string> out;
  for (const auto& w : words) out.insert(unicode::ascii_lower(w));
  return out;
}

}  // namespace

std::vector<std::string> parse_word_list(std::string_view text) {
  std::vector<std::string> out;
  for_each_line(text, [&](std::string_view line) { out.emplace_back(trim(line)); });
  return out;
}

std::unordered_map<std::string, std::string> parse_lemma_table(std::string_view text) {
  std::unordered_map<std::string, std::string> out;
  for_each_line(text, [&](std::string_view line) {
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) return;
    auto surface = unicode::ascii_lower(trim(line.substr(0, tab)));
    auto lemma = unicode::ascii_lower(trim(line.substr(tab + 1)));
    if (!surface.empty() && !lemma.empty()) out.emplace(std::move(surface), std::move(lemma));
  });
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Lexicons& default_lexicons() {
  static const Lexicons lexicons = [] {
    Lexicons l;
    l.emoticons = parse_word_list(embedded::emoticons());
    sort_longest_first(l.emoticons);
    l.laughing = lowered_set(parse_word_list(embedded::laughing()));
    l.curse_words = lowered_set(parse_word_list(embedded::curse_words()));
    l.lemma_exceptions = parse_lemma_table(embedded::lemma_exceptions());
    return l;
  }();
  return lexicons;
}

Lexicons load_lexicons(const std::string& directory) {
  namespace fs = std::filesystem;
  Lexicons l = default_lexicons();
  const fs::path dir(directory);
  if (fs::exists(dir / "emoticons.txt")) {
    l.emoticons = parse_word_list(read_text_file((dir / "emoticons.txt").string()));
    sort_longest_first(l.emoticons);
  }
  if (fs::exists(dir / "laughing.txt")) {
    l.laughing = lowered_set(parse_word_list(read_text_file((dir / "laughing.txt").string())));
  }
  if (fs::exists(dir / "curse_words.txt")) {
    l.curse_words = lowered_set(parse_word_list(read_text_file((dir / "curse_words.txt").string())));
  }
  if (fs::exists(dir / "lemma_exceptions.tsv")) {
    l.lemma_exceptions = parse_lemma_table(read_text_file((dir / "lemma_exceptions.tsv").string()));
  }
  return l;
}

std::string data_directory() {
  if (const char* env = std::getenv("PAYATTR_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return PAYATTR_SOURCE_DATA_DIR;
}

}  // namespace payattr
