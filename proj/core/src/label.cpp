#include "payattr/label.hpp"

#include <charconv>
#include <fstream>

#include "embedded_data.hpp"
#include "payattr/error.hpp"
#include "payattr/lexicon.hpp"
#include "payattr/unicode.hpp"

namespace payattr {

namespace u = unicode;

std::string_view to_string(GenderGuess g) {
  switch (g) {
    case GenderGuess::unknown: return "unknown";
    case GenderGuess::andy: return "andy";
    case GenderGuess::male: return "male";
    case GenderGuess::female: return "female";
    case GenderGuess::mostly_male: return "mostly_male";
    case GenderGuess::mostly_female: return "mostly_female";
  }
  return "unknown";
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_count(std::string_view s, std::size_t line_no) {
  s = trim(s);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || v < 0.0) {
    throw Error("label", "name corpus line " + std::to_string(line_no) + ": bad count '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

NameCorpus NameCorpus::parse_tsv(std::string_view text) {
  NameCorpus corpus;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (trim(line).empty() || line.starts_with("# ")) continue;
    const auto fields = split(line, '\t');
    if (fields.size() < 4) {
      throw Error("label", "name corpus line " + std::to_string(line_no) + ": expected 4 tab-separated fields");
    }
    corpus.add(trim(fields[0]), std::string(trim(fields[1])),
               Counts{parse_count(fields[2], line_no), parse_count(fields[3], line_no)});
  }
  return corpus;
}

NameCorpus NameCorpus::load_tsv(const std::string& path) { return parse_tsv(read_text_file(path)); }

void NameCorpus::add(std::string_view name, const std::string& region, Counts counts) {
  auto& entry = names_[u::ascii_lower(name)][region];
  entry.male += counts.male;
  entry.female += counts.female;
  regions_.insert(region);
}

bool NameCorpus::has_region(std::string_view region) const {
  return region == "*" || regions_.find(region) != regions_.end();
}

std::optional<double> NameCorpus::male_fraction(std::string_view first_name, std::string_view region) const {
  auto it = names_.find(u::ascii_lower(first_name));
  if (it == names_.end()) return std::nullopt;
  Counts total;
  for (const auto& [r, c] : it->second) {
    if (region == "*" || r == region) {
      total.male += c.male;
      total.female += c.female;
    }
  }
  const double n = total.male + total.female;
  if (n <= 0.0) return std::nullopt;
  return total.male / n;
}

const NameCorpus& default_name_corpus() {
  static const NameCorpus corpus = NameCorpus::parse_tsv(embedded::names_us());
  return corpus;
}

std::string extract_first_name(std::string_view display_name) {
  const std::u32string text = u::decode_utf8(display_name);
  std::size_t i = 0;
  while (i < text.size() && u::is_whitespace(text[i])) ++i;
  std::string out;
  for (; i < text.size() && !u::is_whitespace(text[i]); ++i) {
    if (u::is_word_char(text[i])) u::append_utf8(out, u::ascii_lower(text[i]));
  }
  return out;
}

GenderGuess gender_for_male_fraction(double m) {
  if (m >= 0.95) return GenderGuess::male;
  if (m >= 0.7) return GenderGuess::mostly_male;
  if (m > 0.3) return GenderGuess::andy;
  if (m > 0.05) return GenderGuess::mostly_female;
  return GenderGuess::female;
}

GenderGuess guess_gender(std::string_view first_name, const NameCorpus& corpus, std::string_view region) {
  if (!corpus.has_region(region)) throw UnknownRegion("region '" + std::string(region) + "' not in name corpus");
  const auto m = corpus.male_fraction(first_name, region);
  return m ? gender_for_male_fraction(*m) : GenderGuess::unknown;
}

std::string_view to_string(Task task) { return task == Task::gender ? "gender" : "politics"; }

Task parse_task(std::string_view s) {
  if (s == "gender") return Task::gender;
  if (s == "politics") return Task::politics;
  throw Error("label", "unknown task '" + std::string(s) + "' (expected gender or politics)");
}

std::string_view class_name(Task task, ClassLabel label) {
  if (task == Task::gender) return label == ClassLabel::class_a ? "female" : "male";
  return label == ClassLabel::class_a ? "democrat" : "republican";
}

std::map<std::string, ClassLabel> parse_political_labels(std::istream& in) {
  std::map<std::string, ClassLabel> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() < 2) {
      throw Error("label", "labels line " + std::to_string(line_no) + ": expected user_id,label");
    }
    const auto id = trim(fields[0]);
    const auto value = u::ascii_lower(trim(fields[1]));
    if (line_no == 1 && id == "user_id") continue;
    if (value == "democrat") {
      out[std::string(id)] = ClassLabel::class_a;
    } else if (value == "republican") {
      out[std::string(id)] = ClassLabel::class_b;
    } else {
      throw Error("label", "labels line " + std::to_string(line_no) + ": unknown label '" + value + "'");
    }
  }
  return out;
}

std::map<std::string, ClassLabel> load_political_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingLabelFile("cannot open political label file '" + path + "'");
  return parse_political_labels(in);
}

std::vector<LabeledUser> build_labeled_dataset(const Corpus& corpus, Task task, const LabelOptions& options) {
  std::vector<LabeledUser> out;
  if (task == Task::politics) {
    if (options.political_labels == nullptr) throw MissingLabelFile("politics task requires a label file");
    for (const auto& [id, profile] : corpus.users) {
      if (auto it = options.political_labels->find(id); it != options.political_labels->end()) {
        out.push_back({id, it->second, task});
      }
    }
    return out;
  }
  const NameCorpus& names = options.names != nullptr ? *options.names : default_name_corpus();
  for (const auto& [id, profile] : corpus.users) {
    const GenderGuess g = guess_gender(extract_first_name(profile.display_name), names, options.region);
    if (g == GenderGuess::female) {
      out.push_back({id, ClassLabel::class_a, task});
    } else if (g == GenderGuess::male) {
      out.push_back({id, ClassLabel::class_b, task});
    }
  }
  return out;
}

}  // namespace payattr
