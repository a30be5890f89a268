#pragma once

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "payattr/corpus.hpp"

namespace payattr {

enum class GenderGuess { unknown, andy, male, female, mostly_male, mostly_female };

std::string_view to_string(GenderGuess g);

/// First-name gender counts per region. Names are stored lowercase.
class NameCorpus {
 public:
  struct Counts {
    double male = 0.0;
    double female = 0.0;
  };

  /// TSV rows "name<TAB>region<TAB>male_count<TAB>female_count"; lines
  /// starting with "# " are comments. Repeated (name, region) rows add up.
  static NameCorpus parse_tsv(std::string_view text);
  static NameCorpus load_tsv(const std::string& path);

  void add(std::string_view name, const std::string& region, Counts counts);

  const std::set<std::string, std::less<>>& regions() const { return regions_; }
  bool has_region(std::string_view region) const;

  /// Male share of the name in `region`, or in all regions pooled when
  /// region is "*". nullopt when the name is absent or has zero counts.
  std::optional<double> male_fraction(std::string_view first_name, std::string_view region) const;

 private:
  std::map<std::string, std::map<std::string, Counts>, std::less<>> names_;
  std::set<std::string, std::less<>> regions_;
};

/// The bundled synthetic name corpus (core/data/names_us.tsv).
const NameCorpus& default_name_corpus();

/// First whitespace-delimited token with non-letters removed, lowercased.
std::string extract_first_name(std::string_view display_name);

/// Category cutoffs on the male fraction m:
///   male m >= 0.95, mostly_male [0.7, 0.95), andy (0.3, 0.7),
///   mostly_female (0.05, 0.3], female m <= 0.05.
GenderGuess gender_for_male_fraction(double m);

/// Case-insensitive lookup. Throws UnknownRegion unless the region is in the
/// corpus (or "*").
GenderGuess guess_gender(std::string_view first_name, const NameCorpus& corpus, std::string_view region = "US");

enum class Task { gender, politics };
enum class ClassLabel { class_a, class_b };

std::string_view to_string(Task task);
Task parse_task(std::string_view s);

/// gender: class_a = female, class_b = male.
/// politics: class_a = democrat, class_b = republican.
std::string_view class_name(Task task, ClassLabel label);

struct LabeledUser {
  std::string user_id;
  ClassLabel label = ClassLabel::class_a;
  Task task = Task::gender;

  bool operator==(const LabeledUser&) const = default;
};

/// "user_id,label" CSV with label in {republican, democrat}; an optional
/// header row starting with "user_id" is skipped.
std::map<std::string, ClassLabel> parse_political_labels(std::istream& in);
std::map<std::string, ClassLabel> load_political_labels(const std::string& path);

struct LabelOptions {
  const NameCorpus* names = nullptr;  // defaults to default_name_corpus()
  std::string region = "US";
  const std::map<std::string, ClassLabel>* political_labels = nullptr;
};

/// Gender keeps only users whose name guesses strictly male or female.
/// Politics joins on the label table and drops unmatched users (throws
/// MissingLabelFile if no table is given). Output is in user id order.
std::vector<LabeledUser> build_labeled_dataset(const Corpus& corpus, Task task, const LabelOptions& options = {});

}  // namespace payattr
