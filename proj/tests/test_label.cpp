#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "payattr/error.hpp"
#include "payattr/label.hpp"
#include "support/fixtures.hpp"

namespace payattr {
namespace {

TEST(FirstName, Extraction) {
  EXPECT_EQ(extract_first_name("Mary-Jane Smith"), "maryjane");
  EXPECT_EQ(extract_first_name("🔥🔥"), "");
  EXPECT_EQ(extract_first_name("bob"), "bob");
  EXPECT_EQ(extract_first_name("  JOHN   Doe"), "john");
  EXPECT_EQ(extract_first_name(""), "");
}

TEST(Gender, Thresholds) {
  EXPECT_EQ(gender_for_male_fraction(1.0), GenderGuess::male);
  EXPECT_EQ(gender_for_male_fraction(0.95), GenderGuess::male);
  EXPECT_EQ(gender_for_male_fraction(0.9499), GenderGuess::mostly_male);
  EXPECT_EQ(gender_for_male_fraction(0.7), GenderGuess::mostly_male);
  EXPECT_EQ(gender_for_male_fraction(0.6999), GenderGuess::andy);
  EXPECT_EQ(gender_for_male_fraction(0.5), GenderGuess::andy);
  EXPECT_EQ(gender_for_male_fraction(0.3001), GenderGuess::andy);
  EXPECT_EQ(gender_for_male_fraction(0.3), GenderGuess::mostly_female);
  EXPECT_EQ(gender_for_male_fraction(0.0501), GenderGuess::mostly_female);
  EXPECT_EQ(gender_for_male_fraction(0.05), GenderGuess::female);
  EXPECT_EQ(gender_for_male_fraction(0.0), GenderGuess::female);
}

TEST(Gender, ThresholdsPartitionUnitInterval) {
  for (int i = 0; i <= 10000; ++i) {
    const double m = i / 10000.0;
    const GenderGuess g = gender_for_male_fraction(m);
    const int hits = (m >= 0.95) + (m >= 0.7 && m < 0.95) + (m > 0.3 && m < 0.7) + (m > 0.05 && m <= 0.3) + (m <= 0.05);
    ASSERT_EQ(hits, 1) << m;
    EXPECT_NE(g, GenderGuess::unknown);
  }
}

TEST(Gender, BundledCorpusCategories) {
  const NameCorpus& c = default_name_corpus();
  EXPECT_EQ(guess_gender("mary", c), GenderGuess::female);
  EXPECT_EQ(guess_gender("James", c), GenderGuess::male);
  EXPECT_EQ(guess_gender("taylor", c), GenderGuess::andy);
  EXPECT_EQ(guess_gender("kerry", c), GenderGuess::mostly_male);
  EXPECT_EQ(guess_gender("shannon", c), GenderGuess::mostly_female);
  EXPECT_EQ(guess_gender("zebediah", c), GenderGuess::unknown);
  EXPECT_EQ(guess_gender("", c), GenderGuess::unknown);
  EXPECT_EQ(guess_gender("andrea", c, "IT"), GenderGuess::male);
  EXPECT_EQ(guess_gender("andrea", c, "US"), GenderGuess::female);
  EXPECT_EQ(guess_gender("andrea", c, "*"), GenderGuess::andy);
  EXPECT_THROW(guess_gender("mary", c, "XX"), UnknownRegion);
}

TEST(Gender, CaseInsensitive) {
  const NameCorpus& c = default_name_corpus();
  for (const char* n : {"mary", "MARY", "Mary", "mArY"}) EXPECT_EQ(guess_gender(n, c), GenderGuess::female);
}

TEST(Gender, ParseTsvAddsRepeatedRows) {
  const NameCorpus c = NameCorpus::parse_tsv("# header\nalex\tUS\t10\t0\nalex\tUS\t0\t10\nsam\tUK\t1\t0\n");
  EXPECT_DOUBLE_EQ(*c.male_fraction("alex", "US"), 0.5);
  EXPECT_EQ(guess_gender("sam", c, "UK"), GenderGuess::male);
  EXPECT_TRUE(c.has_region("UK"));
  EXPECT_FALSE(c.has_region("FR"));
}

Corpus people(const std::vector<std::string>& names) {
  std::vector<Transaction> txns;
  for (std::size_t i = 0; i < names.size(); ++i) {
    Transaction t = test::txn("t" + std::to_string(i), "u" + std::to_string(i), "hub");
    t.actor_name = names[i];
    t.target_name = "Zebediah Hub";
    txns.push_back(t);
  }
  return group_by_user(txns);
}

TEST(Labels, GenderDropsNonBinaryGuesses) {
  const Corpus c = people({"James Smith", "Taylor Jones", "Mary Lee", "Jesse Park"});
  const auto labeled = build_labeled_dataset(c, Task::gender);
  ASSERT_EQ(labeled.size(), 2u);
  EXPECT_EQ(labeled[0].user_id, "u0");
  EXPECT_EQ(labeled[0].label, ClassLabel::class_b);
  EXPECT_EQ(labeled[1].user_id, "u2");
  EXPECT_EQ(labeled[1].label, ClassLabel::class_a);
  EXPECT_EQ(class_name(Task::gender, labeled[1].label), "female");
}

TEST(Labels, EmptyCorpus) { EXPECT_TRUE(build_labeled_dataset(Corpus{}, Task::gender).empty()); }

TEST(Labels, PoliticsJoinsAndDropsUnmatched) {
  std::vector<std::string> names;
  std::string csv = "user_id,label\n";
  for (int i = 0; i < 440; ++i) {
    names.push_back("Person " + std::to_string(i));
    if (i < 436) csv += "u" + std::to_string(i) + "," + (i % 2 ? "republican" : "democrat") + "\n";
  }
  csv += "ghost,democrat\n";
  std::istringstream in(csv);
  const auto labels = parse_political_labels(in);
  LabelOptions o;
  o.political_labels = &labels;
  const auto labeled = build_labeled_dataset(people(names), Task::politics, o);
  EXPECT_EQ(labeled.size(), 436u);
  std::size_t dem = 0;
  for (const auto& u : labeled) dem += u.label == ClassLabel::class_a;
  EXPECT_EQ(dem, 218u);
}

TEST(Labels, PoliticsRequiresFile) {
  EXPECT_THROW(build_labeled_dataset(people({"A"}), Task::politics), MissingLabelFile);
  EXPECT_THROW(load_political_labels("/nonexistent/labels.csv"), MissingLabelFile);
}

TEST(Labels, RejectsUnknownPoliticalLabel) {
  std::istringstream in("u1,green\n");
  EXPECT_THROW(parse_political_labels(in), Error);
}

}  // namespace
}  // namespace payattr
