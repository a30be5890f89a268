#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "payattr/error.hpp"
#include "payattr/synth.hpp"
#include "payattr/tokenize.hpp"

namespace payattr {
namespace {

std::set<std::string> lemmas(const std::string& note) {
  std::set<std::string> out;
  for (const auto& t : tokenize_post(note).tokens) out.insert(t.lemma);
  return out;
}

TEST(Synth, DegenerateProbabilitiesPlantEveryPost) {
  SynthSpec s;
  s.users_per_class = 10;
  s.p_signal = 1.0;
  s.p_noise = 0.0;
  s.seed = 4;
  auto c = generate_synthetic_corpus(s);
  ASSERT_EQ(c.labels.size(), 20u);
  std::map<std::string, ClassLabel> label(c.labels.begin(), c.labels.end());
  std::map<std::string, std::size_t> posts;
  for (const auto& t : c.transactions) {
    // the labeled user may be either side of the payment
    auto it = label.find(t.actor_id);
    if (it == label.end()) it = label.find(t.target_id);
    ASSERT_NE(it, label.end()) << "every note involves a labeled user";
    ++posts[it->first];
    auto words = lemmas(t.note);
    const auto& own = it->second == ClassLabel::class_a ? s.signal_a : s.signal_b;
    const auto& other = it->second == ClassLabel::class_a ? s.signal_b : s.signal_a;
    EXPECT_TRUE(std::any_of(own.begin(), own.end(), [&](const auto& w) { return words.count(lemmatize_word(w)); })) << t.note;
    EXPECT_FALSE(std::any_of(other.begin(), other.end(), [&](const auto& w) { return words.count(lemmatize_word(w)); })) << t.note;
  }
  for (const auto& [u, n] : posts) {
    EXPECT_GE(n, s.min_posts);
    EXPECT_LE(n, s.max_posts);
  }
  EXPECT_EQ(posts.size(), 20u);
}

TEST(Synth, NoteLengthModeIsOne) {
  SynthSpec s;
  s.users_per_class = 200;
  s.seed = 1;
  auto corpus = group_by_user(generate_synthetic_corpus(s).transactions);
  auto hist = note_length_histogram(corpus);
  auto mode = std::max_element(hist.begin(), hist.end(), [](auto a, auto b) { return a.second < b.second; });
  EXPECT_EQ(mode->first, 1u);
}

TEST(Synth, SameSeedSameBytes) {
  SynthSpec s;
  s.users_per_class = 50;
  s.seed = 99;
  auto dump = [&](const SynthSpec& spec) {
    auto c = generate_synthetic_corpus(spec);
    std::ostringstream out;
    write_transactions(out, c.transactions);
    write_labels_csv(out, c);
    return out.str();
  };
  auto a = dump(s);
  EXPECT_EQ(a, dump(s));
  s.seed = 100;
  EXPECT_NE(a, dump(s));
}

TEST(Synth, InvalidSpecs) {
  auto bad = [](auto mutate) {
    SynthSpec s;
    mutate(s);
    return s;
  };
  EXPECT_THROW(bad([](SynthSpec& s) { s.p_noise = 0.6; }).validate(), InvalidSpec);
  EXPECT_THROW(bad([](SynthSpec& s) { s.p_signal = 1.5; }).validate(), InvalidSpec);
  EXPECT_THROW(bad([](SynthSpec& s) { s.p_noise = -0.1; }).validate(), InvalidSpec);
  EXPECT_THROW(bad([](SynthSpec& s) { s.min_posts = 9, s.max_posts = 3; }).validate(), InvalidSpec);
  EXPECT_THROW(bad([](SynthSpec& s) { s.users_per_class = 0; }).validate(), InvalidSpec);
  EXPECT_THROW(bad([](SynthSpec& s) { s.signal_a.clear(); }).validate(), InvalidSpec);
  EXPECT_THROW(generate_synthetic_corpus(bad([](SynthSpec& s) { s.emoji_fraction = 2.0; })), InvalidSpec);
  SynthSpec ok;
  EXPECT_NO_THROW(ok.validate());
  EXPECT_EQ(SynthSpec::from_json(ok.to_json()).to_json(), ok.to_json());
}

TEST(Synth, LabelsCsv) {
  SynthSpec s;
  s.users_per_class = 2;
  auto c = generate_synthetic_corpus(s);
  std::ostringstream out;
  write_labels_csv(out, c);
  auto text = out.str();
  EXPECT_EQ(text.rfind("user_id,label\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
  EXPECT_NE(text.find(",democrat"), std::string::npos);
  EXPECT_NE(text.find(",republican"), std::string::npos);
}

}  // namespace
}  // namespace payattr
