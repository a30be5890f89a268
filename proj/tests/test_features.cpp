#include <gtest/gtest.h>

#include <algorithm>

#include "payattr/error.hpp"
#include "payattr/features.hpp"
#include "support/detector_golden.hpp"
#include "support/fixtures.hpp"

namespace payattr {
namespace {

using test::txn;

TEST(Detectors, GoldenTable) {
  for (const auto& row : test::kDetectorGolden) {
    const ContentCounts got = detect_content_features(tokenize_post(row.note));
    for (std::size_t f = 0; f < kContentFeatureCount; ++f) {
      EXPECT_EQ(got.counts[f], row.expected[f])
          << "note \"" << row.note << "\" feature " << to_string(static_cast<ContentFeature>(f));
    }
  }
}

TEST(Detectors, GoldenTableCoversEveryFeature) {
  std::array<bool, kContentFeatureCount> seen{};
  for (const auto& row : test::kDetectorGolden) {
    for (std::size_t f = 0; f < kContentFeatureCount; ++f) seen[f] = seen[f] || row.expected[f] > 0;
  }
  EXPECT_GE(std::size(test::kDetectorGolden), 50u);
  EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
}

TEST(Detectors, PostLevelFlagsAreBinary) {
  for (const auto& row : test::kDetectorGolden) {
    const ContentCounts c = detect_content_features(tokenize_post(row.note));
    EXPECT_LE(c[ContentFeature::shouting], 1);
    EXPECT_LE(c[ContentFeature::single_exclaim], 1);
  }
}

UserProfile profile_of(const std::vector<Transaction>& txns, const std::string& user) {
  return group_by_user(txns).users.at(user);
}

std::vector<TokenizedPost> tokenize_all(const UserProfile& p) {
  std::vector<TokenizedPost> out;
  for (const auto& post : p.posts) out.push_back(tokenize_post(post.transaction->note));
  return out;
}

TEST(Aggregate, EmojiAverageAndShare) {
  const auto p = profile_of({txn("1", "A", "B", "🍕🍕", "2018-01-01T00:00:00Z"),
                             txn("2", "A", "B", "rent", "2018-01-02T00:00:00Z")},
                            "A");
  const auto f = aggregate_user_features(p, tokenize_all(p));
  const auto i = static_cast<std::size_t>(ContentFeature::emoji);
  EXPECT_DOUBLE_EQ(f.avg_per_post[i], 1.0);
  EXPECT_DOUBLE_EQ(f.pct_posts_containing[i], 0.5);
}

TEST(Aggregate, AllChargesAndLikes) {
  const auto p = profile_of({txn("1", "A", "B", "x", "2018-01-01T00:00:00Z", TransactionKind::charge, 0),
                             txn("2", "A", "C", "y", "2018-01-02T00:00:00Z", TransactionKind::charge, 3),
                             txn("3", "D", "A", "zz", "2018-01-03T00:00:00Z", TransactionKind::charge, 3)},
                            "A");
  const auto f = aggregate_user_features(p, tokenize_all(p), FeatureOptions{true});
  EXPECT_DOUBLE_EQ(f.pct_charge, 1.0);
  EXPECT_DOUBLE_EQ(f.avg_likes, 2.0);
  EXPECT_DOUBLE_EQ(f.avg_len_chars, 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(f.avg_len_tokens, 1.0);
  EXPECT_DOUBLE_EQ(f.pct_as_actor, 2.0 / 3.0);
  EXPECT_EQ(f.values().size(), engineered_column_names(FeatureOptions{true}).size());
  EXPECT_EQ(aggregate_user_features(p, tokenize_all(p)).values().size(), engineered_column_names().size());
}

TEST(Aggregate, EmptyProfileThrows) {
  UserProfile empty{"A", "Ann", {}};
  EXPECT_THROW(aggregate_user_features(empty, {}), EmptyProfile);
}

TEST(Aggregate, PermutationInvariantAndConsistent) {
  const std::vector<std::string> notes{"omg!!", "🍕 lol", "WAIT...", "thanks!", ":uber: heyyyy", "damn"};
  std::vector<Transaction> txns;
  for (std::size_t i = 0; i < notes.size(); ++i) {
    txns.push_back(txn("t" + std::to_string(i), "A", "B" + std::to_string(i), notes[i],
                       "2018-01-0" + std::to_string(i + 1) + "T00:00:00Z"));
  }
  const auto p = profile_of(txns, "A");
  const auto posts = tokenize_all(p);
  const auto ref = aggregate_user_features(p, posts).values();

  UserProfile reversed = p;
  std::reverse(reversed.posts.begin(), reversed.posts.end());
  auto rposts = posts;
  std::reverse(rposts.begin(), rposts.end());
  const auto got = aggregate_user_features(reversed, rposts).values();
  ASSERT_EQ(got.size(), ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(got[i], ref[i], 1e-12);

  const auto f = aggregate_user_features(p, posts);
  for (std::size_t i = 0; i < kContentFeatureCount; ++i) {
    EXPECT_EQ(f.pct_posts_containing[i] > 0, f.avg_per_post[i] > 0) << i;
    EXPECT_GE(f.pct_posts_containing[i], 0.0);
    EXPECT_LE(f.pct_posts_containing[i], 1.0);
  }
}

TEST(Aggregate, ColumnNamesAreStable) {
  const auto names = engineered_column_names();
  ASSERT_EQ(names.size(), 26u);
  EXPECT_EQ(names.front(), "emoji_avg");
  EXPECT_EQ(names[1], "emoji_pct");
  EXPECT_EQ(names.back(), "avg_len_tokens");
  EXPECT_EQ(engineered_column_names(FeatureOptions{true}).back(), "pct_as_actor");
}

}  // namespace
}  // namespace payattr
