#include "payattr/synth.hpp"

#include <array>
#include <cmath>
#include <cstdio>

#include "payattr/error.hpp"
#include "payattr/random.hpp"

namespace payattr {

using nlohmann::json;

namespace {

constexpr std::array<const char*, 64> kBackground{
    "pizza",   "rent",     "dinner",  "thanks",   "for",     "the",     "uber",    "lunch",
    "drinks",  "food",     "tickets", "gas",      "coffee",  "groceries", "bills",  "split",
    "you",     "my",       "share",   "birthday", "cable",   "utilities", "movie", "tacos",
    "sushi",   "last",     "night",   "money",    "trip",    "hotel",   "parking", "snacks",
    "concert", "game",     "cab",     "ride",     "tip",     "water",   "internet", "power",
    "breakfast", "present", "gift",   "wifi",     "electric", "flight", "airbnb",  "cookies",
    "donuts",  "burgers",  "wings",   "pho",      "ramen",   "bagels",  "pasta",   "cake",
    "laundry", "books",    "shirt",   "shoes",    "haircut", "ice",     "cream",   "chips"};

constexpr std::array<const char*, 32> kEmoji{
    "🍕", "🍔", "🍺", "🍷", "🎉", "💸", "💰", "🏠", "🚕", "🎁", "🍣", "🌮", "☕", "🍩", "🎂", "🔥",
    "😂", "😍", "🙏", "👍", "💯", "🎶", "⚡", "💡", "🍦", "🍪", "🍜", "🎬", "✈", "🚗", "⛽", "🎈"};

constexpr std::array<const char*, 6> kExtras{"!!", "lol", "haha", ":pizza:", "...", "!"};

constexpr std::array<const char*, 20> kFemaleNames{
    "Mary",    "Jennifer", "Linda",  "Patricia", "Elizabeth", "Susan",  "Jessica", "Sarah",   "Karen",   "Emily",
    "Ashley",  "Amanda",   "Megan",  "Hannah",   "Olivia",    "Emma",   "Sophia",  "Abigail", "Madison", "Chloe"};

constexpr std::array<const char*, 20> kMaleNames{
    "James",   "John",     "Robert", "Michael", "William", "David",   "Richard", "Joseph", "Thomas", "Charles",
    "Daniel",  "Matthew",  "Anthony", "Mark",   "Steven",  "Andrew",  "Joshua",  "Kevin",  "Brian",  "Ryan"};

constexpr std::array<const char*, 16> kSurnames{"Smith", "Johnson", "Williams", "Brown", "Jones",  "Garcia",
                                                "Miller", "Davis",  "Rodriguez", "Martinez", "Lee", "Walker",
                                                "Hall",  "Allen",   "Young",   "King"};

std::string pad(const char* prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%06zu", prefix, n);
  return buf;
}

// Seconds since 2018-01-01T00:00:00Z rendered as ISO-8601 UTC.
std::string timestamp(std::uint64_t seconds) {
  static constexpr std::array<int, 12> kDays{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  std::uint64_t days = seconds / 86400;
  const std::uint64_t rem = seconds % 86400;
  int year = 2018;
  auto leap = [](int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; };
  while (days >= static_cast<std::uint64_t>(leap(year) ? 366 : 365)) {
    days -= leap(year) ? 366 : 365;
    ++year;
  }
  int month = 0;
  for (;; ++month) {
    const int len = kDays[month] + (month == 1 && leap(year) ? 1 : 0);
    if (days < static_cast<std::uint64_t>(len)) break;
    days -= len;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02u:%02u:%02uZ", year, month + 1, static_cast<int>(days) + 1,
                static_cast<unsigned>(rem / 3600), static_cast<unsigned>(rem / 60 % 60),
                static_cast<unsigned>(rem % 60));
  return buf;
}

class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double s) : cdf_(n) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      total += 1.0 / std::pow(static_cast<double>(i + 1), s);
      cdf_[i] = total;
    }
    for (double& c : cdf_) c /= total;
  }

  std::size_t operator()(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return it == cdf_.end() ? cdf_.size() - 1 : static_cast<std::size_t>(it - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

template <std::size_t N>
const char* pick(const std::array<const char*, N>& pool, Rng& rng) {
  return pool[rng.below(N)];
}

const std::string& pick(const std::vector<std::string>& pool, Rng& rng) { return pool[rng.below(pool.size())]; }

}  // namespace

void SynthSpec::validate() const {
  if (users_per_class == 0) throw InvalidSpec("users_per_class must be positive");
  if (min_posts == 0 || min_posts > max_posts) throw InvalidSpec("posts range must satisfy 1 <= min <= max");
  if (!(p_noise >= 0.0 && p_noise < p_signal && p_signal <= 1.0)) {
    throw InvalidSpec("probabilities must satisfy 0 <= p_noise < p_signal <= 1");
  }
  if (signal_a.empty() || signal_b.empty()) throw InvalidSpec("each class needs at least one signal token");
  if (!(emoji_fraction >= 0.0 && emoji_fraction <= 1.0)) throw InvalidSpec("emoji_fraction must be in [0, 1]");
  if (!(zipf_exponent >= 0.0 && std::isfinite(zipf_exponent))) throw InvalidSpec("zipf_exponent must be >= 0");
}

json SynthSpec::to_json() const {
  return json{{"users_per_class", users_per_class},
              {"posts", {min_posts, max_posts}},
              {"signal_a", signal_a},
              {"signal_b", signal_b},
              {"p_signal", p_signal},
              {"p_noise", p_noise},
              {"background", background},
              {"zipf_exponent", zipf_exponent},
              {"emoji_fraction", emoji_fraction},
              {"seed", seed}};
}

SynthSpec SynthSpec::from_json(const json& j, const SynthSpec& base) {
  SynthSpec s = base;
  try {
    auto read = [&](const char* key, auto& out) {
      if (auto it = j.find(key); it != j.end()) it->get_to(out);
    };
    read("users_per_class", s.users_per_class);
    if (auto it = j.find("posts"); it != j.end()) {
      if (!it->is_array() || it->size() != 2) throw InvalidSpec("posts must be a [min, max] pair");
      s.min_posts = (*it)[0].get<std::size_t>();
      s.max_posts = (*it)[1].get<std::size_t>();
    }
    read("signal_a", s.signal_a);
    read("signal_b", s.signal_b);
    read("p_signal", s.p_signal);
    read("p_noise", s.p_noise);
    read("background", s.background);
    read("zipf_exponent", s.zipf_exponent);
    read("emoji_fraction", s.emoji_fraction);
    read("seed", s.seed);
  } catch (const json::exception& e) {
    throw InvalidSpec(std::string("bad synth spec: ") + e.what());
  }
  return s;
}

SynthSpec SynthSpec::from_json(const json& j) { return from_json(j, SynthSpec{}); }

SynthCorpus generate_synthetic_corpus(const SynthSpec& spec) {
  spec.validate();
  std::vector<std::string> background = spec.background;
  if (background.empty()) background.assign(kBackground.begin(), kBackground.end());
  const ZipfSampler zipf(background.size(), spec.zipf_exponent);

  Rng users_rng(derive_seed(spec.seed, "synth-users"));
  Rng notes_rng(derive_seed(spec.seed, "synth-notes"));

  // Interleave the classes so user ids carry no label information.
  const std::size_t n_users = 2 * spec.users_per_class;
  std::vector<ClassLabel> classes(n_users);
  for (std::size_t i = 0; i < n_users; ++i) classes[i] = i < spec.users_per_class ? ClassLabel::class_a : ClassLabel::class_b;
  users_rng.shuffle(classes);

  SynthCorpus out;
  std::size_t counterparty = 0;
  std::uint64_t clock = 0;
  for (std::size_t u = 0; u < n_users; ++u) {
    const ClassLabel label = classes[u];
    const bool is_a = label == ClassLabel::class_a;
    const std::string user_id = pad("u", u + 1);
    const std::string name = std::string(is_a ? pick(kFemaleNames, users_rng) : pick(kMaleNames, users_rng)) + " " +
                             pick(kSurnames, users_rng);
    out.labels.emplace_back(user_id, label);
    const auto& own = is_a ? spec.signal_a : spec.signal_b;
    const auto& other = is_a ? spec.signal_b : spec.signal_a;
    const auto n_posts = static_cast<std::size_t>(
        users_rng.between(static_cast<std::int64_t>(spec.min_posts), static_cast<std::int64_t>(spec.max_posts)));

    for (std::size_t p = 0; p < n_posts; ++p) {
      std::vector<std::string> words;
      if (notes_rng.bernoulli(spec.emoji_fraction)) {
        words.emplace_back(pick(kEmoji, notes_rng));
      } else {
        const auto n_words = notes_rng.between(1, 3);
        for (std::int64_t w = 0; w < n_words; ++w) words.push_back(background[zipf(notes_rng)]);
        if (notes_rng.bernoulli(0.3)) words.emplace_back(pick(kEmoji, notes_rng));
        if (notes_rng.bernoulli(0.1)) words.emplace_back(pick(kExtras, notes_rng));
      }
      if (notes_rng.bernoulli(spec.p_signal)) {
        words.insert(words.begin() + static_cast<std::ptrdiff_t>(notes_rng.below(words.size() + 1)), pick(own, notes_rng));
      }
      if (notes_rng.bernoulli(spec.p_noise)) {
        words.insert(words.begin() + static_cast<std::ptrdiff_t>(notes_rng.below(words.size() + 1)), pick(other, notes_rng));
      }
      std::string note;
      for (const auto& w : words) {
        if (!note.empty()) note += ' ';
        note += w;
      }

      Transaction t;
      clock += 1 + notes_rng.below(600);
      t.id = pad("t", out.transactions.size() + 1);
      t.created_at = timestamp(clock);
      t.note = std::move(note);
      t.kind = notes_rng.bernoulli(0.15) ? TransactionKind::charge : TransactionKind::payment;
      const std::string friend_id = pad("c", ++counterparty);
      const std::string friend_name = "Friend " + std::to_string(counterparty);
      if (notes_rng.bernoulli(0.7)) {
        t.actor_id = user_id;
        t.actor_name = name;
        t.target_id = friend_id;
        t.target_name = friend_name;
      } else {
        t.actor_id = friend_id;
        t.actor_name = friend_name;
        t.target_id = user_id;
        t.target_name = name;
      }
      t.likes_count = static_cast<std::int64_t>(notes_rng.below(3));
      t.comments_count = static_cast<std::int64_t>(notes_rng.below(2));
      t.audience = Audience::public_;
      out.transactions.push_back(std::move(t));
    }
  }
  return out;
}

void write_labels_csv(std::ostream& out, const SynthCorpus& corpus) {
  out << "user_id,label\n";
  for (const auto& [id, label] : corpus.labels) out << id << ',' << class_name(Task::politics, label) << '\n';
}

}  // namespace payattr
