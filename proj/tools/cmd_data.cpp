#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "cli_common.hpp"
#include "payattr/error.hpp"
#include "payattr/features.hpp"
#include "payattr/random.hpp"
#include "payattr/synth.hpp"
#include "payattr/tokenize.hpp"

namespace payattr::cli {

using nlohmann::json;

namespace {

struct SynthFlags {
  std::optional<std::size_t> users_per_class;
  std::vector<std::size_t> posts;
  std::optional<double> p_signal;
  std::optional<double> p_noise;
  std::optional<double> emoji_fraction;
  std::optional<std::uint64_t> seed;
  std::string out = "-";
  std::string labels;
};

void run_synth(Context& ctx, const SynthFlags& f) {
  SynthSpec spec = SynthSpec::from_json(ctx.section("synth"));
  if (f.users_per_class) spec.users_per_class = *f.users_per_class;
  if (f.posts.size() == 2) {
    spec.min_posts = f.posts[0];
    spec.max_posts = f.posts[1];
  }
  if (f.p_signal) spec.p_signal = *f.p_signal;
  if (f.p_noise) spec.p_noise = *f.p_noise;
  if (f.emoji_fraction) spec.emoji_fraction = *f.emoji_fraction;
  spec.seed = ctx.setting(f.seed, "synth", "seed", spec.seed);
  const SynthCorpus corpus = generate_synthetic_corpus(spec);
  Output out(f.out);
  write_transactions(out.stream(), corpus.transactions);
  out.close();
  if (!f.labels.empty()) {
    Output labels(f.labels);
    write_labels_csv(labels.stream(), corpus);
    labels.close();
  }
}

struct IngestFlags {
  std::string in;
  std::string out;
  bool strict = false;
};

void run_ingest(const IngestFlags& f) {
  LoadResult loaded;
  {
    Input in(f.in);
    loaded = load_transactions(in.stream(), LoadOptions{f.strict});
  }
  const Corpus corpus = group_by_user(loaded.transactions);
  if (!f.out.empty()) {
    Output out(f.out);
    write_transactions(out.stream(), loaded.transactions);
    out.close();
  }
  const json summary{{"transactions", loaded.transactions.size()},
                     {"users", corpus.user_count()},
                     {"skipped_malformed", loaded.skipped_malformed},
                     {"duplicates", loaded.duplicates}};
  // Keep stdout clean when it carries the corpus.
  (f.out == "-" ? std::cerr : std::cout) << summary.dump() << '\n';
}

struct StatsFlags {
  std::string in;
  std::string out = "-";
  std::optional<std::size_t> min_posts;
};

void run_stats(Context& ctx, const StatsFlags& f) {
  const Corpus corpus = read_corpus(f.in, false, ctx.setting(f.min_posts, "stats", "min_posts", std::size_t{1}));
  Output out(f.out);
  out.stream() << "length,count\n";
  for (const auto& [length, count] : note_length_histogram(corpus)) out.stream() << length << ',' << count << '\n';
  out.close();
  std::cerr << "transactions=" << corpus.transaction_count() << " users=" << corpus.user_count() << '\n';
}

struct FeaturizeFlags {
  std::string in;
  std::string out = "-";
  std::optional<std::size_t> min_posts;
  std::optional<bool> actor_share;
};

void run_featurize(Context& ctx, const FeaturizeFlags& f) {
  const Corpus corpus = read_corpus(f.in, false, ctx.setting(f.min_posts, "featurize", "min_posts", std::size_t{5}));
  const FeatureOptions options{ctx.setting(f.actor_share, "featurize", "actor_share", false)};
  const Lexicons& lex = ctx.lexicons();
  Output out(f.out);
  auto& os = out.stream();
  os << "user_id";
  for (const auto& name : engineered_column_names(options)) os << ',' << name;
  os << '\n';
  for (const auto& [id, profile] : corpus.users) {
    std::vector<TokenizedPost> posts;
    posts.reserve(profile.posts.size());
    for (const auto& p : profile.posts) posts.push_back(tokenize_post(p.transaction->note, lex));
    os << id;
    for (double v : aggregate_user_features(profile, posts, options, lex).values()) os << ',' << format_double(v);
    os << '\n';
  }
  out.close();
}

struct LabelFlags {
  DatasetFlags data;
  std::string out = "-";
};

void run_label(Context& ctx, const LabelFlags& f) {
  DatasetOptions o = f.data.resolve(ctx, "label");
  const Corpus corpus = read_corpus(o.corpus_path, false, o.min_posts);
  Output out(f.out);
  auto& os = out.stream();
  std::vector<LabeledUser> labeled;
  if (o.task == Task::gender) {
    // Report every user's guess; only male/female rows enter the dataset.
    const NameCorpus& names = ctx.names(o.names_path);
    if (!names.has_region(o.region)) throw UnknownRegion("region '" + o.region + "' not in name corpus");
    os << "user_id,first_name,guess,label\n";
    LabelOptions lo;
    lo.names = &names;
    lo.region = o.region;
    labeled = build_labeled_dataset(corpus, o.task, lo);
    if (o.balance) labeled = balance_classes(labeled, derive_seed(o.seed, "balance"));
    std::map<std::string, ClassLabel> kept;
    for (const auto& u : labeled) kept[u.user_id] = u.label;
    for (const auto& [id, profile] : corpus.users) {
      const std::string first = extract_first_name(profile.display_name);
      const GenderGuess g = guess_gender(first, names, o.region);
      auto it = kept.find(id);
      os << id << ',' << first << ',' << to_string(g) << ','
         << (it == kept.end() ? std::string_view("") : class_name(o.task, it->second)) << '\n';
    }
  } else {
    if (!o.labels_path) throw MissingLabelFile("politics task requires --labels");
    const auto political = load_political_labels(*o.labels_path);
    LabelOptions lo;
    lo.political_labels = &political;
    labeled = build_labeled_dataset(corpus, o.task, lo);
    if (o.balance) labeled = balance_classes(labeled, derive_seed(o.seed, "balance"));
    os << "user_id,label\n";
    for (const auto& u : labeled) os << u.user_id << ',' << class_name(o.task, u.label) << '\n';
  }
  out.close();
  std::size_t a = 0;
  for (const auto& u : labeled) a += u.label == ClassLabel::class_a;
  std::cerr << class_name(o.task, ClassLabel::class_a) << '=' << a << ' ' << class_name(o.task, ClassLabel::class_b)
            << '=' << labeled.size() - a << '\n';
}

void run_tokenize_debug(Context& ctx, const std::string& note) {
  const Lexicons& lex = ctx.lexicons();
  const TokenizedPost post = tokenize_post(note, lex);
  std::cout << "index\tkind\tsurface\tlemma\n";
  for (std::size_t i = 0; i < post.tokens.size(); ++i) {
    const auto& t = post.tokens[i];
    std::cout << i << '\t' << to_string(t.kind) << '\t' << t.surface << '\t' << t.lemma << '\n';
  }
  const ContentCounts counts = detect_content_features(post, lex);
  std::cout << "\nfeature\tcount\n";
  for (std::size_t f = 0; f < kContentFeatureCount; ++f) {
    std::cout << to_string(static_cast<ContentFeature>(f)) << '\t' << counts.counts[f] << '\n';
  }
}

}  // namespace

void register_data_commands(CLI::App& app, Context& ctx) {
  {
    auto f = std::make_shared<SynthFlags>();
    auto* sub = app.add_subcommand("synth", "Generate a planted-signal corpus and label CSV");
    sub->add_option("--users-per-class", f->users_per_class);
    sub->add_option("--posts", f->posts, "Posts per user: MIN MAX")->expected(2);
    sub->add_option("--p-signal", f->p_signal, "Per-post probability of an own-class token");
    sub->add_option("--p-noise", f->p_noise, "Per-post probability of an other-class token");
    sub->add_option("--emoji-fraction", f->emoji_fraction, "Fraction of single-emoji notes");
    sub->add_option("--seed", f->seed);
    sub->add_option("--out", f->out, "Transactions JSONL ('-' for stdout)");
    sub->add_option("--labels", f->labels, "Write user_id,label CSV here");
    sub->callback([f, &ctx] { run_synth(ctx, *f); });
  }
  {
    auto f = std::make_shared<IngestFlags>();
    auto* sub = app.add_subcommand("ingest", "Validate and deduplicate a transactions file");
    sub->add_option("--in", f->in, "Transactions JSONL ('-' for stdin)")->required();
    sub->add_option("--out", f->out, "Write the cleaned JSONL here ('-' for stdout)");
    sub->add_flag("--strict", f->strict, "Fail on the first malformed line");
    sub->callback([f] { run_ingest(*f); });
  }
  {
    auto f = std::make_shared<StatsFlags>();
    auto* sub = app.add_subcommand("stats", "Note length histogram as CSV");
    sub->add_option("--in", f->in)->required();
    sub->add_option("--out", f->out);
    sub->add_option("--min-posts", f->min_posts);
    sub->callback([f, &ctx] { run_stats(ctx, *f); });
  }
  {
    auto f = std::make_shared<FeaturizeFlags>();
    auto* sub = app.add_subcommand("featurize", "Per-user engineered features as CSV");
    sub->add_option("--in", f->in)->required();
    sub->add_option("--out", f->out);
    sub->add_option("--min-posts", f->min_posts);
    sub->add_option("--actor-share", f->actor_share);
    sub->callback([f, &ctx] { run_featurize(ctx, *f); });
  }
  {
    auto f = std::make_shared<LabelFlags>();
    auto* sub = app.add_subcommand("label", "Assign gender or political labels");
    f->data.add_to(*sub);
    sub->add_option("--out", f->out);
    sub->callback([f, &ctx] { run_label(ctx, *f); });
  }
  {
    auto note = std::make_shared<std::string>();
    auto* sub = app.add_subcommand("tokenize-debug", "Print the token table for one note");
    sub->add_option("--note", *note)->required();
    sub->callback([note, &ctx] { run_tokenize_debug(ctx, *note); });
  }
}

}  // namespace payattr::cli
