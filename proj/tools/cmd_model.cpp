#include <iostream>
#include <numeric>
#include <thread>

#include <CLI11.hpp>

#include "cli_common.hpp"
#include "payattr/error.hpp"
#include "payattr/random.hpp"
#include "payattr/sparse.hpp"

namespace payattr::cli {

using nlohmann::json;

namespace {

struct PipelineFlags {
  std::optional<std::string> vectorizer;
  std::vector<int> ngram;
  std::optional<std::size_t> min_df;
  std::optional<std::string> classifier;
  std::optional<double> c;
  std::optional<bool> use_engineered;
  std::optional<bool> normalize_counts;

  void add_to(CLI::App& app) {
    app.add_option("--vectorizer", vectorizer, "count or tfidf");
    app.add_option("--ngram", ngram, "n-gram range: LOW HIGH")->expected(2);
    app.add_option("--min-df", min_df, "Minimum document frequency");
    app.add_option("--classifier", classifier, "svm, mlp or gbdt");
    app.add_option("--C", c, "SVM regularization constant");
    app.add_option("--use-engineered", use_engineered, "Append engineered features (true/false)");
    app.add_option("--normalize-counts", normalize_counts, "L2-normalize count vectors (true/false)");
  }

  void apply(PipelineConfig& cfg) const {
    if (vectorizer) cfg.vectorizer = parse_vectorizer(*vectorizer);
    if (ngram.size() == 2) {
      cfg.n_range = {ngram[0], ngram[1]};
      try {
        validate(cfg.n_range);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    if (min_df) cfg.min_df = *min_df;
    if (classifier) cfg.classifier = parse_classifier(*classifier);
    if (c) cfg.svm.C = *c;
    if (use_engineered) cfg.use_engineered = *use_engineered;
    if (normalize_counts) cfg.normalize_counts = *normalize_counts;
  }
};

void seed_classifiers(PipelineConfig& cfg, std::uint64_t root) {
  cfg.svm.seed = derive_seed(root, "svm");
  cfg.mlp.seed = derive_seed(root, "mlp");
  cfg.gbdt.seed = derive_seed(root, "gbdt");
}

struct TrainFlags {
  DatasetFlags data;
  PipelineFlags pipeline;
  std::string model;
  std::string vocab_out;
  std::string matrix_out;
};

void run_train(Context& ctx, const TrainFlags& f) {
  const DatasetOptions o = f.data.resolve(ctx, "train");
  PipelineConfig cfg = PipelineConfig::from_json(ctx.section("train"));
  seed_classifiers(cfg, o.seed);
  f.pipeline.apply(cfg);
  const PreparedData prepared = prepare_dataset(ctx, o);
  const Dataset& data = prepared.dataset;
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const FittedPipeline fitted = fit_pipeline(data, rows, cfg);
  save_pipeline(fitted, f.model);

  if (!f.vocab_out.empty()) {
    Output out(f.vocab_out);
    write_vocabulary_tsv(out.stream(), fitted.vocabulary);
    out.close();
  }
  if (!f.matrix_out.empty()) {
    Output out(f.matrix_out);
    write_coordinate(out.stream(), fitted.transform(data.posts, data.engineered));
    out.close();
    Output sidecar(f.matrix_out + ".json");
    sidecar.stream() << json{{"rows", data.user_ids},
                             {"columns", fitted.feature_names()},
                             {"labels", data.labels},
                             {"task", to_string(data.task)}}
                            .dump()
                     << '\n';
    sidecar.close();
  }
  const auto predicted = fitted.predict(data.posts, data.engineered);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == data.labels[i];
  std::cout << json{{"task", to_string(data.task)},
                    {"users", data.size()},
                    {"features", fitted.feature_names().size()},
                    {"classifier", to_string(cfg.classifier)},
                    {"training_accuracy", data.size() ? static_cast<double>(correct) / data.size() : 0.0},
                    {"model", f.model}}
                   .dump()
            << '\n';
}

struct EvaluateFlags {
  DatasetFlags data;
  std::string grid;
  std::optional<std::size_t> folds;
  std::string report = "-";
  std::optional<std::size_t> workers;
  std::string model_out;
};

void run_evaluate(Context& ctx, const EvaluateFlags& f) {
  const DatasetOptions o = f.data.resolve(ctx, "evaluate");
  GridSpec grid;
  if (!f.grid.empty()) {
    Input in(f.grid);
    json j;
    try {
      j = json::parse(in.stream());
    } catch (const json::exception& e) {
      throw ConfigError("grid '" + f.grid + "' is not valid JSON: " + e.what());
    }
    grid = GridSpec::from_json(j);
  } else if (auto section = ctx.section("evaluate"); section.contains("grid")) {
    grid = GridSpec::from_json(section["grid"]);
  }
  seed_classifiers(grid.base, o.seed);
  const std::size_t k = ctx.setting(f.folds, "evaluate", "folds", std::size_t{5});
  const std::size_t workers =
      ctx.setting(f.workers, "evaluate", "workers", std::size_t{std::max(1u, std::thread::hardware_concurrency())});

  const PreparedData prepared = prepare_dataset(ctx, o);
  const FoldPlan plan = stratified_kfold(prepared.dataset.labels, k, derive_seed(o.seed, "folds"));
  const EvalReport report = grid_search(grid, plan, prepared.dataset, workers);
  json j = report.to_json();
  j["grid"] = grid.to_json();
  if (!f.model_out.empty()) {
    save_pipeline(report.best_model, f.model_out);
    j["best_model_path"] = f.model_out;
  }
  Output out(f.report);
  out.stream() << j.dump(2) << '\n';
  out.close();
  const auto& best = report.results[report.best];
  std::cerr << "best: " << best.config.to_json().dump() << " mean_accuracy=" << best.cv.mean_accuracy << '\n';
}

struct CoefficientFlags {
  std::string model;
  std::size_t k = 15;
  std::string out = "-";
};

void run_report_coefficients(const CoefficientFlags& f) {
  const FittedPipeline p = load_pipeline(f.model);
  const auto* svm = std::get_if<LinearSvmModel>(&p.model);
  if (svm == nullptr) {
    throw ConfigError("report-coefficients needs a linear svm model, got " + std::string(to_string(kind_of(p.model))));
  }
  const CoefficientRanking ranking = top_coefficients(*svm, f.k);
  Output out(f.out);
  auto& os = out.stream();
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  os << "feature,weight,class\n";
  for (const auto& c : ranking.positive) {
    os << field(c.feature) << ',' << format_double(c.weight) << ',' << class_name(p.task, ClassLabel::class_a) << '\n';
  }
  for (const auto& c : ranking.negative) {
    os << field(c.feature) << ',' << format_double(c.weight) << ',' << class_name(p.task, ClassLabel::class_b) << '\n';
  }
  out.close();
}

}  // namespace

void register_model_commands(CLI::App& app, Context& ctx) {
  {
    auto f = std::make_shared<TrainFlags>();
    auto* sub = app.add_subcommand("train", "Fit one pipeline on all labeled users");
    f->data.add_to(*sub);
    f->pipeline.add_to(*sub);
    sub->add_option("--model", f->model, "Output model file")->required();
    sub->add_option("--vocab-out", f->vocab_out, "Vocabulary TSV (term, index, df)");
    sub->add_option("--matrix-out", f->matrix_out, "Training matrix in coordinate format, plus a .json sidecar");
    sub->callback([f, &ctx] { run_train(ctx, *f); });
  }
  {
    auto f = std::make_shared<EvaluateFlags>();
    auto* sub = app.add_subcommand("evaluate", "Grid search with stratified k-fold cross-validation");
    f->data.add_to(*sub);
    sub->add_option("--grid", f->grid, "Grid JSON (vectorizer, n_range, C, classifier arrays)");
    sub->add_option("--folds", f->folds);
    sub->add_option("--report", f->report, "Report JSON ('-' for stdout)");
    sub->add_option("--workers", f->workers);
    sub->add_option("--model-out", f->model_out, "Save the refit best pipeline here");
    sub->callback([f, &ctx] { run_evaluate(ctx, *f); });
  }
  {
    auto f = std::make_shared<CoefficientFlags>();
    auto* sub = app.add_subcommand("report-coefficients", "Top SVM coefficients per class as CSV");
    sub->add_option("--model", f->model)->required();
    sub->add_option("-k", f->k, "Rows per class");
    sub->add_option("--out", f->out);
    sub->callback([f] { run_report_coefficients(*f); });
  }
}

}  // namespace payattr::cli
