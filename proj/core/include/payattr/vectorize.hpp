#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "payattr/sparse.hpp"
#include "payattr/tokenize.hpp"

namespace payattr {

/// One document per user: that user's tokenized posts.
using UserPosts = std::vector<TokenizedPost>;

/// N-gram vocabulary. Columns are in lexicographic (byte) order of the term.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> document_frequency, std::size_t n_documents,
             NgramRange n_range, std::size_t min_df);

  std::size_t size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::size_t>& document_frequency() const { return df_; }
  std::size_t n_documents() const { return n_documents_; }
  NgramRange n_range() const { return n_range_; }
  std::size_t min_df() const { return min_df_; }

  std::optional<std::size_t> find(const std::string& term) const;

  nlohmann::json to_json() const;
  static Vocabulary from_json(const nlohmann::json& j);

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::size_t n_documents_ = 0;
  NgramRange n_range_{};
  std::size_t min_df_ = 1;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Document frequency counts users, not posts. Terms with df < min_df are
/// dropped. Throws EmptyCorpus when there are no users.
Vocabulary fit_vocabulary(std::span<const UserPosts> users, NgramRange n_range, std::size_t min_df);

/// Raw term counts summed over each user's posts; out-of-vocabulary n-grams
/// are ignored.
SparseMatrix count_transform(std::span<const UserPosts> users, const Vocabulary& vocab);

/// idf(t) = ln((1 + N) / (1 + df(t))) + 1, N and df from the vocabulary.
std::vector<double> idf_weights(const Vocabulary& vocab);

/// count * idf, then each nonzero row scaled to unit L2 norm.
SparseMatrix tfidf_transform(const SparseMatrix& counts, const Vocabulary& vocab);

void l2_normalize_rows(SparseMatrix& m);

/// Column means and population standard deviations of the engineered
/// features, computed on training rows.
struct ScalerStats {
  std::vector<double> mean;
  std::vector<double> stddev;

  nlohmann::json to_json() const;
  static ScalerStats from_json(const nlohmann::json& j);
};

ScalerStats fit_scaler(std::span<const std::vector<double>> rows);

/// z = (x - mean) / std, or x unchanged where std == 0.
std::vector<double> apply_scaler(const ScalerStats& stats, std::span<const double> row);

struct AssembledMatrix {
  SparseMatrix matrix;
  ScalerStats scaler;
};

/// Appends z-scored engineered columns after the text columns. With no
/// scaler given, one is fitted on `engineered`. An empty `engineered`
/// returns the text matrix unchanged. Throws DimensionMismatch when row
/// counts or widths disagree.
AssembledMatrix assemble_feature_matrix(const SparseMatrix& text, std::span<const std::vector<double>> engineered,
                                        const ScalerStats* scaler = nullptr);

/// "term<TAB>index<TAB>df" per line.
void write_vocabulary_tsv(std::ostream& out, const Vocabulary& vocab);

}  // namespace payattr
