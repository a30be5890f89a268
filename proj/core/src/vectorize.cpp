#include "payattr/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "payattr/error.hpp"

namespace payattr {

using nlohmann::json;

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> document_frequency,
                       std::size_t n_documents, NgramRange n_range, std::size_t min_df)
    : terms_(std::move(terms)),
      df_(std::move(document_frequency)),
      n_documents_(n_documents),
      n_range_(n_range),
      min_df_(min_df) {
  if (terms_.size() != df_.size()) throw DimensionMismatch("vocabulary terms and df differ in length");
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) index_.emplace(terms_[i], i);
}

std::optional<std::size_t> Vocabulary::find(const std::string& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

json Vocabulary::to_json() const {
  return json{{"terms", terms_},
              {"df", df_},
              {"n_documents", n_documents_},
              {"n_range", {n_range_.low, n_range_.high}},
              {"min_df", min_df_}};
}

Vocabulary Vocabulary::from_json(const json& j) {
  return Vocabulary(j.at("terms").get<std::vector<std::string>>(), j.at("df").get<std::vector<std::size_t>>(),
                    j.at("n_documents").get<std::size_t>(),
                    NgramRange{j.at("n_range").at(0).get<int>(), j.at("n_range").at(1).get<int>()},
                    j.at("min_df").get<std::size_t>());
}

Vocabulary fit_vocabulary(std::span<const UserPosts> users, NgramRange n_range, std::size_t min_df) {
  validate(n_range);
  if (users.empty()) throw EmptyCorpus("cannot fit a vocabulary on zero users");
  std::map<std::string, std::size_t> df;
  for (const UserPosts& posts : users) {
    std::set<std::string> seen;
    for (const TokenizedPost& post : posts) {
      for (auto& gram : generate_ngrams(post, n_range)) seen.insert(std::move(gram));
    }
    for (const auto& term : seen) ++df[term];
  }
  std::vector<std::string> terms;
  std::vector<std::size_t> freqs;
  for (const auto& [term, count] : df) {
    if (count >= min_df) {
      terms.push_back(term);
      freqs.push_back(count);
    }
  }
  return Vocabulary(std::move(terms), std::move(freqs), users.size(), n_range, min_df);
}

SparseMatrix count_transform(std::span<const UserPosts> users, const Vocabulary& vocab) {
  SparseMatrix m(vocab.size());
  for (const UserPosts& posts : users) {
    std::vector<SparseMatrix::Entry> entries;
    for (const TokenizedPost& post : posts) {
      for (const auto& gram : generate_ngrams(post, vocab.n_range())) {
        if (auto col = vocab.find(gram)) entries.emplace_back(static_cast<std::uint32_t>(*col), 1.0);
      }
    }
    m.push_row(std::move(entries));
  }
  return m;
}

std::vector<double> idf_weights(const Vocabulary& vocab) {
  std::vector<double> idf(vocab.size());
  const double n = static_cast<double>(vocab.n_documents());
  for (std::size_t t = 0; t < vocab.size(); ++t) {
    idf[t] = std::log((1.0 + n) / (1.0 + static_cast<double>(vocab.document_frequency()[t]))) + 1.0;
  }
  return idf;
}

void l2_normalize_rows(SparseMatrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    double sq = 0.0;
    for (double v : row.values) sq += v * v;
    if (sq > 0.0) m.scale_row(r, 1.0 / std::sqrt(sq));
  }
}

SparseMatrix tfidf_transform(const SparseMatrix& counts, const Vocabulary& vocab) {
  if (counts.cols() != vocab.size()) {
    throw DimensionMismatch("count matrix has " + std::to_string(counts.cols()) + " columns, vocabulary has " +
                            std::to_string(vocab.size()));
  }
  const std::vector<double> idf = idf_weights(vocab);
  SparseMatrix out(counts.cols());
  for (std::size_t r = 0; r < counts.rows(); ++r) {
    const auto row = counts.row(r);
    std::vector<SparseMatrix::Entry> entries;
    entries.reserve(row.size());
    for (std::size_t k = 0; k < row.size(); ++k) {
      entries.emplace_back(row.cols[k], row.values[k] * idf[row.cols[k]]);
    }
    out.push_row(std::move(entries));
  }
  l2_normalize_rows(out);
  return out;
}

json ScalerStats::to_json() const { return json{{"mean", mean}, {"stddev", stddev}}; }

ScalerStats ScalerStats::from_json(const json& j) {
  return ScalerStats{j.at("mean").get<std::vector<double>>(), j.at("stddev").get<std::vector<double>>()};
}

ScalerStats fit_scaler(std::span<const std::vector<double>> rows) {
  ScalerStats s;
  if (rows.empty()) return s;
  const std::size_t width = rows.front().size();
  s.mean.assign(width, 0.0);
  s.stddev.assign(width, 0.0);
  for (const auto& row : rows) {
    if (row.size() != width) throw DimensionMismatch("engineered rows have differing widths");
    for (std::size_t c = 0; c < width; ++c) s.mean[c] += row[c];
  }
  const auto n = static_cast<double>(rows.size());
  for (double& m : s.mean) m /= n;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < width; ++c) {
      const double d = row[c] - s.mean[c];
      s.stddev[c] += d * d;
    }
  }
  for (double& v : s.stddev) {
    v = std::sqrt(v / n);
    // Constant columns can leave rounding residue instead of an exact zero.
    if (v < 1e-12) v = 0.0;
  }
  return s;
}

std::vector<double> apply_scaler(const ScalerStats& stats, std::span<const double> row) {
  if (row.size() != stats.mean.size()) throw DimensionMismatch("scaler width does not match row width");
  std::vector<double> out(row.begin(), row.end());
  for (std::size_t c = 0; c < out.size(); ++c) {
    if (stats.stddev[c] > 0.0) out[c] = (out[c] - stats.mean[c]) / stats.stddev[c];
  }
  return out;
}

AssembledMatrix assemble_feature_matrix(const SparseMatrix& text, std::span<const std::vector<double>> engineered,
                                        const ScalerStats* scaler) {
  if (engineered.empty()) return {text, scaler != nullptr ? *scaler : ScalerStats{}};
  if (engineered.size() != text.rows()) {
    throw DimensionMismatch("text matrix has " + std::to_string(text.rows()) + " rows, engineered features have " +
                            std::to_string(engineered.size()));
  }
  AssembledMatrix out;
  out.scaler = scaler != nullptr ? *scaler : fit_scaler(engineered);
  const std::size_t width = out.scaler.mean.size();
  out.matrix = SparseMatrix(text.cols() + width);
  for (std::size_t r = 0; r < text.rows(); ++r) {
    const auto row = text.row(r);
    std::vector<SparseMatrix::Entry> entries;
    entries.reserve(row.size() + width);
    for (std::size_t k = 0; k < row.size(); ++k) entries.emplace_back(row.cols[k], row.values[k]);
    const std::vector<double> scaled = apply_scaler(out.scaler, engineered[r]);
    for (std::size_t c = 0; c < width; ++c) {
      if (scaled[c] != 0.0) entries.emplace_back(static_cast<std::uint32_t>(text.cols() + c), scaled[c]);
    }
    out.matrix.push_row(std::move(entries));
  }
  return out;
}

void write_vocabulary_tsv(std::ostream& out, const Vocabulary& vocab) {
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << vocab.terms()[i] << '\t' << i << '\t' << vocab.document_frequency()[i] << '\n';
  }
}

}  // namespace payattr
