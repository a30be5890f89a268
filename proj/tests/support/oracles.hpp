#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

// Reference implementations written from the formulas alone, sharing no
// code with the library.
namespace payattr::test::oracle {

using Post = std::vector<std::string>;  // lemma sequence
using User = std::vector<Post>;

inline std::vector<std::string> post_ngrams(const Post& post, int low, int high) {
  std::vector<std::string> out;
  for (int n = low; n <= high; ++n) {
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= post.size(); ++i) {
      std::string gram = post[i];
      for (int k = 1; k < n; ++k) gram += " " + post[i + static_cast<std::size_t>(k)];
      out.push_back(gram);
    }
  }
  return out;
}

struct Tfidf {
  std::vector<std::string> terms;
  std::vector<std::vector<double>> rows;  // dense
};

inline Tfidf tfidf(const std::vector<User>& users, int low, int high, std::size_t min_df) {
  std::map<std::string, std::size_t> df;
  std::vector<std::map<std::string, double>> tf(users.size());
  for (std::size_t u = 0; u < users.size(); ++u) {
    std::set<std::string> present;
    for (const Post& p : users[u]) {
      for (const auto& g : post_ngrams(p, low, high)) {
        tf[u][g] += 1.0;
        present.insert(g);
      }
    }
    for (const auto& g : present) ++df[g];
  }
  Tfidf out;
  for (const auto& [term, d] : df) {
    if (d >= min_df) out.terms.push_back(term);
  }
  const double n = static_cast<double>(users.size());
  for (std::size_t u = 0; u < users.size(); ++u) {
    std::vector<double> row;
    double norm2 = 0.0;
    for (const auto& term : out.terms) {
      auto it = tf[u].find(term);
      const double count = it == tf[u].end() ? 0.0 : it->second;
      const double idf = std::log((1.0 + n) / (1.0 + static_cast<double>(df[term]))) + 1.0;
      row.push_back(count * idf);
      norm2 += row.back() * row.back();
    }
    if (norm2 > 0) {
      for (double& v : row) v /= std::sqrt(norm2);
    }
    out.rows.push_back(row);
  }
  return out;
}

// Logistic loss of labels y in {0,1} against logits.
inline double log_loss(const std::vector<double>& logits, const std::vector<int>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-logits[i]));
    s -= y[i] ? std::log(p) : std::log(1.0 - p);
  }
  return s / static_cast<double>(y.size());
}

}  // namespace payattr::test::oracle
