#include "payattr/sparse.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

#include "payattr/error.hpp"

namespace payattr {

void SparseMatrix::push_row(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
  std::size_t i = 0;
  while (i < entries.size()) {
    const std::uint32_t c = entries[i].first;
    if (c >= cols_) throw std::invalid_argument("sparse: column index out of range");
    double v = 0.0;
    while (i < entries.size() && entries[i].first == c) v += entries[i++].second;
    if (!std::isfinite(v)) throw std::invalid_argument("sparse: non-finite value");
    if (v != 0.0) {
      col_idx_.push_back(c);
      values_.push_back(v);
    }
  }
  row_ptr_.push_back(values_.size());
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  const RowView v = row(r);
  auto it = std::lower_bound(v.cols.begin(), v.cols.end(), c);
  if (it == v.cols.end() || *it != c) return 0.0;
  return v.values[static_cast<std::size_t>(it - v.cols.begin())];
}

std::vector<double> SparseMatrix::dense_row(std::size_t r) const {
  std::vector<double> out(cols_, 0.0);
  const RowView v = row(r);
  for (std::size_t k = 0; k < v.size(); ++k) out[v.cols[k]] = v.values[k];
  return out;
}

double SparseMatrix::dot(std::size_t r, std::span<const double> dense) const {
  const RowView v = row(r);
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) s += v.values[k] * dense[v.cols[k]];
  return s;
}

double SparseMatrix::dot(std::size_t r, const SparseMatrix& other, std::size_t s) const {
  const RowView a = row(r);
  const RowView b = other.row(s);
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a.cols[i] < b.cols[j]) {
      ++i;
    } else if (a.cols[i] > b.cols[j]) {
      ++j;
    } else {
      sum += a.values[i++] * b.values[j++];
    }
  }
  return sum;
}

SparseMatrix SparseMatrix::select_rows(std::span<const std::size_t> rows) const {
  SparseMatrix out(cols_);
  for (std::size_t r : rows) {
    const auto b = row_ptr_.at(r), e = row_ptr_.at(r + 1);
    out.col_idx_.insert(out.col_idx_.end(), col_idx_.begin() + static_cast<std::ptrdiff_t>(b),
                        col_idx_.begin() + static_cast<std::ptrdiff_t>(e));
    out.values_.insert(out.values_.end(), values_.begin() + static_cast<std::ptrdiff_t>(b),
                       values_.begin() + static_cast<std::ptrdiff_t>(e));
    out.row_ptr_.push_back(out.values_.size());
  }
  return out;
}

void SparseMatrix::scale_row(std::size_t r, double factor) {
  if (factor == 0.0 || !std::isfinite(factor)) throw std::invalid_argument("sparse: bad row scale");
  for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) values_[k] *= factor;
}

void write_coordinate(std::ostream& out, const SparseMatrix& m) {
  out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  char buf[64];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto v = m.row(r);
    for (std::size_t k = 0; k < v.size(); ++k) {
      auto res = std::to_chars(buf, buf + sizeof buf, v.values[k]);
      out << r << ' ' << v.cols[k] << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf))
          << '\n';
    }
  }
}

SparseMatrix read_coordinate(std::istream& in) {
  std::size_t rows = 0, cols = 0, nnz = 0;
  if (!(in >> rows >> cols >> nnz)) throw IoError("coordinate matrix: bad header");
  std::vector<std::vector<SparseMatrix::Entry>> entries(rows);
  for (std::size_t k = 0; k < nnz; ++k) {
    std::size_t r = 0;
    std::uint32_t c = 0;
    std::string value;
    if (!(in >> r >> c >> value) || r >= rows) throw IoError("coordinate matrix: bad entry " + std::to_string(k));
    double v = 0.0;
    auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{}) throw IoError("coordinate matrix: bad value '" + value + "'");
    entries[r].emplace_back(c, v);
  }
  SparseMatrix m(cols);
  for (auto& row : entries) m.push_row(std::move(row));
  return m;
}

}  // namespace payattr
