#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

namespace payattr {

/// Compressed sparse row matrix of doubles. Column indices within a row are
/// strictly increasing; explicit zeros are never stored.
class SparseMatrix {
 public:
  using Entry = std::pair<std::uint32_t, double>;

  struct RowView {
    std::span<const std::uint32_t> cols;
    std::span<const double> values;

    std::size_t size() const { return cols.size(); }
  };

  SparseMatrix() = default;
  explicit SparseMatrix(std::size_t cols) : cols_(cols) {}

  /// Appends a row. Entries may be unsorted; duplicates are summed and zero
  /// sums dropped. Out-of-range columns and non-finite values throw
  /// std::invalid_argument.
  void push_row(std::vector<Entry> entries);

  std::size_t rows() const { return row_ptr_.size() - 1; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  RowView row(std::size_t r) const {
    const auto b = row_ptr_[r], e = row_ptr_[r + 1];
    return {std::span(col_idx_).subspan(b, e - b), std::span(values_).subspan(b, e - b)};
  }

  double at(std::size_t r, std::size_t c) const;
  std::vector<double> dense_row(std::size_t r) const;

  /// Row r dotted with a dense vector of length >= cols().
  double dot(std::size_t r, std::span<const double> dense) const;
  /// Row r of this dotted with row s of other.
  double dot(std::size_t r, const SparseMatrix& other, std::size_t s) const;

  SparseMatrix select_rows(std::span<const std::size_t> rows) const;

  /// Scales a row in place by `factor` (must be nonzero and finite).
  void scale_row(std::size_t r, double factor);

  bool operator==(const SparseMatrix&) const = default;

 private:
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_idx_;
  std::vector<double> values_;
};

/// Coordinate text format: a header line "rows cols nnz", then one
/// "row col value" line per entry, values written round-trip exact.
void write_coordinate(std::ostream& out, const SparseMatrix& m);
SparseMatrix read_coordinate(std::istream& in);

}  // namespace payattr
