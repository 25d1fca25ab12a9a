#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace gkm {

struct SparseEntry {
  std::uint32_t index;  // 1-based feature index, as in LIBSVM files
  double value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Sparse feature vector with strictly increasing indices. Absent indices
/// are zero.
class SparseVector {
 public:
  SparseVector() = default;
  /// Throws Error(InvalidArgument) if indices are not strictly increasing
  /// or an index is zero.
  explicit SparseVector(std::vector<SparseEntry> entries);
  SparseVector(std::initializer_list<SparseEntry> entries)
      : SparseVector(std::vector<SparseEntry>(entries)) {}

  /// Dense values become entries 1..n; exact zeros are skipped.
  static SparseVector from_dense(std::span<const double> values);

  std::span<const SparseEntry> entries() const noexcept { return entries_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  /// Value at a 1-based index (0 when absent).
  double at(std::uint32_t index) const noexcept;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::vector<SparseEntry> entries_;
};

/// ‖x − y‖² by a merged walk over both index lists. The result is
/// bit-identical under argument swap.
double squared_distance(const SparseVector& x, const SparseVector& y) noexcept;

double dot(const SparseVector& x, const SparseVector& y) noexcept;

}  // namespace gkm
