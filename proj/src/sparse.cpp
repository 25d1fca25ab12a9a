#include "gkm/sparse.hpp"

#include <algorithm>

#include "gkm/error.hpp"

namespace gkm {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidLabel: return "InvalidLabel";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptyEdgeSet: return "EmptyEdgeSet";
    case ErrorKind::InvalidK: return "InvalidK";
    case ErrorKind::NoLabeledData: return "NoLabeledData";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::EdgeEnumerationTooLarge: return "EdgeEnumerationTooLarge";
    case ErrorKind::InfeasibleSigma: return "InfeasibleSigma";
    case ErrorKind::DisconnectedUnlabeled: return "DisconnectedUnlabeled";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::DegenerateSplit: return "DegenerateSplit";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

SparseVector::SparseVector(std::vector<SparseEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    if (entries_[k].index == 0)
      throw Error(ErrorKind::InvalidArgument, "feature indices are 1-based");
    if (k > 0 && entries_[k].index <= entries_[k - 1].index)
      throw Error(ErrorKind::InvalidArgument, "feature indices must be strictly increasing");
  }
}

SparseVector SparseVector::from_dense(std::span<const double> values) {
  std::vector<SparseEntry> entries;
  entries.reserve(values.size());
  for (std::size_t k = 0; k < values.size(); ++k)
    if (values[k] != 0.0) entries.push_back({static_cast<std::uint32_t>(k + 1), values[k]});
  SparseVector v;
  v.entries_ = std::move(entries);
  return v;
}

double SparseVector::at(std::uint32_t index) const noexcept {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const SparseEntry& e, std::uint32_t i) { return e.index < i; });
  return (it != entries_.end() && it->index == index) ? it->value : 0.0;
}

double squared_distance(const SparseVector& x, const SparseVector& y) noexcept {
  auto a = x.entries();
  auto b = y.entries();
  std::size_t i = 0;
  std::size_t j = 0;
  double sum = 0.0;
  // (p − q)² == (q − p)² in floating point, so the walk is order-symmetric.
  while (i < a.size() && j < b.size()) {
    if (a[i].index == b[j].index) {
      const double d = a[i].value - b[j].value;
      sum += d * d;
      ++i;
      ++j;
    } else if (a[i].index < b[j].index) {
      sum += a[i].value * a[i].value;
      ++i;
    } else {
      sum += b[j].value * b[j].value;
      ++j;
    }
  }
  for (; i < a.size(); ++i) sum += a[i].value * a[i].value;
  for (; j < b.size(); ++j) sum += b[j].value * b[j].value;
  return sum;
}

double dot(const SparseVector& x, const SparseVector& y) noexcept {
  auto a = x.entries();
  auto b = y.entries();
  std::size_t i = 0;
  std::size_t j = 0;
  double sum = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i].index == b[j].index) {
      sum += a[i].value * b[j].value;
      ++i;
      ++j;
    } else if (a[i].index < b[j].index) {
      ++i;
    } else {
      ++j;
    }
  }
  return sum;
}

}  // namespace gkm
