#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "gkm/sparse.hpp"

namespace gkm {

/// Training set in semi-supervised layout: labeled points occupy positions
/// [0, l), unlabeled points [l, n).
///
/// `truth` keeps the known label of every point (0 when never known) so
/// hidden labels remain available for evaluation. `source_index` maps each
/// position back to the point's position in the original input.
struct Dataset {
  std::vector<SparseVector> points;
  std::vector<double> labels;  // size l; ±1 for classification
  std::vector<double> truth;   // size n
  std::vector<std::size_t> source_index;

  std::size_t size() const noexcept { return points.size(); }
  std::size_t labeled() const noexcept { return labels.size(); }
  std::size_t unlabeled() const noexcept { return points.size() - labels.size(); }

  std::span<const SparseVector> labeled_points() const noexcept {
    return std::span(points).first(labeled());
  }

  /// Throws Error(InvalidArgument) if sizes disagree.
  void validate() const;
};

/// Builds a dataset from per-point labels where 0 means unlabeled. Labeled
/// points are moved to the front with a stable permutation.
Dataset make_dataset(std::vector<SparseVector> points, std::span<const double> labels);

/// Dataset of just the unlabeled points, with their truth labels revealed.
/// Points whose truth is unknown (0) are dropped.
Dataset revealed_unlabeled(const Dataset& data);

/// Parses LIBSVM text: `label idx:val idx:val ...`. Labels must be -1, 0 or
/// +1 (0 marks an unlabeled point). Blank lines and lines starting with '#'
/// are skipped. Errors: ParseError (with line number), InvalidLabel.
Dataset read_libsvm(std::istream& in);
Dataset load_libsvm(const std::filesystem::path& path);

/// Writes points in their current order, 17 significant digits. Unlabeled
/// points are written with label 0.
void write_libsvm(std::ostream& out, const Dataset& data);
void save_libsvm(const std::filesystem::path& path, const Dataset& data);

/// Hides exactly round(fraction·n) labels chosen uniformly without
/// replacement. Requires a fully labeled input; fails with DegenerateSplit
/// if a class would lose every visible label.
Dataset hide_labels(const Dataset& data, double fraction, std::uint64_t seed);

/// Hides the labels of the listed points (1-based positions in the
/// original input, i.e. `source_index + 1`).
Dataset apply_mask(const Dataset& data, std::span<const std::size_t> hidden);
std::vector<std::size_t> read_mask(std::istream& in);

/// Two isotropic unit-variance Gaussians in `dim` dimensions with means
/// ±(separation/2)·e₁. Classes alternate (+1 at even positions), giving
/// ceil(n/2) positives and floor(n/2) negatives.
Dataset synth_two_gaussians(std::size_t n, std::size_t dim, double separation,
                            std::uint64_t seed);

}  // namespace gkm
