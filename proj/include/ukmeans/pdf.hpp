#ifndef UKMEANS_PDF_HPP
#define UKMEANS_PDF_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "ukmeans/geometry.hpp"

namespace ukm {

/// Probability masses on a regular grid over a box. Each cell's full mass
/// sits at the cell center. Cells are linearized row-major (last dimension
/// fastest).
///
/// Construction checks shape only (grid rank, cell count). Mass-level
/// invariants (non-negative, sum to 1) are checked by validate_dataset so
/// that malformed inputs can be diagnosed rather than rejected outright.
class DiscretePdf {
 public:
  DiscretePdf() = default;
  DiscretePdf(Mbr owner, std::vector<std::size_t> grid_dims, std::vector<double> masses);

  /// A single cell of mass 1 covering the whole box.
  static DiscretePdf single_cell(Mbr owner);

  const Mbr& owner_mbr() const { return owner_; }
  std::span<const std::size_t> grid_dims() const { return grid_dims_; }
  std::span<const double> masses() const { return masses_; }
  std::size_t size() const { return masses_.size(); }
  std::size_t dims() const { return owner_.dims(); }

  /// Throws std::out_of_range when cell >= size().
  Point cell_center(std::size_t cell) const;

  /// All cell centers, flattened as size() rows of dims() coordinates.
  std::span<const double> sample_points() const { return samples_; }

  double mass_sum() const;

  friend bool operator==(const DiscretePdf& a, const DiscretePdf& b) {
    return a.owner_ == b.owner_ && a.grid_dims_ == b.grid_dims_ && a.masses_ == b.masses_;
  }

 private:
  Mbr owner_;
  std::vector<std::size_t> grid_dims_;
  std::vector<double> masses_;
  std::vector<double> samples_;
};

/// Expected position: sum over cells of mass * cell center, clamped to the
/// owner box to absorb rounding.
Point object_centroid(const DiscretePdf& pdf);

/// Splits s cells into a grid over a box with the given side lengths: the
/// factorization of s into m factors with the smallest max/min ratio, larger
/// factors on longer sides (ties go to the lower dimension).
std::vector<std::size_t> grid_shape(std::size_t s, std::span<const double> side_lengths);

}  // namespace ukm

#endif  // UKMEANS_PDF_HPP
