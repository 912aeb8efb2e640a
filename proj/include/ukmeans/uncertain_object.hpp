#ifndef UKMEANS_UNCERTAIN_OBJECT_HPP
#define UKMEANS_UNCERTAIN_OBJECT_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ukmeans/geometry.hpp"
#include "ukmeans/pdf.hpp"

namespace ukm {

/// An object whose location is known only through a discretized PDF.
struct UncertainObject {
  UncertainObject() = default;
  /// Bounding box is taken from the pdf and the centroid is computed from it.
  UncertainObject(std::size_t id, DiscretePdf pdf);
  /// Raw construction with a caller-supplied centroid; see validate_dataset.
  UncertainObject(std::size_t id, DiscretePdf pdf, Point centroid);

  std::size_t id = 0;
  Mbr mbr;
  DiscretePdf pdf;
  Point centroid;

  std::size_t dims() const { return mbr.dims(); }

  friend bool operator==(const UncertainObject&, const UncertainObject&) = default;
};

/// Experiment parameters. Defaults are the paper's baseline configuration.
struct Params {
  std::size_t n = 20000;       ///< object count
  std::size_t k = 50;          ///< cluster count
  double l = 2.0;              ///< max MBR side length
  std::size_t s = 128;         ///< samples per object
  std::size_t d = 2;           ///< dimensions
  std::size_t b = 512;         ///< tree block size in bytes
  std::uint64_t seed = 1;
  std::size_t max_iters = 100;
  double move_tol = 1e-6;
};

/// Side of the cubic workspace [0, kWorkspaceExtent]^m.
inline constexpr double kWorkspaceExtent = 100.0;

/// Tolerance on the mass sum and centroid consistency checks.
inline constexpr double kMassTolerance = 1e-9;

struct Diagnostic {
  std::size_t object_id;
  std::string message;
};

/// Checks every object-level invariant plus dataset-wide consistency
/// (shared dimensionality, unique ids). Returns all violations; empty means ok.
std::vector<Diagnostic> validate_dataset(std::span<const UncertainObject> objects);

}  // namespace ukm

#endif  // UKMEANS_UNCERTAIN_OBJECT_HPP
