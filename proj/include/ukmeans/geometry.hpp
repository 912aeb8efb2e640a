#ifndef UKMEANS_GEOMETRY_HPP
#define UKMEANS_GEOMETRY_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace ukm {

/// A location in R^m (workspace units).
using Point = std::vector<double>;

/// Squared Euclidean distance. Both spans must have the same length.
double squared_distance(std::span<const double> a, std::span<const double> b);
double distance(std::span<const double> a, std::span<const double> b);

/// Axis-aligned box in R^m. Zero-width sides are allowed.
class Mbr {
 public:
  Mbr() = default;
  /// Throws std::invalid_argument on empty or mismatched bounds, or lo > hi.
  Mbr(std::vector<double> lo, std::vector<double> hi);

  static Mbr of_point(std::span<const double> p);

  std::size_t dims() const { return lo_.size(); }
  std::span<const double> lo() const { return lo_; }
  std::span<const double> hi() const { return hi_; }
  double lo(std::size_t t) const { return lo_[t]; }
  double hi(std::size_t t) const { return hi_[t]; }
  double side(std::size_t t) const { return hi_[t] - lo_[t]; }

  Point center() const;
  bool contains(std::span<const double> p) const;
  bool contains(const Mbr& other) const;

  /// Grows this box to cover `other`. An empty (default) box adopts `other`.
  void expand(const Mbr& other);

  friend bool operator==(const Mbr&, const Mbr&) = default;

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
};

}  // namespace ukm

#endif  // UKMEANS_GEOMETRY_HPP
