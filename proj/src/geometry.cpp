#include "ukmeans/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ukm {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sq = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double diff = a[t] - b[t];
    sq += diff * diff;
  }
  return sq;
}

double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

Mbr::Mbr(std::vector<double> lo, std::vector<double> hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.empty()) throw std::invalid_argument("Mbr: dimensionality must be >= 1");
  if (lo_.size() != hi_.size())
    throw std::invalid_argument("Mbr: lo/hi dimensionality mismatch");
  for (std::size_t t = 0; t < lo_.size(); ++t) {
    if (!(lo_[t] <= hi_[t]))
      throw std::invalid_argument("Mbr: lo > hi in dimension " + std::to_string(t));
  }
}

Mbr Mbr::of_point(std::span<const double> p) {
  return Mbr(Point(p.begin(), p.end()), Point(p.begin(), p.end()));
}

Point Mbr::center() const {
  Point c(dims());
  for (std::size_t t = 0; t < dims(); ++t) c[t] = 0.5 * (lo_[t] + hi_[t]);
  return c;
}

bool Mbr::contains(std::span<const double> p) const {
  if (p.size() != dims()) return false;
  for (std::size_t t = 0; t < dims(); ++t) {
    if (p[t] < lo_[t] || p[t] > hi_[t]) return false;
  }
  return true;
}

bool Mbr::contains(const Mbr& other) const {
  if (other.dims() != dims()) return false;
  for (std::size_t t = 0; t < dims(); ++t) {
    if (other.lo_[t] < lo_[t] || other.hi_[t] > hi_[t]) return false;
  }
  return true;
}

void Mbr::expand(const Mbr& other) {
  if (lo_.empty()) {
    *this = other;
    return;
  }
  if (other.dims() != dims()) throw std::invalid_argument("Mbr::expand: dimensionality mismatch");
  for (std::size_t t = 0; t < dims(); ++t) {
    if (other.lo_[t] < lo_[t]) lo_[t] = other.lo_[t];
    if (other.hi_[t] > hi_[t]) hi_[t] = other.hi_[t];
  }
}

}  // namespace ukm
