#include "ukmeans/expected_distance.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ukm {

namespace {

void require_dims(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got)
    throw std::invalid_argument(std::string(what) + ": point has " + std::to_string(got) +
                                " coordinates, expected " + std::to_string(expected));
}

double ed_sum(const DiscretePdf& pdf, std::span<const double> y) {
  const auto pts = pdf.sample_points();
  const auto masses = pdf.masses();
  const std::size_t s = masses.size();
  const std::size_t m = pdf.dims();
  double acc = 0.0;
  if (m == 2) {
    const double y0 = y[0];
    const double y1 = y[1];
    for (std::size_t c = 0; c < s; ++c) {
      const double dx = pts[2 * c] - y0;
      const double dy = pts[2 * c + 1] - y1;
      acc += masses[c] * std::sqrt(dx * dx + dy * dy);
    }
    return acc;
  }
  for (std::size_t c = 0; c < s; ++c) {
    double sq = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
      const double diff = pts[c * m + t] - y[t];
      sq += diff * diff;
    }
    acc += masses[c] * std::sqrt(sq);
  }
  return acc;
}

}  // namespace

double expected_distance(const UncertainObject& obj, std::span<const double> y,
                         EdCounters& counters) {
  require_dims(obj.pdf.dims(), y.size(), "expected_distance");
  ++counters.ed_evals;
  return ed_sum(obj.pdf, y);
}

double expected_distance_uncounted(const UncertainObject& obj, std::span<const double> y) {
  require_dims(obj.pdf.dims(), y.size(), "expected_distance");
  return ed_sum(obj.pdf, y);
}

double min_dist_sq(const Mbr& mbr, std::span<const double> y) {
  require_dims(mbr.dims(), y.size(), "min_dist");
  double sq = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    double diff = 0.0;
    if (y[t] < mbr.lo(t))
      diff = mbr.lo(t) - y[t];
    else if (y[t] > mbr.hi(t))
      diff = y[t] - mbr.hi(t);
    sq += diff * diff;
  }
  return sq;
}

double max_dist_sq(const Mbr& mbr, std::span<const double> y) {
  require_dims(mbr.dims(), y.size(), "max_dist");
  double sq = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double a = std::abs(y[t] - mbr.lo(t));
    const double b = std::abs(y[t] - mbr.hi(t));
    const double far = a > b ? a : b;
    sq += far * far;
  }
  return sq;
}

double min_dist(const Mbr& mbr, std::span<const double> y) {
  return std::sqrt(min_dist_sq(mbr, y));
}

double max_dist(const Mbr& mbr, std::span<const double> y) {
  return std::sqrt(max_dist_sq(mbr, y));
}

MinMaxDist min_max_dist(const Mbr& mbr, std::span<const Point> reps) {
  if (reps.empty()) throw std::invalid_argument("min_max_dist: no representatives");
  MinMaxDist best{max_dist_sq(mbr, reps[0]), 0};
  for (std::size_t j = 1; j < reps.size(); ++j) {
    const double sq = max_dist_sq(mbr, reps[j]);
    if (sq < best.distance) best = {sq, j};
  }
  best.distance = std::sqrt(best.distance);
  return best;
}

}  // namespace ukm
