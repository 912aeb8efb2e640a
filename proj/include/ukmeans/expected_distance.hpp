#ifndef UKMEANS_EXPECTED_DISTANCE_HPP
#define UKMEANS_EXPECTED_DISTANCE_HPP

#include <cstddef>
#include <cstdint>
#include <span>

#include "ukmeans/geometry.hpp"
#include "ukmeans/uncertain_object.hpp"

namespace ukm {

/// Work counters for one run. Parallel callers keep private copies and
/// merge them with operator+=.
struct EdCounters {
  std::uint64_t ed_evals = 0;    ///< full expected-distance evaluations
  std::uint64_t cand_pairs = 0;  ///< object/cluster pairs examined by pruners
  std::uint64_t iterations = 0;

  EdCounters& operator+=(const EdCounters& other) {
    ed_evals += other.ed_evals;
    cand_pairs += other.cand_pairs;
    iterations += other.iterations;
    return *this;
  }
  friend bool operator==(const EdCounters&, const EdCounters&) = default;
};

/// Sum over pdf cells of mass * d(cell center, y). Counts one evaluation.
/// Throws std::invalid_argument on dimension mismatch.
double expected_distance(const UncertainObject& obj, std::span<const double> y,
                         EdCounters& counters);

/// Same value, not counted. Used for objective bookkeeping only.
double expected_distance_uncounted(const UncertainObject& obj, std::span<const double> y);

// Closed-form box bounds. MinD clamps y into the box; MaxD goes to the
// farthest corner. The squared variants skip the sqrt for comparisons.
double min_dist(const Mbr& mbr, std::span<const double> y);
double max_dist(const Mbr& mbr, std::span<const double> y);
double min_dist_sq(const Mbr& mbr, std::span<const double> y);
double max_dist_sq(const Mbr& mbr, std::span<const double> y);

struct MinMaxDist {
  double distance;
  std::size_t index;
};

/// Smallest MaxD over all reps and the rep achieving it (lowest index on ties).
/// Throws std::invalid_argument when reps is empty.
MinMaxDist min_max_dist(const Mbr& mbr, std::span<const Point> reps);

}  // namespace ukm

#endif  // UKMEANS_EXPECTED_DISTANCE_HPP
