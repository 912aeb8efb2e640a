#ifndef UKMEANS_PRUNERS_HPP
#define UKMEANS_PRUNERS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "ukmeans/expected_distance.hpp"
#include "ukmeans/geometry.hpp"

namespace ukm {

/// Clusters still possibly nearest (by expected distance) to every object
/// inside some box. Indices are kept in ascending order.
class CandidateSet {
 public:
  CandidateSet() = default;
  /// Throws std::invalid_argument if `alive` is empty or not strictly ascending.
  explicit CandidateSet(std::vector<std::size_t> alive);

  static CandidateSet all(std::size_t k);

  std::span<const std::size_t> alive() const { return alive_; }
  std::size_t size() const { return alive_.size(); }
  bool single() const { return alive_.size() == 1; }
  std::size_t front() const { return alive_.front(); }
  bool contains(std::size_t j) const;

  bool mmbb_ran() const { return mmbb_ran_; }
  bool vcp_ran() const { return vcp_ran_; }

 private:
  friend CandidateSet mmbb_prune(const Mbr&, std::span<const Point>, CandidateSet, EdCounters&);
  friend CandidateSet vcp_prune(const Mbr&, std::span<const Point>, CandidateSet, EdCounters&);

  std::vector<std::size_t> alive_;
  bool mmbb_ran_ = false;
  bool vcp_ran_ = false;
};

/// Min-max bounding-box pruning: drops every j with MinD(mbr, c_j) greater
/// than the smallest MaxD over the alive reps. Adds |alive| to cand_pairs.
/// A set with a single candidate is returned as is, uncounted.
CandidateSet mmbb_prune(const Mbr& mbr, std::span<const Point> reps, CandidateSet cand,
                        EdCounters& counters);

/// Voronoi-cell pruning: if the box lies strictly inside the cell of one
/// alive rep (cells taken over the alive reps only), returns just that rep;
/// otherwise returns `cand` unchanged. Adds |alive| to cand_pairs.
CandidateSet vcp_prune(const Mbr& mbr, std::span<const Point> reps, CandidateSet cand,
                       EdCounters& counters);

/// vcp_prune, then mmbb_prune if more than one candidate is left.
CandidateSet hybrid_prune(const Mbr& mbr, std::span<const Point> reps, CandidateSet cand,
                          EdCounters& counters);

/// True iff every point of the box is strictly closer to reps[owner] than to
/// reps[q] for each q in `others` (q == owner is skipped). Checks, per q, the
/// box corner extremal in direction reps[q] - reps[owner].
bool box_in_voronoi_cell(const Mbr& mbr, std::span<const Point> reps, std::size_t owner,
                         std::span<const std::size_t> others);

}  // namespace ukm

#endif  // UKMEANS_PRUNERS_HPP
