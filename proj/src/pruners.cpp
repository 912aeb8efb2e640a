#include "ukmeans/pruners.hpp"

#include <algorithm>
#include <stdexcept>

namespace ukm {

CandidateSet::CandidateSet(std::vector<std::size_t> alive) : alive_(std::move(alive)) {
  if (alive_.empty()) throw std::invalid_argument("CandidateSet: empty");
  for (std::size_t i = 1; i < alive_.size(); ++i) {
    if (alive_[i - 1] >= alive_[i])
      throw std::invalid_argument("CandidateSet: indices must be strictly ascending");
  }
}

CandidateSet CandidateSet::all(std::size_t k) {
  if (k == 0) throw std::invalid_argument("CandidateSet: k must be >= 1");
  std::vector<std::size_t> alive(k);
  for (std::size_t j = 0; j < k; ++j) alive[j] = j;
  return CandidateSet(std::move(alive));
}

bool CandidateSet::contains(std::size_t j) const {
  return std::binary_search(alive_.begin(), alive_.end(), j);
}

CandidateSet mmbb_prune(const Mbr& mbr, std::span<const Point> reps, CandidateSet cand,
                        EdCounters& counters) {
  cand.mmbb_ran_ = true;
  if (cand.alive_.size() <= 1) return cand;
  counters.cand_pairs += cand.alive_.size();

  double min_max = max_dist_sq(mbr, reps[cand.alive_.front()]);
  for (std::size_t i = 1; i < cand.alive_.size(); ++i)
    min_max = std::min(min_max, max_dist_sq(mbr, reps[cand.alive_[i]]));

  // The MinMaxD witness always survives since MinD <= MaxD for the same rep.
  std::erase_if(cand.alive_,
                [&](std::size_t j) { return min_dist_sq(mbr, reps[j]) > min_max; });
  return cand;
}

bool box_in_voronoi_cell(const Mbr& mbr, std::span<const Point> reps, std::size_t owner,
                         std::span<const std::size_t> others) {
  const Point& c = reps[owner];
  const std::size_t m = mbr.dims();
  for (std::size_t q : others) {
    if (q == owner) continue;
    const Point& cq = reps[q];
    // Farthest corner towards cq; the box is on c's side of the bisector
    // iff that corner is.
    double to_owner = 0.0;
    double to_other = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
      const double x = cq[t] > c[t] ? mbr.hi(t) : mbr.lo(t);
      const double a = x - c[t];
      const double b = x - cq[t];
      to_owner += a * a;
      to_other += b * b;
    }
    if (!(to_owner < to_other)) return false;
  }
  return true;
}

CandidateSet vcp_prune(const Mbr& mbr, std::span<const Point> reps, CandidateSet cand,
                       EdCounters& counters) {
  cand.vcp_ran_ = true;
  if (cand.alive_.size() <= 1) return cand;
  counters.cand_pairs += cand.alive_.size();

  // Cells are disjoint and the box center is in the box, so only the rep
  // strictly nearest to the center can own a containing cell.
  const Point center = mbr.center();
  std::size_t owner = cand.alive_.front();
  double best = squared_distance(center, reps[owner]);
  bool tied = false;
  for (std::size_t i = 1; i < cand.alive_.size(); ++i) {
    const std::size_t j = cand.alive_[i];
    const double sq = squared_distance(center, reps[j]);
    if (sq < best) {
      best = sq;
      owner = j;
      tied = false;
    } else if (sq == best) {
      tied = true;
    }
  }
  if (tied) return cand;
  if (box_in_voronoi_cell(mbr, reps, owner, cand.alive_)) cand.alive_.assign(1, owner);
  return cand;
}

CandidateSet hybrid_prune(const Mbr& mbr, std::span<const Point> reps, CandidateSet cand,
                          EdCounters& counters) {
  cand = vcp_prune(mbr, reps, std::move(cand), counters);
  if (cand.size() > 1) cand = mmbb_prune(mbr, reps, std::move(cand), counters);
  return cand;
}

}  // namespace ukm
