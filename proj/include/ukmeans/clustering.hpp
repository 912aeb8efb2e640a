#ifndef UKMEANS_CLUSTERING_HPP
#define UKMEANS_CLUSTERING_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ukmeans/expected_distance.hpp"
#include "ukmeans/geometry.hpp"
#include "ukmeans/rstar_tree.hpp"
#include "ukmeans/uncertain_object.hpp"

namespace ukm {

enum class Algorithm { kBaseline, kMmbb, kVcp, kRmmVcp };

/// "baseline", "mmbb", "vcp", "rmm-vcp".
std::string_view to_string(Algorithm algo);
/// Accepts the names above; "rmm_vcp" is also taken.
std::optional<Algorithm> parse_algorithm(std::string_view name);
bool uses_tree(Algorithm algo);

/// How objects are assigned each iteration.
///  - baseline: all k expected distances, argmin.
///  - mmbb:     per-object min-max box pruning, ED among survivors.
///  - vcp:      per-object Voronoi-cell pruning, then min-max pruning on
///              whatever containment did not settle.
///  - rmm_vcp:  group pruning down the tree (see cluster_assign_with_tree).
/// With a single surviving candidate no ED is computed.
class AssignStrategy {
 public:
  static AssignStrategy baseline() { return AssignStrategy(Algorithm::kBaseline, nullptr); }
  static AssignStrategy mmbb() { return AssignStrategy(Algorithm::kMmbb, nullptr); }
  static AssignStrategy vcp() { return AssignStrategy(Algorithm::kVcp, nullptr); }
  static AssignStrategy rmm_vcp(const RStarTree& tree) {
    return AssignStrategy(Algorithm::kRmmVcp, &tree);
  }

  Algorithm algorithm() const { return algo_; }
  const RStarTree* tree() const { return tree_; }

 private:
  AssignStrategy(Algorithm algo, const RStarTree* tree) : algo_(algo), tree_(tree) {}
  Algorithm algo_;
  const RStarTree* tree_;
};

struct ClusterState {
  std::vector<Point> reps;
  std::vector<std::size_t> assignment;  ///< cluster index per object position
  std::size_t iteration = 0;
};

struct RunOptions {
  std::size_t max_iters = 100;
  double move_tol = 1e-6;
  std::size_t threads = 1;
  /// Called after every iteration (outside the timed region).
  std::function<void(const ClusterState&)> on_iteration;
};

struct RunResult {
  ClusterState final_state;
  std::size_t iterations = 0;
  EdCounters counters;
  double objective = 0.0;     ///< sum of squared expected distances
  double objective_ed = 0.0;  ///< sum of expected distances
  std::vector<double> objective_history;
  bool converged = false;
  double total_ms = 0.0;      ///< assignment + readjust, all iterations
  double wall_time_per_iter_ms = 0.0;
};

/// k points uniform in the workspace, deterministic per seed.
/// Throws std::invalid_argument when k or d is 0.
std::vector<Point> init_reps(const Params& params, std::uint64_t seed);

/// Mean of member centroids per cluster, summed in object order. Empty
/// clusters keep their rep.
std::vector<Point> readjust(std::span<const UncertainObject> objects, const ClusterState& state);

/// Runs UK-means from init_reps(params, params.seed).
RunResult run(std::span<const UncertainObject> objects, const Params& params,
              const AssignStrategy& strategy);

/// Runs UK-means from the given reps. Stops once the assignment is unchanged
/// and no rep moved by move_tol or more, or after max_iters iterations.
/// Throws std::invalid_argument on an empty object set, missing reps, or a
/// tree that does not index `objects`.
RunResult run(std::span<const UncertainObject> objects, std::vector<Point> initial_reps,
              const RunOptions& options, const AssignStrategy& strategy);

/// Sum over objects of ED(o, c_h(o))^2 and of ED(o, c_h(o)); not counted.
std::pair<double, double> objective_of(std::span<const UncertainObject> objects,
                                       const ClusterState& state);

}  // namespace ukm

#endif  // UKMEANS_CLUSTERING_HPP
