#include "ukmeans/clustering.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <stdexcept>
#include <thread>

#include "ukmeans/pruners.hpp"
#include "ukmeans/random.hpp"

namespace ukm {

std::string_view to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::kBaseline:
      return "baseline";
    case Algorithm::kMmbb:
      return "mmbb";
    case Algorithm::kVcp:
      return "vcp";
    case Algorithm::kRmmVcp:
      return "rmm-vcp";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  if (name == "baseline") return Algorithm::kBaseline;
  if (name == "mmbb") return Algorithm::kMmbb;
  if (name == "vcp") return Algorithm::kVcp;
  if (name == "rmm-vcp" || name == "rmm_vcp") return Algorithm::kRmmVcp;
  return std::nullopt;
}

bool uses_tree(Algorithm algo) { return algo == Algorithm::kRmmVcp; }

std::vector<Point> init_reps(const Params& params, std::uint64_t seed) {
  if (params.k == 0) throw std::invalid_argument("init_reps: k must be >= 1");
  if (params.d == 0) throw std::invalid_argument("init_reps: d must be >= 1");
  Rng rng(seed, kStreamInitReps);
  std::vector<Point> reps(params.k, Point(params.d));
  for (auto& rep : reps)
    for (double& x : rep) x = rng.uniform(0.0, kWorkspaceExtent);
  return reps;
}

std::vector<Point> readjust(std::span<const UncertainObject> objects, const ClusterState& state) {
  const std::size_t k = state.reps.size();
  std::vector<Point> reps = state.reps;
  if (k == 0) return reps;
  const std::size_t m = reps.front().size();
  std::vector<Point> sums(k, Point(m, 0.0));
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::size_t j = state.assignment[i];
    ++counts[j];
    for (std::size_t t = 0; t < m; ++t) sums[j][t] += objects[i].centroid[t];
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (counts[j] == 0) continue;
    for (std::size_t t = 0; t < m; ++t) reps[j][t] = sums[j][t] / static_cast<double>(counts[j]);
  }
  return reps;
}

std::pair<double, double> objective_of(std::span<const UncertainObject> objects,
                                       const ClusterState& state) {
  double squared = 0.0;
  double plain = 0.0;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const double ed = expected_distance_uncounted(objects[i], state.reps[state.assignment[i]]);
    squared += ed * ed;
    plain += ed;
  }
  return {squared, plain};
}

namespace {

std::size_t argmin_ed(const UncertainObject& obj, std::span<const Point> reps,
                      std::span<const std::size_t> candidates, EdCounters& counters) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = candidates.front();
  for (std::size_t j : candidates) {
    const double ed = expected_distance(obj, reps[j], counters);
    if (ed < best) {
      best = ed;
      arg = j;
    }
  }
  return arg;
}

std::size_t assign_one(const UncertainObject& obj, std::span<const Point> reps, Algorithm algo,
                       const CandidateSet& all, EdCounters& counters) {
  switch (algo) {
    case Algorithm::kBaseline:
      return argmin_ed(obj, reps, all.alive(), counters);
    case Algorithm::kMmbb: {
      const CandidateSet c = mmbb_prune(obj.mbr, reps, all, counters);
      return c.single() ? c.front() : argmin_ed(obj, reps, c.alive(), counters);
    }
    case Algorithm::kVcp: {
      const CandidateSet c = hybrid_prune(obj.mbr, reps, all, counters);
      return c.single() ? c.front() : argmin_ed(obj, reps, c.alive(), counters);
    }
    case Algorithm::kRmmVcp:
      break;
  }
  throw std::logic_error("assign_one: tree strategy has no per-object path");
}

std::vector<std::size_t> assign_per_object(std::span<const UncertainObject> objects,
                                           std::span<const Point> reps, Algorithm algo,
                                           std::size_t threads, EdCounters& counters) {
  const CandidateSet all = CandidateSet::all(reps.size());
  std::vector<std::size_t> assignment(objects.size());
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, objects.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < objects.size(); ++i)
      assignment[i] = assign_one(objects[i], reps, algo, all, counters);
    return assignment;
  }
  std::vector<EdCounters> local(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t from = objects.size() * w / workers;
      const std::size_t to = objects.size() * (w + 1) / workers;
      pool.emplace_back([&, w, from, to] {
        for (std::size_t i = from; i < to; ++i)
          assignment[i] = assign_one(objects[i], reps, algo, all, local[w]);
      });
    }
  }
  for (const auto& c : local) counters += c;
  return assignment;
}

}  // namespace

RunResult run(std::span<const UncertainObject> objects, const Params& params,
              const AssignStrategy& strategy) {
  RunOptions options;
  options.max_iters = params.max_iters;
  options.move_tol = params.move_tol;
  Params p = params;
  if (!objects.empty()) p.d = objects.front().dims();
  return run(objects, init_reps(p, params.seed), options, strategy);
}

RunResult run(std::span<const UncertainObject> objects, std::vector<Point> initial_reps,
              const RunOptions& options, const AssignStrategy& strategy) {
  if (objects.empty()) throw std::invalid_argument("run: empty object set");
  if (initial_reps.empty()) throw std::invalid_argument("run: no initial representatives");
  if (options.max_iters == 0) throw std::invalid_argument("run: max_iters must be >= 1");
  const std::size_t m = objects.front().dims();
  for (const auto& rep : initial_reps) {
    if (rep.size() != m)
      throw std::invalid_argument("run: representative dimensionality differs from the data");
  }
  const Algorithm algo = strategy.algorithm();
  if (algo == Algorithm::kRmmVcp) {
    if (strategy.tree() == nullptr) throw std::invalid_argument("run: rmm-vcp needs a tree");
    if (!strategy.tree()->indexes(objects))
      throw std::invalid_argument("run: tree was built over a different object set");
  }

  using Clock = std::chrono::steady_clock;
  RunResult result;
  ClusterState& state = result.final_state;
  state.reps = std::move(initial_reps);
  state.assignment.assign(objects.size(), std::numeric_limits<std::size_t>::max());

  for (std::size_t iter = 1; iter <= options.max_iters; ++iter) {
    const auto start = Clock::now();
    std::vector<std::size_t> assignment;
    if (algo == Algorithm::kRmmVcp) {
      TreeAssignOptions tree_options;
      tree_options.verify = false;
      tree_options.threads = options.threads;
      assignment = cluster_assign_with_tree(*strategy.tree(), objects, state.reps,
                                            result.counters, tree_options)
                       .assignment;
    } else {
      assignment = assign_per_object(objects, state.reps, algo, options.threads, result.counters);
    }
    const bool changed = assignment != state.assignment;
    state.assignment = std::move(assignment);
    std::vector<Point> reps = readjust(objects, state);
    const auto stop = Clock::now();
    result.total_ms += std::chrono::duration<double, std::milli>(stop - start).count();

    double max_move = 0.0;
    for (std::size_t j = 0; j < reps.size(); ++j)
      max_move = std::max(max_move, distance(reps[j], state.reps[j]));
    state.reps = std::move(reps);
    state.iteration = iter;
    ++result.counters.iterations;
    result.iterations = iter;

    const auto [squared, plain] = objective_of(objects, state);
    result.objective = squared;
    result.objective_ed = plain;
    result.objective_history.push_back(squared);
    if (options.on_iteration) options.on_iteration(state);

    if (!changed && max_move < options.move_tol) {
      result.converged = true;
      break;
    }
  }
  result.wall_time_per_iter_ms =
      result.iterations > 0 ? result.total_ms / static_cast<double>(result.iterations) : 0.0;
  return result;
}

}  // namespace ukm
