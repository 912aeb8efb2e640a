#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ukmeans/clustering.hpp"
#include "ukmeans/data_io.hpp"

using namespace ukm;

namespace {

UncertainObject point_object(std::size_t id, Point p) {
  return UncertainObject(id, DiscretePdf::single_cell(Mbr::of_point(p)));
}

Params small_params(std::uint64_t seed, std::size_t n = 100, std::size_t k = 8) {
  Params p;
  p.n = n;
  p.k = k;
  p.s = 16;
  p.l = 2.0;
  p.seed = seed;
  return p;
}

struct Trace {
  std::vector<std::vector<std::size_t>> assignments;
  std::vector<std::vector<Point>> reps;
};

RunResult traced_run(std::span<const UncertainObject> objs, const Params& p,
                     const AssignStrategy& strategy, Trace& trace) {
  RunOptions opts;
  opts.max_iters = p.max_iters;
  opts.move_tol = p.move_tol;
  opts.on_iteration = [&trace](const ClusterState& s) {
    trace.assignments.push_back(s.assignment);
    trace.reps.push_back(s.reps);
  };
  return run(objs, init_reps(p, p.seed), opts, strategy);
}

}  // namespace

TEST(Algorithm, Names) {
  for (auto a : {Algorithm::kBaseline, Algorithm::kMmbb, Algorithm::kVcp, Algorithm::kRmmVcp})
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  EXPECT_EQ(parse_algorithm("rmm_vcp"), Algorithm::kRmmVcp);
  EXPECT_FALSE(parse_algorithm("kmeans").has_value());
  EXPECT_TRUE(uses_tree(Algorithm::kRmmVcp));
  EXPECT_FALSE(uses_tree(Algorithm::kVcp));
}

TEST(InitReps, DeterministicAndInRange) {
  Params p;
  p.k = 3;
  p.d = 2;
  const auto a = init_reps(p, 42);
  EXPECT_EQ(a, init_reps(p, 42));
  EXPECT_NE(a, init_reps(p, 43));
  ASSERT_EQ(a.size(), 3u);
  for (const auto& r : a) {
    ASSERT_EQ(r.size(), 2u);
    for (double x : r) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 100.0);
    }
  }
  p.k = 1;
  EXPECT_EQ(init_reps(p, 1).size(), 1u);
  p.k = 0;
  EXPECT_THROW(init_reps(p, 1), std::invalid_argument);
}

TEST(Readjust, Examples) {
  std::vector<UncertainObject> objs{point_object(0, {0, 0}), point_object(1, {2, 2})};
  ClusterState state{{{9, 9}, {50, 50}}, {0, 0}, 0};
  const auto reps = readjust(objs, state);
  EXPECT_EQ(reps[0], (Point{1, 1}));
  EXPECT_EQ(reps[1], (Point{50, 50}));

  std::vector<UncertainObject> three{point_object(0, {0, 0}), point_object(1, {3, 0}),
                                     point_object(2, {0, 3})};
  ClusterState s3{{{7, 7}}, {0, 0, 0}, 0};
  const auto r3 = readjust(three, s3);
  EXPECT_NEAR(r3[0][0], 1.0, 1e-15);
  EXPECT_NEAR(r3[0][1], 1.0, 1e-15);
}

TEST(Run, SeparatedSingletonsConvergeFast) {
  std::vector<UncertainObject> objs{point_object(0, {0, 0}), point_object(1, {10, 10})};
  RunOptions opts;
  for (const auto& strategy : {AssignStrategy::baseline(), AssignStrategy::mmbb(),
                               AssignStrategy::vcp()}) {
    const auto r = run(objs, {{0.5, -0.3}, {9.0, 10.2}}, opts, strategy);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.iterations, 2u);
    EXPECT_EQ(r.final_state.assignment, (std::vector<std::size_t>{0, 1}));
    EXPECT_NEAR(r.objective, 0.0, 1e-20);
  }
}

TEST(Run, ConvergedAssignmentIsBruteForceArgmin) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = small_params(seed);
    const auto objs = generate(p);
    const auto r = run(objs, p, AssignStrategy::baseline());
    ASSERT_TRUE(r.converged);
    for (std::size_t i = 0; i < objs.size(); ++i) {
      // final reps moved less than move_tol in the last step
      const std::size_t best = oracle::argmin_ed(objs[i], r.final_state.reps);
      const double ed_best = oracle::expected_distance(objs[i], r.final_state.reps[best]);
      const double ed_own =
          oracle::expected_distance(objs[i], r.final_state.reps[r.final_state.assignment[i]]);
      EXPECT_LE(ed_own - ed_best, 1e-5);
    }
  }
}

TEST(Run, StrategiesAgreeEveryIteration) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const std::size_t n = seed % 2 ? 500 : 100;
    const std::size_t k = seed % 3 == 0 ? 16 : 8;
    auto p = small_params(seed, n, k);
    p.l = seed == 4 ? 20.0 : 2.0;
    const auto objs = generate(p);
    const auto tree = RStarTree::bulk_load(objs, p.b);

    Trace base_trace;
    const auto base = traced_run(objs, p, AssignStrategy::baseline(), base_trace);
    for (const auto& strategy :
         {AssignStrategy::mmbb(), AssignStrategy::vcp(), AssignStrategy::rmm_vcp(tree)}) {
      Trace t;
      const auto r = traced_run(objs, p, strategy, t);
      ASSERT_EQ(t.assignments, base_trace.assignments)
          << to_string(strategy.algorithm()) << " seed " << seed;
      ASSERT_EQ(t.reps, base_trace.reps);
      EXPECT_EQ(r.iterations, base.iterations);
      EXPECT_NEAR(r.objective, base.objective, 1e-9);
      EXPECT_LE(r.counters.ed_evals, base.counters.ed_evals);
    }
  }
}

TEST(Run, BaselineCountsExactly) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto p = small_params(seed, 120, 7);
    const auto objs = generate(p);
    const auto r = run(objs, p, AssignStrategy::baseline());
    EXPECT_EQ(r.counters.ed_evals, p.n * p.k * r.iterations);
    EXPECT_EQ(r.counters.cand_pairs, 0u);
    EXPECT_EQ(r.counters.iterations, r.iterations);
    EXPECT_EQ(r.objective_history.size(), r.iterations);
  }
}

TEST(Run, StopsAtMaxIters) {
  const auto p = small_params(3, 300, 12);
  const auto objs = generate(p);
  RunOptions opts;
  opts.max_iters = 2;
  const auto r = run(objs, init_reps(p, 3), opts, AssignStrategy::mmbb());
  EXPECT_EQ(r.iterations, 2u);
  EXPECT_FALSE(r.converged);
}

TEST(Run, DeterministicExceptTiming) {
  const auto p = small_params(9, 300, 10);
  const auto objs = generate(p);
  const auto tree = RStarTree::bulk_load(objs, p.b);
  for (const auto& strategy : {AssignStrategy::vcp(), AssignStrategy::rmm_vcp(tree)}) {
    const auto a = run(objs, p, strategy);
    const auto b = run(objs, p, strategy);
    EXPECT_EQ(a.final_state.assignment, b.final_state.assignment);
    EXPECT_EQ(a.final_state.reps, b.final_state.reps);
    EXPECT_EQ(a.counters, b.counters);
    EXPECT_EQ(a.objective_history, b.objective_history);
  }
}

TEST(Run, ThreadsMatchSerial) {
  const auto p = small_params(5, 800, 12);
  const auto objs = generate(p);
  const auto tree = RStarTree::bulk_load(objs, p.b);
  for (const auto& strategy : {AssignStrategy::baseline(), AssignStrategy::vcp(),
                               AssignStrategy::rmm_vcp(tree)}) {
    RunOptions serial;
    RunOptions threaded;
    threaded.threads = 3;
    const auto a = run(objs, init_reps(p, 5), serial, strategy);
    const auto b = run(objs, init_reps(p, 5), threaded, strategy);
    EXPECT_EQ(a.final_state.reps, b.final_state.reps);
    EXPECT_EQ(a.counters, b.counters);
  }
}

TEST(Run, EmptyClusterRepFrozen) {
  std::vector<UncertainObject> objs{point_object(0, {1, 1}), point_object(1, {2, 2})};
  RunOptions opts;
  const auto r = run(objs, {{1.5, 1.5}, {90, 90}}, opts, AssignStrategy::baseline());
  EXPECT_EQ(r.final_state.reps[1], (Point{90, 90}));
  EXPECT_EQ(r.final_state.assignment, (std::vector<std::size_t>{0, 0}));
}

TEST(Run, Errors) {
  const auto p = small_params(1, 50, 4);
  const auto objs = generate(p);
  RunOptions opts;
  std::vector<UncertainObject> none;
  EXPECT_THROW(run(none, init_reps(p, 1), opts, AssignStrategy::baseline()),
               std::invalid_argument);
  EXPECT_THROW(run(objs, {}, opts, AssignStrategy::baseline()), std::invalid_argument);
  EXPECT_THROW(run(objs, {{1, 2, 3}}, opts, AssignStrategy::baseline()), std::invalid_argument);
  RunOptions zero;
  zero.max_iters = 0;
  EXPECT_THROW(run(objs, init_reps(p, 1), zero, AssignStrategy::baseline()),
               std::invalid_argument);

  auto other_p = p;
  other_p.seed = 2;
  const auto other = generate(other_p);
  const auto stale = RStarTree::bulk_load(other, p.b);
  EXPECT_THROW(run(objs, init_reps(p, 1), opts, AssignStrategy::rmm_vcp(stale)),
               std::invalid_argument);
}

TEST(Objective, SumsSquaredAndPlainExpectedDistance) {
  const auto p = small_params(7, 60, 5);
  const auto objs = generate(p);
  const auto r = run(objs, p, AssignStrategy::baseline());
  double sq = 0.0;
  double plain = 0.0;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const double ed =
        oracle::expected_distance(objs[i], r.final_state.reps[r.final_state.assignment[i]]);
    sq += ed * ed;
    plain += ed;
  }
  EXPECT_NEAR(r.objective, sq, 1e-9 * sq);
  EXPECT_NEAR(r.objective_ed, plain, 1e-9 * plain);
}
