#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "ukmeans/clustering.hpp"
#include "ukmeans/data_io.hpp"
#include "ukmeans/pruners.hpp"
#include "ukmeans/rstar_tree.hpp"

using namespace ukm;

namespace {

std::vector<UncertainObject> random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t m,
                                            double max_side = 2.0) {
  std::vector<UncertainObject> objs;
  for (std::size_t i = 0; i < n; ++i) objs.push_back(oracle::random_object(rng, i, m, max_side, 3));
  return objs;
}

std::size_t count_leaves(const RStarTree& t) {
  std::size_t leaves = 0;
  for (std::size_t i = 0; i < t.node_count(); ++i) leaves += t.node(i).is_leaf();
  return leaves;
}

std::size_t count_at_level(const RStarTree& t, std::size_t level) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < t.node_count(); ++i) c += t.node(i).level == level;
  return c;
}

std::vector<std::size_t> baseline_assignment(std::span<const UncertainObject> objs,
                                             const std::vector<Point>& reps) {
  std::vector<std::size_t> out;
  for (const auto& o : objs) out.push_back(oracle::argmin_ed(o, reps));
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += x + "; ";
  return s;
}

}  // namespace

TEST(TreeConfig, FanoutFromBlockSize) {
  EXPECT_EQ(leaf_entry_bytes(2), 64u);
  EXPECT_EQ(internal_entry_bytes(2), 64u);
  const auto cfg = TreeConfig::from_block_size(512, 2);
  EXPECT_EQ(cfg.leaf_fanout, 8u);
  EXPECT_EQ(cfg.internal_fanout, 8u);
  EXPECT_EQ(TreeConfig::from_block_size(512, 3).leaf_fanout, 512u / 88u);
  EXPECT_EQ(TreeConfig::from_block_size(128, 2).leaf_fanout, 2u);
  EXPECT_THROW(TreeConfig::from_block_size(127, 2), std::invalid_argument);
}

TEST(BulkLoad, TwentyFourObjectsFanoutThree) {
  std::mt19937_64 rng(1);
  const auto objs = random_dataset(rng, 24, 2);
  const auto tree = RStarTree::bulk_load(objs, TreeConfig{3, 3});
  EXPECT_EQ(count_leaves(tree), 8u);
  EXPECT_EQ(tree.leaf_count(), 8u);
  EXPECT_EQ(count_at_level(tree, 1), 3u);
  EXPECT_EQ(count_at_level(tree, 2), 1u);
  EXPECT_EQ(tree.height(), 3u);
  EXPECT_EQ(tree.node_count(), 12u);
  EXPECT_TRUE(tree.check_structure().empty()) << join(tree.check_structure());
}

TEST(BulkLoad, SingleObjectIsLeafRoot) {
  std::mt19937_64 rng(2);
  const auto objs = random_dataset(rng, 1, 2);
  const auto tree = RStarTree::bulk_load(objs, 512);
  EXPECT_EQ(tree.height(), 1u);
  EXPECT_TRUE(tree.root().is_leaf());
  EXPECT_EQ(tree.root().objects.size(), 1u);
  EXPECT_TRUE(tree.check_structure().empty());
}

TEST(BulkLoad, TwoThousandObjectsFanoutTen) {
  std::mt19937_64 rng(3);
  const auto objs = random_dataset(rng, 2000, 2);
  const auto tree = RStarTree::bulk_load(objs, TreeConfig{10, 10});
  EXPECT_EQ(tree.leaf_count(), 200u);
  EXPECT_EQ(tree.height(), 4u);
  EXPECT_EQ(tree.root_aggregate().count, 2000u);
  EXPECT_TRUE(tree.check_structure().empty()) << join(tree.check_structure());
}

TEST(BulkLoad, Errors) {
  std::vector<UncertainObject> none;
  EXPECT_THROW(RStarTree::bulk_load(none, 512), std::invalid_argument);
  std::mt19937_64 rng(4);
  const auto objs = random_dataset(rng, 10, 2);
  EXPECT_THROW(RStarTree::bulk_load(objs, 64), std::invalid_argument);
  EXPECT_THROW(RStarTree::bulk_load(objs, TreeConfig{1, 4}), std::invalid_argument);
}

TEST(BulkLoad, StructuralFuzz) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> nd(1, 400);
  std::uniform_int_distribution<std::size_t> fd(2, 12);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 1 + trial % 3;
    const auto objs = random_dataset(rng, nd(rng), m, trial % 5 == 0 ? 30.0 : 2.0);
    const TreeConfig cfg{fd(rng), fd(rng)};
    const auto tree = RStarTree::bulk_load(objs, cfg);
    const auto problems = tree.check_structure();
    ASSERT_TRUE(problems.empty()) << "trial " << trial << ": " << join(problems);
    ASSERT_EQ(tree.size(), objs.size());
    ASSERT_TRUE(tree.indexes(objs));

    // independent re-check: each object once, leaves uniform, child boxes inside parents
    std::multiset<std::size_t> seen;
    for (std::size_t i = 0; i < tree.node_count(); ++i) {
      const TreeNode& n = tree.node(i);
      if (n.is_leaf()) {
        for (const auto& e : n.objects) seen.insert(e.pdf_ref);
        continue;
      }
      for (const auto& e : n.children) {
        const TreeNode& child = tree.node(e.child);
        ASSERT_EQ(child.level + 1, n.level);
        std::size_t count = 0;
        if (child.is_leaf()) {
          for (const auto& le : child.objects) {
            ASSERT_TRUE(e.mbr.contains(le.mbr));
            ++count;
          }
        } else {
          for (const auto& ce : child.children) {
            ASSERT_TRUE(e.mbr.contains(ce.mbr));
            count += ce.count;
          }
        }
        ASSERT_EQ(count, e.count);
        ASSERT_LE(child.entry_count(), child.is_leaf() ? cfg.leaf_fanout : cfg.internal_fanout);
      }
    }
    ASSERT_EQ(seen.size(), objs.size());
    for (std::size_t i = 0; i < objs.size(); ++i) ASSERT_EQ(seen.count(i), 1u);
  }
}

TEST(BulkLoad, SubtreeRangesAreContiguous) {
  std::mt19937_64 rng(6);
  const auto objs = random_dataset(rng, 333, 2);
  const auto tree = RStarTree::bulk_load(objs, 512);
  for (std::size_t i = 0; i < tree.node_count(); ++i) {
    const TreeNode& n = tree.node(i);
    if (n.is_leaf()) {
      const auto under = tree.objects_under(n);
      ASSERT_EQ(under.size(), n.objects.size());
      for (std::size_t e = 0; e < n.objects.size(); ++e) ASSERT_EQ(under[e], n.objects[e].pdf_ref);
    } else {
      for (const auto& e : n.children) ASSERT_EQ(tree.objects_under(e).size(), e.count);
    }
  }
}

TEST(BulkLoad, CheckStructureCatchesCorruption) {
  std::mt19937_64 rng(7);
  const auto objs = random_dataset(rng, 50, 2);
  auto tree = RStarTree::bulk_load(objs, TreeConfig{4, 4});
  ASSERT_TRUE(tree.check_structure().empty());
  // a different dataset with the same size is detected as stale
  auto other = objs;
  other[3] = oracle::random_object(rng, 3, 2, 2.0);
  EXPECT_FALSE(tree.indexes(other));
  EXPECT_TRUE(tree.indexes(objs));
}

TEST(CentroidOfSubtree, Examples) {
  const UncertainObject o(0, DiscretePdf::single_cell(Mbr({0, 0}, {2, 4})));
  const LeafEntry leaf{o.mbr, o.centroid, 0, 0};
  const auto a = centroid_of_subtree(leaf);
  EXPECT_EQ(a.count, 1u);
  EXPECT_EQ(a.centroid, (Point{1, 2}));

  // two children (2,(1,1)) and (2,(3,3)) combine into (4,(2,2))
  std::vector<UncertainObject> objs;
  objs.emplace_back(0, DiscretePdf::single_cell(Mbr({1, 1}, {1, 1})));
  objs.emplace_back(1, DiscretePdf::single_cell(Mbr({1, 1}, {1, 1})));
  objs.emplace_back(2, DiscretePdf::single_cell(Mbr({3, 3}, {3, 3})));
  objs.emplace_back(3, DiscretePdf::single_cell(Mbr({3, 3}, {3, 3})));
  const auto tree = RStarTree::bulk_load(objs, TreeConfig{2, 2});
  ASSERT_EQ(tree.height(), 2u);
  std::vector<SubtreeAggregate> kids;
  for (const auto& e : tree.root().children) kids.push_back(centroid_of_subtree(e));
  ASSERT_EQ(kids.size(), 2u);
  EXPECT_EQ(kids[0].count, 2u);
  EXPECT_EQ(kids[1].count, 2u);
  std::set<Point> cents{kids[0].centroid, kids[1].centroid};
  EXPECT_EQ(cents, (std::set<Point>{{1, 1}, {3, 3}}));
  const auto root = tree.root_aggregate();
  EXPECT_EQ(root.count, 4u);
  EXPECT_NEAR(root.centroid[0], 2.0, 1e-12);
  EXPECT_NEAR(root.centroid[1], 2.0, 1e-12);
}

TEST(CentroidOfSubtree, RootMatchesFlatMean) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto objs = random_dataset(rng, 10 + trial * 37, 2);
    const auto tree = RStarTree::bulk_load(objs, 256 + 64 * (trial % 8));
    Point mean(2, 0.0);
    for (const auto& o : objs)
      for (std::size_t t = 0; t < 2; ++t) mean[t] += o.centroid[t];
    const auto agg = tree.root_aggregate();
    ASSERT_EQ(agg.count, objs.size());
    for (std::size_t t = 0; t < 2; ++t)
      ASSERT_NEAR(agg.centroid[t], mean[t] / static_cast<double>(objs.size()), 1e-9);
  }
}

TEST(TreeAssign, EquivalentToBaseline) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = 1 + trial % 3;
    const auto objs = random_dataset(rng, 50 + trial * 7, m, trial % 3 == 0 ? 10.0 : 2.0);
    const std::size_t k = 1 + trial % 16;
    const auto reps = oracle::random_points(rng, k, m);
    const auto tree = RStarTree::bulk_load(objs, TreeConfig{2 + std::size_t(trial % 9), 2 + std::size_t(trial % 7)});
    EdCounters c;
    const auto result = cluster_assign_with_tree(tree, objs, reps, c);
    ASSERT_EQ(result.assignment, baseline_assignment(objs, reps)) << "trial " << trial;
    ASSERT_LE(c.ed_evals, objs.size() * k);

    // groups plus singles cover every object exactly once
    std::size_t covered = result.singles.size();
    for (const auto& g : result.groups) covered += g.aggregate.count;
    ASSERT_EQ(covered, objs.size());
  }
}

TEST(TreeAssign, SingleClusterNeedsNoEd) {
  std::mt19937_64 rng(10);
  const auto objs = random_dataset(rng, 300, 2);
  const auto tree = RStarTree::bulk_load(objs, 512);
  EdCounters c;
  const auto result = cluster_assign_with_tree(tree, objs, std::vector<Point>{{50, 50}}, c);
  EXPECT_EQ(c.ed_evals, 0u);
  EXPECT_EQ(result.assignment, std::vector<std::size_t>(objs.size(), 0));
  ASSERT_EQ(result.groups.size(), 1u);
  EXPECT_EQ(result.groups[0].aggregate.count, objs.size());
}

TEST(TreeAssign, FarSubtreeBulkAssigned) {
  // two well separated blobs, one rep on each
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> jitter(-3, 3);
  std::vector<UncertainObject> objs;
  for (std::size_t i = 0; i < 64; ++i) {
    const double base = i < 32 ? 10.0 : 90.0;
    const double x = base + jitter(rng);
    const double y = base + jitter(rng);
    objs.emplace_back(i, DiscretePdf(Mbr({x, y}, {x + 1, y + 1}), {2, 2},
                                     std::vector<double>(4, 0.25)));
  }
  const auto tree = RStarTree::bulk_load(objs, 512);
  EdCounters c;
  const std::vector<Point> reps{{10, 10}, {90, 90}};
  const auto result = cluster_assign_with_tree(tree, objs, reps, c);
  EXPECT_EQ(c.ed_evals, 0u);
  EXPECT_TRUE(result.singles.empty());
  for (std::size_t i = 0; i < objs.size(); ++i) EXPECT_EQ(result.assignment[i], i < 32 ? 0u : 1u);
}

TEST(TreeAssign, StaleTreeAndEmptyRepsThrow) {
  std::mt19937_64 rng(12);
  const auto objs = random_dataset(rng, 40, 2);
  const auto tree = RStarTree::bulk_load(objs, 512);
  const auto other = random_dataset(rng, 40, 2);
  EdCounters c;
  const std::vector<Point> reps{{1, 1}, {2, 2}};
  EXPECT_THROW(cluster_assign_with_tree(tree, other, reps, c), std::invalid_argument);
  EXPECT_THROW(cluster_assign_with_tree(tree, objs, std::vector<Point>{}, c),
               std::invalid_argument);
}

TEST(TreeAssign, EdCountDominance) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Params p;
    p.n = 1500;
    p.k = 30;
    p.s = 16;
    p.seed = seed;
    const auto objs = generate(p);
    const auto reps = init_reps(p, seed);
    const auto tree = RStarTree::bulk_load(objs, 512);
    EdCounters tree_c;
    cluster_assign_with_tree(tree, objs, reps, tree_c);
    EdCounters flat_c;
    for (const auto& o : objs) {
      const auto cand = hybrid_prune(o.mbr, reps, CandidateSet::all(p.k), flat_c);
      if (!cand.single())
        for (std::size_t j : cand.alive()) expected_distance(o, reps[j], flat_c);
    }
    EXPECT_LE(tree_c.ed_evals, flat_c.ed_evals);
    EXPECT_LE(flat_c.ed_evals, p.n * p.k);
  }
}

TEST(TreeAssign, ThreadedMatchesSerial) {
  Params p;
  p.n = 3000;
  p.k = 20;
  p.s = 16;
  p.seed = 4;
  const auto objs = generate(p);
  const auto reps = init_reps(p, 4);
  const auto tree = RStarTree::bulk_load(objs, 512);
  EdCounters serial_c;
  EdCounters par_c;
  const auto serial = cluster_assign_with_tree(tree, objs, reps, serial_c);
  TreeAssignOptions opts;
  opts.threads = 4;
  const auto par = cluster_assign_with_tree(tree, objs, reps, par_c, opts);
  EXPECT_EQ(serial.assignment, par.assignment);
  EXPECT_EQ(serial_c, par_c);
  EXPECT_EQ(serial.singles, par.singles);
}

TEST(ReadjustFromAggregates, MatchesObjectReadjust) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 40; ++trial) {
    const auto objs = random_dataset(rng, 100 + trial * 13, 2);
    const std::size_t k = 1 + trial % 12;
    const auto reps = oracle::random_points(rng, k, 2);
    const auto tree = RStarTree::bulk_load(objs, 512);
    EdCounters c;
    const auto result = cluster_assign_with_tree(tree, objs, reps, c);
    ClusterState state{reps, result.assignment, 0};
    const auto from_objects = readjust(objs, state);
    const auto from_groups = readjust_from_aggregates(result, objs, reps);
    ASSERT_EQ(from_groups.size(), k);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t t = 0; t < 2; ++t) ASSERT_NEAR(from_groups[j][t], from_objects[j][t], 1e-9);
  }
}

TEST(Dump, OneLinePerNode) {
  std::mt19937_64 rng(15);
  const auto objs = random_dataset(rng, 24, 2);
  const auto tree = RStarTree::bulk_load(objs, TreeConfig{3, 3});
  std::ostringstream os;
  tree.dump(os);
  std::istringstream is(os.str());
  std::string line;
  std::size_t lines = 0;
  std::size_t leaves = 0;
  while (std::getline(is, line)) {
    ++lines;
    std::istringstream fields(line);
    std::size_t depth = 0;
    std::string kind;
    fields >> depth >> kind;
    if (lines == 1) {
      EXPECT_EQ(depth, 0u);
      EXPECT_EQ(kind, "internal");
      std::string x_range;
      std::string y_range;
      std::size_t count = 0;
      fields >> x_range >> y_range >> count;
      EXPECT_NE(x_range.find(".."), std::string::npos);
      EXPECT_EQ(count, 24u);
    }
    if (kind == "leaf") {
      ++leaves;
      EXPECT_EQ(depth, 2u);
    }
  }
  EXPECT_EQ(lines, tree.node_count());
  EXPECT_EQ(leaves, 8u);
}
