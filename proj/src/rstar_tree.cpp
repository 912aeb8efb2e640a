#include "ukmeans/rstar_tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "ukmeans/pruners.hpp"

namespace ukm {

SubtreeAggregate centroid_of_subtree(const LeafEntry& entry) { return {1, entry.centroid}; }

SubtreeAggregate centroid_of_subtree(const InternalEntry& entry) {
  return {entry.count, entry.centroid};
}

std::size_t leaf_entry_bytes(std::size_t dims) { return 2 * dims * 8 + dims * 8 + 8 + 8; }

std::size_t internal_entry_bytes(std::size_t dims) { return 2 * dims * 8 + dims * 8 + 8 + 8; }

TreeConfig TreeConfig::from_block_size(std::size_t block_bytes, std::size_t dims) {
  if (dims == 0) throw std::invalid_argument("TreeConfig: dims must be >= 1");
  TreeConfig cfg{block_bytes / leaf_entry_bytes(dims), block_bytes / internal_entry_bytes(dims)};
  if (cfg.leaf_fanout < 2 || cfg.internal_fanout < 2)
    throw std::invalid_argument("block size " + std::to_string(block_bytes) +
                                " bytes holds fewer than 2 entries of " +
                                std::to_string(internal_entry_bytes(dims)) + " bytes");
  return cfg;
}

namespace {

struct PackItem {
  Mbr mbr;
  Point centroid;
  std::size_t count;
  std::size_t ref;
};

// Smallest S >= 1 with S^dims_left >= pages.
std::size_t slice_count(std::size_t pages, std::size_t dims_left) {
  auto covers = [&](std::size_t s) {
    double p = 1.0;
    for (std::size_t i = 0; i < dims_left; ++i) p *= static_cast<double>(s);
    return p >= static_cast<double>(pages);
  };
  auto s = static_cast<std::size_t>(
      std::ceil(std::pow(static_cast<double>(pages), 1.0 / static_cast<double>(dims_left))));
  s = std::max<std::size_t>(s, 1);
  while (s > 1 && covers(s - 1)) --s;
  while (!covers(s)) ++s;
  return s;
}

// Consecutive runs of at most `fanout`; a trailing run of one is rebalanced
// with its predecessor.
void chunk(std::span<const std::size_t> idx, std::size_t fanout,
           std::vector<std::vector<std::size_t>>& out) {
  std::vector<std::size_t> sizes;
  for (std::size_t left = idx.size(); left > 0;) {
    const std::size_t take = std::min(left, fanout);
    sizes.push_back(take);
    left -= take;
  }
  if (sizes.size() >= 2 && sizes.back() == 1) {
    const std::size_t total = sizes[sizes.size() - 2] + 1;
    sizes[sizes.size() - 2] = (total + 1) / 2;
    sizes.back() = total / 2;
  }
  std::size_t pos = 0;
  for (std::size_t sz : sizes) {
    out.emplace_back(idx.begin() + static_cast<std::ptrdiff_t>(pos),
                     idx.begin() + static_cast<std::ptrdiff_t>(pos + sz));
    pos += sz;
  }
}

void str_pack(std::vector<std::size_t> idx, const std::vector<PackItem>& items, std::size_t dim,
              std::size_t dims, std::size_t fanout, std::vector<std::vector<std::size_t>>& out) {
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double ka = items[a].centroid[dim];
    const double kb = items[b].centroid[dim];
    return ka < kb || (ka == kb && a < b);
  });
  const std::size_t dims_left = dims - dim;
  if (dims_left == 1 || idx.size() <= fanout) {
    chunk(idx, fanout, out);
    return;
  }
  const std::size_t pages = (idx.size() + fanout - 1) / fanout;
  const std::size_t slices = slice_count(pages, dims_left);
  const std::size_t per_slice = ((pages + slices - 1) / slices) * fanout;

  std::vector<std::pair<std::size_t, std::size_t>> bounds;
  for (std::size_t pos = 0; pos < idx.size(); pos += per_slice)
    bounds.emplace_back(pos, std::min(idx.size(), pos + per_slice));
  if (bounds.size() >= 2 && bounds.back().second - bounds.back().first == 1) {
    bounds[bounds.size() - 2].second = bounds.back().second;
    bounds.pop_back();
  }
  for (auto [from, to] : bounds) {
    str_pack(std::vector<std::size_t>(idx.begin() + static_cast<std::ptrdiff_t>(from),
                                      idx.begin() + static_cast<std::ptrdiff_t>(to)),
             items, dim + 1, dims, fanout, out);
  }
}

PackItem summarize(const std::vector<PackItem>& items, const std::vector<std::size_t>& group,
                   std::size_t node_index) {
  PackItem out{{}, Point(items[group.front()].centroid.size(), 0.0), 0, node_index};
  for (std::size_t i : group) {
    out.mbr.expand(items[i].mbr);
    out.count += items[i].count;
    for (std::size_t t = 0; t < out.centroid.size(); ++t)
      out.centroid[t] += static_cast<double>(items[i].count) * items[i].centroid[t];
  }
  for (double& c : out.centroid) c /= static_cast<double>(out.count);
  return out;
}

void mix(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
}

}  // namespace

std::uint64_t dataset_fingerprint(std::span<const UncertainObject> objects) {
  std::uint64_t h = 14695981039346656037ULL;
  const std::uint64_t n = objects.size();
  mix(h, &n, sizeof n);
  for (const auto& o : objects) {
    const std::uint64_t id = o.id;
    mix(h, &id, sizeof id);
    mix(h, o.mbr.lo().data(), o.mbr.dims() * sizeof(double));
    mix(h, o.mbr.hi().data(), o.mbr.dims() * sizeof(double));
  }
  return h;
}

RStarTree RStarTree::bulk_load(std::span<const UncertainObject> objects, std::size_t block_bytes) {
  if (objects.empty()) throw std::invalid_argument("bulk_load: empty dataset");
  return bulk_load(objects, TreeConfig::from_block_size(block_bytes, objects.front().dims()));
}

RStarTree RStarTree::bulk_load(std::span<const UncertainObject> objects, TreeConfig config) {
  if (objects.empty()) throw std::invalid_argument("bulk_load: empty dataset");
  if (config.leaf_fanout < 2 || config.internal_fanout < 2)
    throw std::invalid_argument("bulk_load: fanout must be >= 2");

  RStarTree tree;
  tree.config_ = config;
  tree.dims_ = objects.front().dims();
  tree.fingerprint_ = dataset_fingerprint(objects);

  std::vector<PackItem> items;
  items.reserve(objects.size());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (objects[i].dims() != tree.dims_)
      throw std::invalid_argument("bulk_load: mixed dimensionality");
    items.push_back({objects[i].mbr, objects[i].centroid, 1, i});
  }

  std::size_t level = 0;
  for (;;) {
    std::vector<std::size_t> idx(items.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<std::vector<std::size_t>> groups;
    const std::size_t fanout = level == 0 ? config.leaf_fanout : config.internal_fanout;
    str_pack(std::move(idx), items, 0, tree.dims_, fanout, groups);

    std::vector<PackItem> next;
    next.reserve(groups.size());
    for (const auto& group : groups) {
      TreeNode node;
      node.level = level;
      for (std::size_t i : group) {
        const PackItem& it = items[i];
        if (level == 0)
          node.objects.push_back({it.mbr, it.centroid, it.ref, objects[it.ref].id});
        else
          node.children.push_back({it.mbr, it.count, it.centroid, it.ref});
      }
      next.push_back(summarize(items, group, tree.nodes_.size()));
      tree.nodes_.push_back(std::move(node));
    }
    items = std::move(next);
    if (items.size() == 1) break;
    ++level;
  }
  tree.root_ = tree.nodes_.size() - 1;

  // Depth-first object order so every subtree owns a contiguous range.
  tree.order_.reserve(objects.size());
  auto number = [&tree](auto&& self, std::size_t ni) -> void {
    TreeNode& n = tree.nodes_[ni];
    n.first = tree.order_.size();
    if (n.is_leaf()) {
      for (const auto& e : n.objects) tree.order_.push_back(e.pdf_ref);
    } else {
      for (std::size_t c = 0; c < n.children.size(); ++c) self(self, tree.nodes_[ni].children[c].child);
    }
    tree.nodes_[ni].last = tree.order_.size();
  };
  number(number, tree.root_);
  return tree;
}

std::size_t RStarTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::span<const std::size_t> RStarTree::objects_under(const TreeNode& n) const {
  return std::span<const std::size_t>(order_).subspan(n.first, n.last - n.first);
}

std::span<const std::size_t> RStarTree::objects_under(const InternalEntry& e) const {
  return objects_under(nodes_[e.child]);
}

SubtreeAggregate RStarTree::root_aggregate() const {
  const TreeNode& r = root();
  SubtreeAggregate agg{0, Point(dims_, 0.0)};
  auto add = [&agg](const SubtreeAggregate& a) {
    agg.count += a.count;
    for (std::size_t t = 0; t < agg.centroid.size(); ++t)
      agg.centroid[t] += static_cast<double>(a.count) * a.centroid[t];
  };
  if (r.is_leaf()) {
    for (const auto& e : r.objects) add(centroid_of_subtree(e));
  } else {
    for (const auto& e : r.children) add(centroid_of_subtree(e));
  }
  for (double& c : agg.centroid) c /= static_cast<double>(agg.count);
  return agg;
}

bool RStarTree::indexes(std::span<const UncertainObject> objects) const {
  return objects.size() == order_.size() && dataset_fingerprint(objects) == fingerprint_;
}

std::vector<std::string> RStarTree::check_structure() const {
  std::vector<std::string> errors;
  auto fail = [&errors](std::size_t ni, const std::string& what) {
    errors.push_back("node " + std::to_string(ni) + ": " + what);
  };
  std::vector<std::size_t> seen(order_.size(), 0);

  auto visit = [&](auto&& self, std::size_t ni, std::size_t expected_level) -> void {
    const TreeNode& n = nodes_[ni];
    if (n.level != expected_level) fail(ni, "level mismatch (leaves at uneven depth)");
    const std::size_t entries = n.entry_count();
    const std::size_t fanout = n.is_leaf() ? config_.leaf_fanout : config_.internal_fanout;
    const std::size_t min_fill = ni == root_ ? 1 : (fanout >= 3 ? 2 : 1);
    if (entries > fanout) fail(ni, "entries exceed fanout");
    if (entries < min_fill) fail(ni, "underfull node");
    if (n.is_leaf()) {
      if (!n.children.empty()) fail(ni, "leaf holds child entries");
      for (const auto& e : n.objects) {
        if (e.pdf_ref >= seen.size()) {
          fail(ni, "object reference out of range");
          continue;
        }
        ++seen[e.pdf_ref];
        if (!e.mbr.contains(e.centroid)) fail(ni, "object centroid outside its box");
      }
      return;
    }
    if (!n.objects.empty()) fail(ni, "internal node holds leaf entries");
    if (n.level == 0) return;
    for (const auto& e : n.children) {
      const TreeNode& child = nodes_[e.child];
      std::size_t count = 0;
      Point sum(dims_, 0.0);
      auto absorb = [&](const Mbr& box, std::size_t c, const Point& centroid) {
        if (!e.mbr.contains(box)) fail(ni, "entry box does not contain a child box");
        count += c;
        for (std::size_t t = 0; t < dims_; ++t) sum[t] += static_cast<double>(c) * centroid[t];
      };
      if (child.is_leaf()) {
        for (const auto& ce : child.objects) absorb(ce.mbr, 1, ce.centroid);
      } else {
        for (const auto& ce : child.children) absorb(ce.mbr, ce.count, ce.centroid);
      }
      if (count != e.count) fail(ni, "entry count differs from child total");
      if (count > 0) {
        for (std::size_t t = 0; t < dims_; ++t) {
          if (std::abs(sum[t] / static_cast<double>(count) - e.centroid[t]) > 1e-9) {
            fail(ni, "entry centroid differs from weighted child mean");
            break;
          }
        }
      }
      if (child.last - child.first != e.count) fail(ni, "object range size differs from count");
      self(self, e.child, n.level - 1);
    }
  };
  visit(visit, root_, root().level);

  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i] != 1)
      errors.push_back("object " + std::to_string(i) + " indexed " + std::to_string(seen[i]) +
                       " times");
  }
  return errors;
}

void RStarTree::dump(std::ostream& os) const {
  auto emit = [&](const TreeNode& n, std::size_t depth) {
    Mbr box;
    SubtreeAggregate agg{0, Point(dims_, 0.0)};
    auto add = [&](const Mbr& b, const SubtreeAggregate& a) {
      box.expand(b);
      agg.count += a.count;
      for (std::size_t t = 0; t < dims_; ++t)
        agg.centroid[t] += static_cast<double>(a.count) * a.centroid[t];
    };
    if (n.is_leaf()) {
      for (const auto& e : n.objects) add(e.mbr, centroid_of_subtree(e));
    } else {
      for (const auto& e : n.children) add(e.mbr, centroid_of_subtree(e));
    }
    os << depth << ' ' << (n.is_leaf() ? "leaf" : "internal");
    for (std::size_t t = 0; t < dims_; ++t) os << ' ' << box.lo(t) << ".." << box.hi(t);
    os << ' ' << agg.count;
    for (std::size_t t = 0; t < dims_; ++t)
      os << ' ' << agg.centroid[t] / static_cast<double>(agg.count);
    os << '\n';
  };
  auto walk = [&](auto&& self, std::size_t ni, std::size_t depth) -> void {
    const TreeNode& n = nodes_[ni];
    emit(n, depth);
    for (const auto& e : n.children) self(self, e.child, depth + 1);
  };
  walk(walk, root_, 0);
}

namespace {

struct TreeWalk {
  const RStarTree& tree;
  std::span<const UncertainObject> objects;
  std::span<const Point> reps;
  std::vector<std::size_t>& assignment;
  EdCounters counters;
  std::vector<TreeAssignment::Group> groups;
  std::vector<std::size_t> singles;

  void assign_object(const LeafEntry& e, const CandidateSet& q) {
    CandidateSet c = hybrid_prune(e.mbr, reps, q, counters);
    if (c.single()) {
      assignment[e.pdf_ref] = c.front();
      groups.push_back({c.front(), centroid_of_subtree(e)});
      return;
    }
    const UncertainObject& obj = objects[e.pdf_ref];
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = c.front();
    for (std::size_t j : c.alive()) {
      const double ed = expected_distance(obj, reps[j], counters);
      if (ed < best) {
        best = ed;
        arg = j;
      }
    }
    assignment[e.pdf_ref] = arg;
    singles.push_back(e.pdf_ref);
  }

  void process_child(const InternalEntry& e, const CandidateSet& q) {
    CandidateSet c = hybrid_prune(e.mbr, reps, q, counters);
    if (c.single()) {
      for (std::size_t obj : tree.objects_under(e)) assignment[obj] = c.front();
      groups.push_back({c.front(), centroid_of_subtree(e)});
      return;
    }
    visit(tree.node(e.child), c);
  }

  void visit(const TreeNode& node, const CandidateSet& q) {
    if (node.is_leaf()) {
      for (const auto& e : node.objects) assign_object(e, q);
    } else {
      for (const auto& e : node.children) process_child(e, q);
    }
  }
};

}  // namespace

TreeAssignment cluster_assign_with_tree(const RStarTree& tree,
                                        std::span<const UncertainObject> objects,
                                        std::span<const Point> reps, EdCounters& counters,
                                        const TreeAssignOptions& options) {
  if (reps.empty()) throw std::invalid_argument("cluster_assign_with_tree: no representatives");
  if (options.verify && !tree.indexes(objects))
    throw std::invalid_argument("cluster_assign_with_tree: tree was built over a different object set");

  TreeAssignment out;
  out.assignment.assign(objects.size(), 0);
  const CandidateSet all = CandidateSet::all(reps.size());
  const TreeNode& root = tree.root();

  if (all.single()) {
    out.groups.push_back({0, tree.root_aggregate()});
    return out;
  }

  const std::size_t threads = std::max<std::size_t>(1, options.threads);
  if (threads == 1 || root.is_leaf() || root.children.size() < 2) {
    TreeWalk walk{tree, objects, reps, out.assignment, {}, {}, {}};
    walk.visit(root, all);
    counters += walk.counters;
    out.groups = std::move(walk.groups);
    out.singles = std::move(walk.singles);
    return out;
  }

  // Contiguous blocks of root entries per worker; merged in block order so
  // the result matches the sequential walk exactly.
  const std::size_t entries = root.children.size();
  const std::size_t workers = std::min(threads, entries);
  std::vector<TreeWalk> walks;
  walks.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    walks.push_back(TreeWalk{tree, objects, reps, out.assignment, {}, {}, {}});
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t from = entries * w / workers;
      const std::size_t to = entries * (w + 1) / workers;
      pool.emplace_back([&, w, from, to] {
        for (std::size_t i = from; i < to; ++i) walks[w].process_child(root.children[i], all);
      });
    }
  }
  for (auto& w : walks) {
    counters += w.counters;
    out.groups.insert(out.groups.end(), w.groups.begin(), w.groups.end());
    out.singles.insert(out.singles.end(), w.singles.begin(), w.singles.end());
  }
  return out;
}

std::vector<Point> readjust_from_aggregates(const TreeAssignment& result,
                                            std::span<const UncertainObject> objects,
                                            std::span<const Point> previous_reps) {
  const std::size_t k = previous_reps.size();
  if (k == 0) return {};
  const std::size_t m = previous_reps.front().size();
  std::vector<Point> sums(k, Point(m, 0.0));
  std::vector<std::size_t> counts(k, 0);
  for (const auto& g : result.groups) {
    counts[g.cluster] += g.aggregate.count;
    for (std::size_t t = 0; t < m; ++t)
      sums[g.cluster][t] += static_cast<double>(g.aggregate.count) * g.aggregate.centroid[t];
  }
  for (std::size_t obj : result.singles) {
    const std::size_t j = result.assignment[obj];
    ++counts[j];
    for (std::size_t t = 0; t < m; ++t) sums[j][t] += objects[obj].centroid[t];
  }
  std::vector<Point> reps(previous_reps.begin(), previous_reps.end());
  for (std::size_t j = 0; j < k; ++j) {
    if (counts[j] == 0) continue;
    for (std::size_t t = 0; t < m; ++t) reps[j][t] = sums[j][t] / static_cast<double>(counts[j]);
  }
  return reps;
}

}  // namespace ukm
