#ifndef UKMEANS_RSTAR_TREE_HPP
#define UKMEANS_RSTAR_TREE_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ukmeans/expected_distance.hpp"
#include "ukmeans/geometry.hpp"
#include "ukmeans/uncertain_object.hpp"

namespace ukm {

/// Leaf entry: one uncertain object. The pdf itself stays in the caller's
/// object array; `pdf_ref` is the object's position there.
struct LeafEntry {
  Mbr mbr;
  Point centroid;
  std::size_t pdf_ref = 0;
  std::size_t object_id = 0;
};

/// Internal entry: one child group with its object count and mean centroid.
struct InternalEntry {
  Mbr mbr;
  std::size_t count = 0;
  Point centroid;
  std::size_t child = 0;
};

struct TreeNode {
  std::size_t level = 0;  ///< 0 for leaves, height - 1 for the root
  std::vector<LeafEntry> objects;
  std::vector<InternalEntry> children;
  /// Range of this subtree's objects in RStarTree::object_order().
  std::size_t first = 0;
  std::size_t last = 0;

  bool is_leaf() const { return level == 0; }
  std::size_t entry_count() const { return is_leaf() ? objects.size() : children.size(); }
};

struct SubtreeAggregate {
  std::size_t count = 0;
  Point centroid;
};

SubtreeAggregate centroid_of_subtree(const LeafEntry& entry);
SubtreeAggregate centroid_of_subtree(const InternalEntry& entry);

// Byte cost of one entry: mbr (2m doubles) + centroid (m doubles) + two
// 8-byte fields (count + child ref, or pdf ref + id).
std::size_t leaf_entry_bytes(std::size_t dims);
std::size_t internal_entry_bytes(std::size_t dims);

struct TreeConfig {
  std::size_t leaf_fanout = 0;
  std::size_t internal_fanout = 0;

  /// floor(block / entry bytes) per node kind. Throws std::invalid_argument
  /// when a block cannot hold two entries.
  static TreeConfig from_block_size(std::size_t block_bytes, std::size_t dims);
};

/// Sort-Tile-Recursive packed R-tree over uncertain objects. Immutable once
/// built.
class RStarTree {
 public:
  /// Throws std::invalid_argument on an empty dataset or a fanout below 2.
  static RStarTree bulk_load(std::span<const UncertainObject> objects, std::size_t block_bytes);
  static RStarTree bulk_load(std::span<const UncertainObject> objects, TreeConfig config);

  const TreeNode& root() const { return nodes_[root_]; }
  const TreeNode& node(std::size_t i) const { return nodes_[i]; }
  std::size_t root_index() const { return root_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t leaf_count() const;
  std::size_t height() const { return root().level + 1; }
  std::size_t size() const { return order_.size(); }
  std::size_t dims() const { return dims_; }
  const TreeConfig& config() const { return config_; }

  /// Object positions in depth-first leaf order.
  std::span<const std::size_t> object_order() const { return order_; }
  std::span<const std::size_t> objects_under(const TreeNode& n) const;
  std::span<const std::size_t> objects_under(const InternalEntry& e) const;

  /// Aggregate over the whole tree: (n, mean of object centroids).
  SubtreeAggregate root_aggregate() const;

  /// True iff the tree was built over exactly this object array.
  bool indexes(std::span<const UncertainObject> objects) const;

  /// Every structural invariant violated, one message each. Empty when sound.
  std::vector<std::string> check_structure() const;

  /// One node per line: depth, kind, per-dimension lo..hi, count, centroid.
  void dump(std::ostream& os) const;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t root_ = 0;
  std::size_t dims_ = 0;
  TreeConfig config_;
  std::vector<std::size_t> order_;
  std::uint64_t fingerprint_ = 0;
};

/// Fingerprint of (id, box) over an object array; used for staleness checks.
std::uint64_t dataset_fingerprint(std::span<const UncertainObject> objects);

/// Result of one tree-driven assignment pass.
struct TreeAssignment {
  struct Group {
    std::size_t cluster;
    SubtreeAggregate aggregate;
  };
  std::vector<std::size_t> assignment;  ///< by object position
  std::vector<Group> groups;            ///< entries assigned wholesale
  std::vector<std::size_t> singles;     ///< objects resolved by ED argmin
};

struct TreeAssignOptions {
  bool verify = true;       ///< check the tree indexes `objects`
  std::size_t threads = 1;  ///< root entries are split across threads
};

/// Depth-first group pruning. Each entry gets a copy of its parent's
/// candidate set reduced by hybrid_prune on the entry box; a single survivor
/// is bulk-assigned to the whole subtree with no ED work. Objects reaching a
/// leaf with several candidates get the ED argmin over them (lowest index on
/// ties). Throws std::invalid_argument on a stale tree.
TreeAssignment cluster_assign_with_tree(const RStarTree& tree,
                                        std::span<const UncertainObject> objects,
                                        std::span<const Point> reps, EdCounters& counters,
                                        const TreeAssignOptions& options = {});

/// New reps from group aggregates plus individually resolved objects. Empty
/// clusters keep their previous rep.
std::vector<Point> readjust_from_aggregates(const TreeAssignment& result,
                                            std::span<const UncertainObject> objects,
                                            std::span<const Point> previous_reps);

}  // namespace ukm

#endif  // UKMEANS_RSTAR_TREE_HPP
