#pragma once

#include <span>
#include <vector>

#include "opaque/clusterer.hpp"
#include "opaque/seqalign.hpp"

namespace opaque {

/// UPGMA guide tree. Nodes 0..n-1 are leaves (in input order); node n+t is
/// the t-th merge. The root is the last node.
struct GuideTree {
  struct Node {
    std::size_t left = 0;   // meaningful for internal nodes only
    std::size_t right = 0;
    double height = 0.0;    // 0 for leaves
    TransactionIndex label = 0;  // leaves only
  };
  std::vector<Node> nodes;
  std::size_t leaf_count = 0;

  bool is_leaf(std::size_t node) const noexcept { return node < leaf_count; }
  std::size_t root() const noexcept { return nodes.size() - 1; }
};

GuideTree build_guide_tree(std::span<const ByteSequence> sequences, const ScoringConfig& cfg = {});
/// Tree over a precomputed distance matrix; leaf labels are the matrix labels.
GuideTree build_guide_tree(const DistanceMatrix& distances);

/// Equal-length gap-padded rows; row r degaps to the sequence it came from.
struct AlignmentProfile {
  std::vector<std::vector<Symbol>> rows;
  std::vector<TransactionIndex> ids;

  std::size_t length() const noexcept { return rows.empty() ? 0 : rows.front().size(); }
  std::size_t row_count() const noexcept { return rows.size(); }

  static AlignmentProfile single(ByteView sequence, TransactionIndex id);
};

/// Profile-profile Needleman-Wunsch with sum-of-pairs column scores. Rows of
/// p come first, then rows of q. Existing gaps are never removed.
AlignmentProfile align_profiles(const AlignmentProfile& p, const AlignmentProfile& q,
                                const ScoringConfig& cfg = {});

/// Progressive alignment in guide-tree merge order. Row ids are input positions.
AlignmentProfile progressive_align(std::span<const ByteSequence> sequences,
                                   const ScoringConfig& cfg = {});
/// Uses a precomputed guide-tree distance matrix; `sequences[i]` belongs to
/// row i of `distances` and the resulting row ids are the matrix labels.
AlignmentProfile progressive_align(std::span<const ByteSequence> sequences,
                                   const DistanceMatrix& distances, const ScoringConfig& cfg = {});

}  // namespace opaque
