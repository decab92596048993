#pragma once

#include <functional>
#include <span>
#include <vector>

#include "opaque/seqalign.hpp"
#include "opaque/trace.hpp"

namespace opaque {

/// Symmetric n x n matrix with zero diagonal. Rows are labelled with the
/// transaction index (or any other caller-chosen id) they describe.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::vector<TransactionIndex> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return d_[i * labels_.size() + j]; }
  /// Sets (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double value) noexcept;

  std::span<const TransactionIndex> labels() const noexcept { return labels_; }
  TransactionIndex label(std::size_t i) const { return labels_[i]; }
  /// Row position of a label. Throws std::out_of_range when absent.
  std::size_t position_of(TransactionIndex label) const;

  /// Submatrix over the given labels, in the given order.
  DistanceMatrix restrict_to(std::span<const TransactionIndex> labels) const;

 private:
  std::vector<TransactionIndex> labels_;
  std::vector<double> d_;
};

/// Fills a matrix from a pairwise distance function, splitting rows across
/// `threads` workers (0 = hardware concurrency).
DistanceMatrix pairwise_matrix(std::vector<TransactionIndex> labels,
                               const std::function<double(std::size_t, std::size_t)>& dist,
                               unsigned threads = 0);

/// Entry (i, j) = distance(response_i, response_j). Throws EmptyLibrary.
DistanceMatrix response_distance_matrix(const TransactionLibrary& library,
                                        const ScoringConfig& cfg = {}, unsigned threads = 0);
/// Same over requests; the guide-tree input for request alignment.
DistanceMatrix request_distance_matrix(const TransactionLibrary& library,
                                       const ScoringConfig& cfg = {}, unsigned threads = 0);

/// One agglomeration step. Leaves are nodes 0..n-1; merge t creates node n+t.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double distance = 0.0;
  std::size_t size = 0;
};

/// Average-linkage agglomerative clustering over all n-1 merges. Among equal
/// minimal linkages the pair with the smallest (min node id, max node id) merges first.
std::vector<Merge> agglomerate_average(const DistanceMatrix& matrix);

struct Cluster {
  std::vector<TransactionIndex> members;  // ascending
  TransactionIndex centroid = 0;
};

struct ClusterSet {
  std::vector<Cluster> clusters;  // ordered by smallest member
};

/// Cuts the average-linkage hierarchy at k clusters. Throws BadK unless 1 <= k <= n.
ClusterSet cluster(const DistanceMatrix& matrix, std::size_t k);

/// Member with the smallest summed distance to the other members; ties go
/// to the lowest index.
TransactionIndex centroid(std::span<const TransactionIndex> members, const DistanceMatrix& matrix);

}  // namespace opaque
