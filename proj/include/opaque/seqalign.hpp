#pragma once

#include <vector>

#include "opaque/bytes.hpp"
#include "opaque/prototype.hpp"

namespace opaque {

/// Needleman-Wunsch constants. Defaults: m = +1, d = -1, g = -1, x = 0.
struct ScoringConfig {
  double match = 1.0;
  double mismatch = -1.0;
  double gap = -1.0;
  double wildcard = 0.0;

  /// Throws InvalidConfig unless match > 0, mismatch < match and gap <= 0.
  void validate() const;

  friend bool operator==(const ScoringConfig&, const ScoringConfig&) = default;
};

struct Alignment {
  std::vector<Symbol> aligned_a;
  std::vector<Symbol> aligned_b;
  double score = 0.0;
};

/// Optimal global alignment with linear gaps. Traceback prefers the diagonal,
/// then a gap in b, then a gap in a.
Alignment global_align(ByteView a, ByteView b, const ScoringConfig& cfg = {});

/// Score of global_align(a, b) in linear memory.
double global_score(ByteView a, ByteView b, const ScoringConfig& cfg = {});

/// 1 - score / (m * max(|a|, |b|)), clamped to [0, 1]. Throws EmptyInput.
double distance(ByteView a, ByteView b, const ScoringConfig& cfg = {});

/// Removes GAP symbols from an aligned row.
ByteSequence degap(std::span<const Symbol> row);

/// Best global alignment score of a request against a weighted prototype.
/// Column scores: w_i*m on a literal match, w_i*d on a literal mismatch,
/// w_i*x on a wildcard (whatever it faces, a gap included). A literal
/// prototype position against a gap costs w_i*g. A request byte inserted
/// into the prototype costs mean(w)*g, or w_i*min(x, 0) when the slot
/// touches a wildcard i (the larger weight if both neighbours are).
/// Throws LengthMismatch when |weights| != |prototype|.
double weighted_score(const Prototype& prototype, const Weights& weights, ByteView request,
                      const ScoringConfig& cfg = {});

/// Cost of inserting one request byte into slot i (before prototype
/// position i), for i in 0..|prototype|.
std::vector<double> insertion_costs(const Prototype& prototype, const Weights& weights, const ScoringConfig& cfg = {});

/// Best achievable score: the prototype aligned against itself.
double max_score(const Prototype& prototype, const Weights& weights, const ScoringConfig& cfg = {});
/// Score of every position against a symbol equal to nothing in the prototype.
double min_score(const Prototype& prototype, const Weights& weights, const ScoringConfig& cfg = {});

struct RelativeDistance {
  double value = 1.0;
  /// Set when max_score == min_score (all-wildcard or empty prototype); value is then 1.
  bool degenerate = false;
};

/// d_rel = 1 - (s - s_min) / (s_max - s_min), clamped to [0, 1]; 0 is a
/// perfect match.
RelativeDistance relative_distance(const Prototype& prototype, const Weights& weights,
                                   ByteView request, const ScoringConfig& cfg = {});

}  // namespace opaque
