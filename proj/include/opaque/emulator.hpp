#pragma once

#include <optional>
#include <vector>

#include "opaque/protomodel.hpp"

namespace opaque {

struct NodeDistance {
  std::uint32_t cluster_id = 0;
  double distance = 1.0;
  bool degenerate = false;
};

struct MatchOutcome {
  std::vector<NodeDistance> distances;  // one per model node, model order
  std::uint32_t chosen = 0;
  double chosen_distance = 1.0;
  std::size_t chosen_node = 0;  // position in model.nodes
};

/// Relative distance to every node; the minimum wins, ties to the lowest cluster id.
/// Throws EmptyRequest.
MatchOutcome match_request(const OpaqueServiceModel& model, ByteView request);

/// Maximal common substrings of length >= min_length, taken greedily
/// longest first, non-overlapping in the response, ties to the leftmost
/// response offset (then leftmost request offset).
std::vector<SymmetricField> find_symmetric_fields(ByteView request, ByteView response,
                                                  std::size_t min_length = 4);

/// Maps a centroid-request range onto the live request through a global
/// alignment of the two. Returns the live bytes spanned by the range,
/// including live bytes inserted inside it.
ByteSequence project_range(const Alignment& live_vs_centroid, std::size_t offset, std::size_t length);

/// Centroid response with every symmetric field replaced by the projected
/// live-request bytes. A field that projects to nothing keeps its recorded bytes.
ByteSequence substitute_fields(const Transaction& recorded, std::span<const SymmetricField> fields,
                               ByteView live_request, const ScoringConfig& cfg = {});

ByteSequence generate_response(const ModelNode& node, ByteView live_request, const ScoringConfig& cfg = {});

struct Emulation {
  MatchOutcome match;
  ByteSequence response;
};

/// match_request followed by generate_response on the chosen node.
Emulation emulate(const OpaqueServiceModel& model, ByteView request);

}  // namespace opaque
