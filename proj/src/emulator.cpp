#include "opaque/emulator.hpp"

#include <algorithm>

namespace opaque {

MatchOutcome match_request(const OpaqueServiceModel& model, ByteView request) {
  if (request.empty()) throw Error(ErrorCode::EmptyRequest, "cannot match an empty request");
  if (model.nodes.empty()) throw Error(ErrorCode::CorruptModel, "model has no nodes");
  MatchOutcome out;
  out.distances.reserve(model.nodes.size());
  bool first = true;
  for (std::size_t i = 0; i < model.nodes.size(); ++i) {
    const auto& node = model.nodes[i];
    const auto d = relative_distance(node.prototype, node.weights, request, model.scoring);
    out.distances.push_back({node.cluster_id, d.value, d.degenerate});
    const bool better = d.value < out.chosen_distance ||
                        (d.value == out.chosen_distance && node.cluster_id < out.chosen);
    if (first || better) {
      out.chosen = node.cluster_id;
      out.chosen_distance = d.value;
      out.chosen_node = i;
      first = false;
    }
  }
  return out;
}

std::vector<SymmetricField> find_symmetric_fields(ByteView request, ByteView response, std::size_t min_length) {
  std::vector<SymmetricField> fields;
  if (request.empty() || response.empty()) return fields;
  min_length = std::max<std::size_t>(min_length, 1);
  const std::size_t n = request.size();
  const std::size_t m = response.size();
  std::vector<bool> taken(m, false);
  // run[i][j]: length of the common run ending at request[i-1], response[j-1]
  // using only untaken response bytes.
  std::vector<std::uint32_t> run((n + 1) * (m + 1));
  while (true) {
    std::size_t best_len = 0;
    std::size_t best_req = 0;
    std::size_t best_resp = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 1; j <= m; ++j) {
        std::uint32_t& cell = run[i * (m + 1) + j];
        cell = (!taken[j - 1] && request[i - 1] == response[j - 1]) ? run[(i - 1) * (m + 1) + j - 1] + 1 : 0;
        if (cell == 0) continue;
        const std::size_t req_start = i - cell;
        const std::size_t resp_start = j - cell;
        const bool better = cell > best_len ||
                            (cell == best_len && (resp_start < best_resp ||
                                                  (resp_start == best_resp && req_start < best_req)));
        if (better) {
          best_len = cell;
          best_req = req_start;
          best_resp = resp_start;
        }
      }
    }
    if (best_len < min_length) break;
    fields.push_back({static_cast<std::uint32_t>(best_req), static_cast<std::uint32_t>(best_len),
                      static_cast<std::uint32_t>(best_resp), static_cast<std::uint32_t>(best_len)});
    std::fill(taken.begin() + static_cast<std::ptrdiff_t>(best_resp),
              taken.begin() + static_cast<std::ptrdiff_t>(best_resp + best_len), true);
  }
  std::sort(fields.begin(), fields.end(),
            [](const auto& a, const auto& b) { return a.response_offset < b.response_offset; });
  return fields;
}

ByteSequence project_range(const Alignment& live_vs_centroid, std::size_t offset, std::size_t length) {
  ByteSequence out;
  if (length == 0) return out;
  const auto& live = live_vs_centroid.aligned_a;
  const auto& recorded = live_vs_centroid.aligned_b;
  const std::size_t last = offset + length - 1;
  std::size_t pos = 0;  // next centroid-request position
  bool inside = false;
  for (std::size_t col = 0; col < recorded.size(); ++col) {
    const bool has_recorded = recorded[col] != kGap;
    if (has_recorded && pos == offset) inside = true;
    if (inside && live[col] != kGap) out.push_back(static_cast<std::uint8_t>(live[col]));
    if (has_recorded) {
      if (pos == last) break;
      ++pos;
    }
  }
  return out;
}

ByteSequence substitute_fields(const Transaction& recorded, std::span<const SymmetricField> fields,
                               ByteView live_request, const ScoringConfig& cfg) {
  if (fields.empty()) return recorded.response;
  const auto alignment = global_align(live_request, recorded.request, cfg);
  std::vector<SymmetricField> ordered(fields.begin(), fields.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.response_offset < b.response_offset; });

  const auto& resp = recorded.response;
  ByteSequence out;
  out.reserve(resp.size() + live_request.size());
  std::size_t cursor = 0;
  for (const auto& f : ordered) {
    out.insert(out.end(), resp.begin() + static_cast<std::ptrdiff_t>(cursor),
               resp.begin() + static_cast<std::ptrdiff_t>(f.response_offset));
    auto projected = project_range(alignment, f.request_offset, f.request_length);
    if (projected.empty()) {
      out.insert(out.end(), resp.begin() + f.response_offset,
                 resp.begin() + f.response_offset + f.response_length);
    } else {
      out.insert(out.end(), projected.begin(), projected.end());
    }
    cursor = f.response_offset + f.response_length;
  }
  out.insert(out.end(), resp.begin() + static_cast<std::ptrdiff_t>(cursor), resp.end());
  return out;
}

ByteSequence generate_response(const ModelNode& node, ByteView live_request, const ScoringConfig& cfg) {
  return substitute_fields(node.centroid, node.fields, live_request, cfg);
}

Emulation emulate(const OpaqueServiceModel& model, ByteView request) {
  Emulation e;
  e.match = match_request(model, request);
  e.response = generate_response(model.nodes[e.match.chosen_node], request, model.scoring);
  return e;
}

}  // namespace opaque
