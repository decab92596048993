#include "opaque/protomodel.hpp"

#include <cmath>
#include <set>

#include "opaque/emulator.hpp"

namespace opaque {

OccurrenceTable occurrence_table(const AlignmentProfile& profile) {
  OccurrenceTable table;
  table.rows = static_cast<std::uint32_t>(profile.row_count());
  table.columns.resize(profile.length());
  for (const auto& row : profile.rows)
    for (std::size_t c = 0; c < row.size(); ++c) ++table.columns[c][row[c]];
  return table;
}

Consensus derive_consensus(const OccurrenceTable& table, double threshold) {
  if (!(threshold > 0.5 && threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "consensus threshold must lie in (0.5, 1]");
  }
  Consensus out;
  const double rows = static_cast<double>(table.rows);
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    const auto& counts = table.columns[c];
    // std::map iterates octets in ascending order with GAP (256) after them,
    // so a strict '>' gives ties to the smaller octet and never to GAP.
    Symbol mode = kGap;
    std::uint32_t top = 0;
    for (auto [sym, n] : counts) {
      if (n > top) {
        top = n;
        mode = sym;
      }
    }
    const double q = static_cast<double>(top) / rows;
    if (mode != kGap && q >= threshold) {
      out.prototype.symbols.push_back(mode);
      out.columns.push_back(c);
    } else if (mode == kGap && q >= 0.5) {
      continue;  // truncation
    } else {
      out.prototype.symbols.push_back(kWildcard);
      out.columns.push_back(c);
    }
  }
  return out;
}

Weights entropy_weights(const AlignmentProfile& profile, std::span<const std::size_t> columns) {
  Weights w;
  w.values.reserve(columns.size());
  const double rows = static_cast<double>(profile.row_count());
  std::map<Symbol, std::uint32_t> counts;
  for (std::size_t c : columns) {
    if (c >= profile.length()) throw std::out_of_range("weight column outside the profile");
    counts.clear();
    for (const auto& row : profile.rows) ++counts[row[c]];
    double h = 0.0;
    for (auto [sym, n] : counts) {
      const double q = static_cast<double>(n) / rows;
      h -= q * std::log(q);
    }
    w.values.push_back(1.0 / (1.0 + h));
  }
  return w;
}

void OpaqueServiceModel::validate() const {
  if (nodes.empty()) throw Error(ErrorCode::CorruptModel, "model has no nodes");
  std::set<std::uint32_t> ids;
  for (const auto& node : nodes) {
    if (!ids.insert(node.cluster_id).second) {
      throw Error(ErrorCode::CorruptModel, "duplicate cluster id " + std::to_string(node.cluster_id));
    }
    if (node.prototype.size() != node.weights.size()) {
      throw Error(ErrorCode::CorruptModel, "prototype/weights length mismatch");
    }
    for (Symbol s : node.prototype.symbols) {
      if (s == kGap || s > kWildcard) throw Error(ErrorCode::CorruptModel, "bad prototype symbol");
    }
    for (double v : node.weights.values) {
      if (!(v > 0.0 && v <= 1.0)) throw Error(ErrorCode::CorruptModel, "weight outside (0, 1]");
    }
    if (node.centroid.request.empty() || node.centroid.response.empty()) {
      throw Error(ErrorCode::CorruptModel, "centroid transaction is empty");
    }
    for (const auto& f : node.fields) {
      const bool ok =
          std::size_t{f.request_offset} + f.request_length <= node.centroid.request.size() &&
          std::size_t{f.response_offset} + f.response_length <= node.centroid.response.size();
      if (!ok) throw Error(ErrorCode::CorruptModel, "symmetric field out of range");
    }
  }
}

OpaqueServiceModel build_model(const TransactionLibrary& library, const BuildOptions& options,
                               const DistanceCache& cache, BuildDiagnostics* diagnostics) {
  if (library.empty()) throw Error(ErrorCode::EmptyLibrary, "cannot build a model from no transactions");
  options.scoring.validate();
  if (!(options.threshold > 0.5 && options.threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "consensus threshold must lie in (0.5, 1]");
  }
  if (options.clusters < 1 || options.clusters > library.size()) {
    throw Error(ErrorCode::BadK, "k = " + std::to_string(options.clusters) + " with " +
                                     std::to_string(library.size()) + " transactions");
  }
  std::vector<TransactionIndex> labels;
  labels.reserve(library.size());
  for (const auto& t : library) labels.push_back(t.index);

  const DistanceMatrix responses = cache.responses != nullptr
                                       ? cache.responses->restrict_to(labels)
                                       : response_distance_matrix(library, options.scoring, options.threads);
  const ClusterSet clusters = cluster(responses, options.clusters);

  OpaqueServiceModel model;
  model.scoring = options.scoring;
  model.threshold = options.threshold;
  model.min_field_length = options.min_field_length;

  for (std::size_t c = 0; c < clusters.clusters.size(); ++c) {
    const auto& cl = clusters.clusters[c];
    std::vector<ByteSequence> requests;
    requests.reserve(cl.members.size());
    for (auto idx : cl.members) requests.push_back(library.find(idx)->request);

    DistanceMatrix guide;
    if (cache.requests != nullptr) {
      guide = cache.requests->restrict_to(cl.members);
    } else {
      guide = pairwise_matrix(
          cl.members,
          [&](std::size_t i, std::size_t j) { return distance(requests[i], requests[j], options.scoring); },
          options.threads);
    }
    const auto profile = progressive_align(requests, guide, options.scoring);
    const auto consensus = derive_consensus(occurrence_table(profile), options.threshold);

    ModelNode node;
    node.cluster_id = static_cast<std::uint32_t>(c);
    node.members = cl.members;
    node.prototype = consensus.prototype;
    node.weights = entropy_weights(profile, consensus.columns);
    node.centroid = *library.find(cl.centroid);
    node.fields =
        find_symmetric_fields(node.centroid.request, node.centroid.response, options.min_field_length);
    if (node.prototype.empty() || node.prototype.all_wildcards()) {
      if (diagnostics != nullptr) {
        diagnostics->warnings.push_back("DegenerateCluster: cluster " + std::to_string(c) +
                                        " has no literal prototype symbols");
      }
    }
    model.nodes.push_back(std::move(node));
  }
  return model;
}

}  // namespace opaque
