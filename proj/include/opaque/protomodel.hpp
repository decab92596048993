#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "opaque/clusterer.hpp"
#include "opaque/msa.hpp"
#include "opaque/prototype.hpp"
#include "opaque/seqalign.hpp"
#include "opaque/trace.hpp"

namespace opaque {

/// Per-column symbol counts of a profile (GAP included).
struct OccurrenceTable {
  std::vector<std::map<Symbol, std::uint32_t>> columns;
  std::uint32_t rows = 0;
};

OccurrenceTable occurrence_table(const AlignmentProfile& profile);

/// Prototype plus, for every prototype symbol, the profile column it came from.
struct Consensus {
  Prototype prototype;
  std::vector<std::size_t> columns;
};

/// Consensus with wildcards and truncation. For each column the modal symbol
/// c (ties: smaller octet; GAP loses every tie) with relative frequency q:
///   c      if q >= f and c is an octet
///   (drop) if q >= 1/2 and c is GAP
///   ?      otherwise
/// Throws InvalidConfig unless 0.5 < f <= 1.
Consensus derive_consensus(const OccurrenceTable& table, double threshold);
inline Prototype consensus_prototype(const OccurrenceTable& table, double threshold) {
  return derive_consensus(table, threshold).prototype;
}

/// w = 1 / (1 + H), H the natural-log Shannon index of the column's symbol
/// distribution with GAP counted as a symbol.
Weights entropy_weights(const AlignmentProfile& profile, std::span<const std::size_t> columns);

/// A byte run shared by a transaction's request and response.
struct SymmetricField {
  std::uint32_t request_offset = 0;
  std::uint32_t request_length = 0;
  std::uint32_t response_offset = 0;
  std::uint32_t response_length = 0;

  friend bool operator==(const SymmetricField&, const SymmetricField&) = default;
};

struct ModelNode {
  std::uint32_t cluster_id = 0;
  std::vector<TransactionIndex> members;
  Prototype prototype;
  Weights weights;
  Transaction centroid;
  std::vector<SymmetricField> fields;

  friend bool operator==(const ModelNode&, const ModelNode&) = default;
};

/// The deployable emulation artifact.
struct OpaqueServiceModel {
  static constexpr std::uint32_t kFormatVersion = 1;

  std::vector<ModelNode> nodes;
  ScoringConfig scoring;
  double threshold = 0.8;
  std::uint32_t min_field_length = 4;

  /// Throws CorruptModel when an invariant does not hold.
  void validate() const;

  friend bool operator==(const OpaqueServiceModel&, const OpaqueServiceModel&) = default;
};

struct BuildOptions {
  std::size_t clusters = 0;  // required, no default
  double threshold = 0.8;
  ScoringConfig scoring;
  std::uint32_t min_field_length = 4;
  unsigned threads = 0;
};

/// Distance matrices precomputed over a superset of the library, keyed by
/// transaction index. Lets repeated builds on subsets skip pairwise alignment.
struct DistanceCache {
  const DistanceMatrix* responses = nullptr;
  const DistanceMatrix* requests = nullptr;
};

struct BuildDiagnostics {
  std::vector<std::string> warnings;
};

/// Offline analysis: response clustering, per-cluster request alignment,
/// consensus, entropy weights, centroid and symmetric fields.
/// Throws EmptyLibrary, BadK, InvalidConfig.
OpaqueServiceModel build_model(const TransactionLibrary& library, const BuildOptions& options,
                               const DistanceCache& cache = {}, BuildDiagnostics* diagnostics = nullptr);

// Model file: magic "OPQMODEL", u32 version, u32 CRC-32 of the payload,
// u64 payload length, payload. Little-endian. See docs/formats.md.
void write_model(const OpaqueServiceModel& model, std::ostream& out);
OpaqueServiceModel read_model(std::istream& in);
/// Throws IoFailure.
void save_model(const OpaqueServiceModel& model, const std::filesystem::path& path);
/// Throws IoFailure, VersionMismatch, CorruptModel.
OpaqueServiceModel load_model(const std::filesystem::path& path);

}  // namespace opaque
