#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>

#include "opaque/emulator.hpp"
#include "opaque/protomodel.hpp"
#include "opaque/trace.hpp"

namespace opaque {

/// Exact-bytes replay: the recorded response of a byte-identical request, else nothing.
std::optional<ByteSequence> hash_lookup_responder(const TransactionLibrary& library, ByteView request);

/// Nearest recorded request by distance() (ties to the lowest index), with
/// its response passed through symmetric-field substitution.
/// Throws EmptyLibrary.
ByteSequence whole_library_responder(const TransactionLibrary& library, ByteView request,
                                     const ScoringConfig& cfg = {}, std::size_t min_field_length = 4);

enum class ResponderKind { Prototype, HashLookup, WholeLibrary };

const char* responder_name(ResponderKind kind) noexcept;
/// "prototype", "hash", "whole-library". Throws InvalidConfig.
ResponderKind parse_responder(const std::string& name);

class Responder {
 public:
  virtual ~Responder() = default;
  virtual std::optional<ByteSequence> respond(ByteView request) const = 0;
};

class PrototypeResponder final : public Responder {
 public:
  explicit PrototypeResponder(OpaqueServiceModel model) : model_(std::move(model)) {}
  std::optional<ByteSequence> respond(ByteView request) const override;
  const OpaqueServiceModel& model() const noexcept { return model_; }

 private:
  OpaqueServiceModel model_;
};

class HashLookupResponder final : public Responder {
 public:
  explicit HashLookupResponder(const TransactionLibrary& library);
  std::optional<ByteSequence> respond(ByteView request) const override;

 private:
  std::unordered_map<std::string, ByteSequence> table_;
};

/// Symmetric fields of every recorded transaction are found up front.
class WholeLibraryResponder final : public Responder {
 public:
  WholeLibraryResponder(TransactionLibrary library, ScoringConfig cfg = {}, std::size_t min_field_length = 4);
  std::optional<ByteSequence> respond(ByteView request) const override;

 private:
  TransactionLibrary library_;
  std::vector<std::vector<SymmetricField>> fields_;
  ScoringConfig cfg_;
};

std::unique_ptr<Responder> make_responder(ResponderKind kind, const TransactionLibrary& training,
                                          const BuildOptions& build, const DistanceCache& cache = {});

}  // namespace opaque
