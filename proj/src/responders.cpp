#include "opaque/responders.hpp"

#include <limits>

namespace opaque {

std::optional<ByteSequence> hash_lookup_responder(const TransactionLibrary& library, ByteView request) {
  for (const auto& t : library) {
    if (std::equal(t.request.begin(), t.request.end(), request.begin(), request.end())) return t.response;
  }
  return std::nullopt;
}

namespace {

std::size_t nearest_request(const TransactionLibrary& library, ByteView request, const ScoringConfig& cfg) {
  if (library.empty()) throw Error(ErrorCode::EmptyLibrary, "whole-library lookup on an empty library");
  if (request.empty()) throw Error(ErrorCode::EmptyRequest, "empty request");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < library.size(); ++i) {
    const double d = distance(request, library[i].request, cfg);
    if (d < best_d || (d == best_d && library[i].index < library[best].index)) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

}  // namespace

ByteSequence whole_library_responder(const TransactionLibrary& library, ByteView request,
                                     const ScoringConfig& cfg, std::size_t min_field_length) {
  const auto& t = library[nearest_request(library, request, cfg)];
  const auto fields = find_symmetric_fields(t.request, t.response, min_field_length);
  return substitute_fields(t, fields, request, cfg);
}

const char* responder_name(ResponderKind kind) noexcept {
  switch (kind) {
    case ResponderKind::Prototype: return "prototype";
    case ResponderKind::HashLookup: return "hash";
    case ResponderKind::WholeLibrary: return "whole-library";
  }
  return "?";
}

ResponderKind parse_responder(const std::string& name) {
  if (name == "prototype") return ResponderKind::Prototype;
  if (name == "hash") return ResponderKind::HashLookup;
  if (name == "whole-library") return ResponderKind::WholeLibrary;
  throw Error(ErrorCode::InvalidConfig, "unknown responder '" + name + "'");
}

std::optional<ByteSequence> PrototypeResponder::respond(ByteView request) const {
  if (request.empty()) return std::nullopt;
  return emulate(model_, request).response;
}

HashLookupResponder::HashLookupResponder(const TransactionLibrary& library) {
  for (const auto& t : library) table_.try_emplace(to_string(t.request), t.response);
}

std::optional<ByteSequence> HashLookupResponder::respond(ByteView request) const {
  auto it = table_.find(to_string(request));
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

WholeLibraryResponder::WholeLibraryResponder(TransactionLibrary library, ScoringConfig cfg,
                                             std::size_t min_field_length)
    : library_(std::move(library)), cfg_(cfg) {
  if (library_.empty()) throw Error(ErrorCode::EmptyLibrary, "whole-library responder needs transactions");
  fields_.reserve(library_.size());
  for (const auto& t : library_) fields_.push_back(find_symmetric_fields(t.request, t.response, min_field_length));
}

std::optional<ByteSequence> WholeLibraryResponder::respond(ByteView request) const {
  if (request.empty()) return std::nullopt;
  const auto i = nearest_request(library_, request, cfg_);
  return substitute_fields(library_[i], fields_[i], request, cfg_);
}

std::unique_ptr<Responder> make_responder(ResponderKind kind, const TransactionLibrary& training,
                                          const BuildOptions& build, const DistanceCache& cache) {
  switch (kind) {
    case ResponderKind::Prototype:
      return std::make_unique<PrototypeResponder>(build_model(training, build, cache));
    case ResponderKind::HashLookup:
      return std::make_unique<HashLookupResponder>(training);
    case ResponderKind::WholeLibrary:
      return std::make_unique<WholeLibraryResponder>(training, build.scoring, build.min_field_length);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown responder kind");
}

}  // namespace opaque
