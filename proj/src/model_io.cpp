#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include "opaque/protomodel.hpp"

namespace opaque {

namespace {

constexpr char kMagic[8] = {'O', 'P', 'Q', 'M', 'O', 'D', 'E', 'L'};

class Writer {
 public:
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(ByteView b) {
    u32(static_cast<std::uint32_t>(b.size()));
    buf_.insert(buf_.end(), b.begin(), b.end());
  }
  const std::vector<std::uint8_t>& data() const { return buf_; }

 private:
  void put(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(ByteView data) : data_(data) {}

  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  ByteSequence bytes() {
    const std::size_t n = u32();
    need(n);
    ByteSequence out(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
                     data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return out;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw Error(ErrorCode::CorruptModel, "truncated model payload");
  }
  std::uint64_t get(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= std::uint64_t{data_[pos_ + i]} << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  ByteView data_;
  std::size_t pos_ = 0;
};

std::uint32_t checksum(ByteView payload) {
  uLong crc = crc32(0L, Z_NULL, 0);
  return static_cast<std::uint32_t>(crc32(crc, payload.data(), static_cast<uInt>(payload.size())));
}

std::vector<std::uint8_t> encode_payload(const OpaqueServiceModel& model) {
  Writer w;
  w.f64(model.scoring.match);
  w.f64(model.scoring.mismatch);
  w.f64(model.scoring.gap);
  w.f64(model.scoring.wildcard);
  w.f64(model.threshold);
  w.u32(model.min_field_length);
  w.u32(static_cast<std::uint32_t>(model.nodes.size()));
  for (const auto& node : model.nodes) {
    w.u32(node.cluster_id);
    w.u32(static_cast<std::uint32_t>(node.members.size()));
    for (auto m : node.members) w.u64(m);
    w.u32(static_cast<std::uint32_t>(node.prototype.size()));
    for (Symbol s : node.prototype.symbols) w.u16(s);
    for (double v : node.weights.values) w.f64(v);
    w.u64(node.centroid.index);
    w.bytes(node.centroid.request);
    w.bytes(node.centroid.response);
    w.u32(static_cast<std::uint32_t>(node.fields.size()));
    for (const auto& f : node.fields) {
      w.u32(f.request_offset);
      w.u32(f.request_length);
      w.u32(f.response_offset);
      w.u32(f.response_length);
    }
  }
  return w.data();
}

OpaqueServiceModel decode_payload(ByteView payload) {
  Reader r(payload);
  OpaqueServiceModel model;
  model.scoring.match = r.f64();
  model.scoring.mismatch = r.f64();
  model.scoring.gap = r.f64();
  model.scoring.wildcard = r.f64();
  model.threshold = r.f64();
  model.min_field_length = r.u32();
  const std::uint32_t node_count = r.u32();
  for (std::uint32_t n = 0; n < node_count; ++n) {
    ModelNode node;
    node.cluster_id = r.u32();
    const std::uint32_t members = r.u32();
    for (std::uint32_t i = 0; i < members; ++i) node.members.push_back(r.u64());
    const std::uint32_t len = r.u32();
    for (std::uint32_t i = 0; i < len; ++i) node.prototype.symbols.push_back(r.u16());
    for (std::uint32_t i = 0; i < len; ++i) node.weights.values.push_back(r.f64());
    node.centroid.index = r.u64();
    node.centroid.request = r.bytes();
    node.centroid.response = r.bytes();
    const std::uint32_t fields = r.u32();
    for (std::uint32_t i = 0; i < fields; ++i) {
      SymmetricField f;
      f.request_offset = r.u32();
      f.request_length = r.u32();
      f.response_offset = r.u32();
      f.response_length = r.u32();
      node.fields.push_back(f);
    }
    model.nodes.push_back(std::move(node));
  }
  if (!r.done()) throw Error(ErrorCode::CorruptModel, "trailing bytes after model payload");
  return model;
}

}  // namespace

void write_model(const OpaqueServiceModel& model, std::ostream& out) {
  const auto payload = encode_payload(model);
  Writer header;
  header.u32(OpaqueServiceModel::kFormatVersion);
  header.u32(checksum(payload));
  header.u64(payload.size());
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(header.data().data()),
            static_cast<std::streamsize>(header.data().size()));
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
}

OpaqueServiceModel read_model(std::istream& in) {
  const std::vector<std::uint8_t> file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  constexpr std::size_t kHeader = sizeof kMagic + 4 + 4 + 8;
  if (file.size() < kHeader || std::memcmp(file.data(), kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorCode::CorruptModel, "not a model file");
  }
  Reader header(ByteView(file).subspan(sizeof kMagic, kHeader - sizeof kMagic));
  const std::uint32_t version = header.u32();
  const std::uint32_t crc = header.u32();
  const std::uint64_t length = header.u64();
  if (version != OpaqueServiceModel::kFormatVersion) {
    throw Error(ErrorCode::VersionMismatch, "model format version " + std::to_string(version) +
                                                ", expected " +
                                                std::to_string(OpaqueServiceModel::kFormatVersion));
  }
  if (file.size() - kHeader != length) throw Error(ErrorCode::CorruptModel, "payload length mismatch");
  const ByteView payload = ByteView(file).subspan(kHeader);
  if (checksum(payload) != crc) throw Error(ErrorCode::CorruptModel, "checksum mismatch");
  auto model = decode_payload(payload);
  model.validate();
  return model;
}

void save_model(const OpaqueServiceModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  write_model(model, out);
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

OpaqueServiceModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  return read_model(in);
}

}  // namespace opaque
