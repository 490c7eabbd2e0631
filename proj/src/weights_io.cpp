#include "bsrnn/weights_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

#include "bsrnn/error.hpp"

namespace bsrnn {
namespace {

constexpr char kMagic[4] = {'B', 'S', 'R', 'W'};
constexpr std::uint8_t kDtypeF32 = 0;

class Writer {
 public:
  void u8(std::uint8_t v) { bytes.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes.insert(bytes.end(), s.begin(), s.end());
  }
  void f32s(const std::vector<float>& v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(v.data());
    bytes.insert(bytes.end(), p, p + v.size() * sizeof(float));
  }
  std::vector<std::uint8_t> bytes;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> b, std::size_t pos) : bytes_(b), pos_(pos) {}

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
    pos_ += 4;
    return v;
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return bytes_[pos_++];
  }
  std::string str(const char* what) {
    const std::uint32_t n = u32(what);
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void f32s(std::vector<float>& out, std::size_t count, const char* what) {
    if (count > (bytes_.size() - pos_) / sizeof(float)) throw FormatError(std::string("truncated ") + what, pos_);
    out.resize(count);
    std::memcpy(out.data(), bytes_.data() + pos_, count * sizeof(float));
    pos_ += count * sizeof(float);
  }
  std::size_t offset() const { return pos_; }

 private:
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) throw FormatError(std::string("truncated ") + what, pos_);
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
};

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in bounded pieces.
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t n = std::min<std::size_t>(bytes.size() - pos, 1U << 30);
    crc = crc32(crc, bytes.data() + pos, static_cast<uInt>(n));
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

ModelConfig config_from_header(const ContainerHeader& h) {
  ModelConfig config;
  config.scheme = compile_scheme(BandLedger::parse(h.ledger), kContainerSampleRate, kContainerFft, h.scheme_name);
  config.feature_dim = static_cast<int>(h.feature_dim);
  config.num_blocks = static_cast<int>(h.num_blocks);
  config.lstm_hidden = static_cast<int>(h.lstm_hidden);
  config.validate();
  return config;
}

}  // namespace

std::vector<std::uint8_t> encode_container(const ContainerHeader& header,
                                           std::span<const NamedTensor> tensors) {
  Writer w;
  w.bytes.insert(w.bytes.end(), kMagic, kMagic + 4);
  w.u32(kWeightFormatVersion);
  w.str(header.scheme_name);
  w.str(header.ledger);
  w.u32(header.feature_dim);
  w.u32(header.num_blocks);
  w.u32(header.lstm_hidden);
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    if (t.data.size() != t.numel()) {
      throw Error(ErrorCode::kTensorShape, "tensor '" + name + "' payload does not match its dims");
    }
    w.str(name);
    w.u8(kDtypeF32);
    w.u32(static_cast<std::uint32_t>(t.dims.size()));
    for (auto d : t.dims) w.u32(d);
    w.f32s(t.data);
  }
  w.u32(crc_of(std::span<const std::uint8_t>(w.bytes).subspan(4)));
  return std::move(w.bytes);
}

DecodedContainer decode_container(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "not a .bsrw file (bad magic)");
  }
  Reader r(bytes, 4);
  const std::uint32_t version = r.u32("version");
  if (version != kWeightFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch, "unsupported .bsrw version " + std::to_string(version) +
                                                 " (expected " + std::to_string(kWeightFormatVersion) + ")");
  }
  if (bytes.size() < 12) throw FormatError("truncated .bsrw file", bytes.size());
  const std::size_t body_end = bytes.size() - 4;
  const std::uint32_t stored = Reader(bytes, body_end).u32("checksum");
  const std::uint32_t actual = crc_of(bytes.subspan(4, body_end - 4));
  if (stored != actual) throw Error(ErrorCode::kChecksum, "checksum mismatch in .bsrw file");

  Reader body(bytes.first(body_end), 8);
  DecodedContainer out;
  out.header.scheme_name = body.str("scheme name");
  out.header.ledger = body.str("ledger");
  out.header.feature_dim = body.u32("feature dim");
  out.header.num_blocks = body.u32("block count");
  out.header.lstm_hidden = body.u32("lstm hidden");
  const std::uint32_t count = body.u32("tensor count");
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor nt;
    nt.first = body.str("tensor name");
    const std::size_t dtype_at = body.offset();
    if (body.u8("dtype") != kDtypeF32) throw FormatError("unsupported dtype for '" + nt.first + "'", dtype_at);
    const std::uint32_t ndim = body.u32("ndim");
    if (ndim > 8) throw FormatError("implausible rank for '" + nt.first + "'", dtype_at + 1);
    for (std::uint32_t d = 0; d < ndim; ++d) nt.second.dims.push_back(body.u32("dims"));
    body.f32s(nt.second.data, nt.second.numel(), "tensor payload");
    out.tensors.push_back(std::move(nt));
  }
  if (body.offset() != body_end) throw FormatError("trailing bytes before checksum", body.offset());
  return out;
}

std::vector<std::uint8_t> encode_weights(const ModelWeights& weights, const ModelConfig& config) {
  validate_weights(weights, config);
  ContainerHeader header{config.scheme.name, config.scheme.ledger.to_string(),
                         static_cast<std::uint32_t>(config.feature_dim),
                         static_cast<std::uint32_t>(config.num_blocks),
                         static_cast<std::uint32_t>(config.lstm_hidden)};
  std::vector<NamedTensor> ordered;
  for (const auto& spec : tensor_layout(config)) ordered.emplace_back(spec.name, weights.get(spec.name));
  return encode_container(header, ordered);
}

std::pair<ModelWeights, ModelConfig> decode_weights(std::span<const std::uint8_t> bytes) {
  DecodedContainer c = decode_container(bytes);
  ModelConfig config = config_from_header(c.header);
  ModelWeights weights;
  for (auto& [name, t] : c.tensors) {
    if (weights.contains(name)) throw Error(ErrorCode::kExtraTensor, "duplicate tensor '" + name + "'");
    weights.set(name, std::move(t));
  }
  validate_weights(weights, config);
  return {std::move(weights), std::move(config)};
}

void save_weights(const ModelWeights& weights, const ModelConfig& config, const std::filesystem::path& path) {
  write_file_bytes(path, encode_weights(weights, config));
}

std::pair<ModelWeights, ModelConfig> load_weights(const std::filesystem::path& path) {
  return decode_weights(read_file_bytes(path));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::vector<std::uint8_t> bytes(size);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  if (!in) throw Error(ErrorCode::kIo, "short read from " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

}  // namespace bsrnn
