#include "bsrnn/wav.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace bsrnn {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

static_assert(std::endian::native == std::endian::little,
              "WAV codec assumes a little-endian host");

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void require(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw FormatError(std::string("truncated file while reading ") + what, pos_);
    }
  }

  std::uint16_t u16(const char* what) {
    require(2, what);
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }

  std::uint32_t u32(const char* what) {
    require(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
    pos_ += 4;
    return v;
  }

  std::string tag(const char* what) {
    require(4, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
    pos_ += 4;
    return s;
  }

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    require(n, what);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  void skip(std::size_t n, const char* what) { take(n, what); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct FormatChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
  std::uint16_t block_align = 0;
};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

std::int32_t quantize(float x, double scale, std::int32_t lo, std::int32_t hi) {
  const double q = std::floor(static_cast<double>(x) * scale + 0.5);
  if (q < lo) return lo;
  if (q > hi) return hi;
  return static_cast<std::int32_t>(q);
}

}  // namespace

AudioTrack decode_wav(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.tag("RIFF header") != "RIFF") throw FormatError("missing RIFF tag", 0);
  r.u32("RIFF size");
  if (r.tag("WAVE tag") != "WAVE") throw FormatError("missing WAVE tag", 8);

  FormatChunk fmt;
  bool have_fmt = false;
  std::span<const std::uint8_t> data;
  std::size_t data_offset = 0;
  std::size_t fmt_offset = 0;
  bool have_data = false;

  while (!have_data) {
    if (r.remaining() < 8) {
      throw FormatError(have_fmt ? "missing data chunk" : "missing fmt chunk", r.offset());
    }
    const std::size_t chunk_start = r.offset();
    const std::string id = r.tag("chunk id");
    const std::uint32_t size = r.u32("chunk size");
    if (id == "fmt ") {
      if (size < 16) throw FormatError("fmt chunk too small", chunk_start);
      fmt_offset = r.offset();
      auto body = r.take(size, "fmt chunk");
      ByteReader f(body);
      fmt.format = f.u16("format tag");
      fmt.channels = f.u16("channel count");
      fmt.sample_rate = f.u32("sample rate");
      f.u32("byte rate");
      fmt.block_align = f.u16("block align");
      fmt.bits = f.u16("bits per sample");
      if (fmt.format == kFormatExtensible) {
        if (size < 40) throw FormatError("extensible fmt chunk too small", chunk_start);
        f.u16("cb size");
        f.u16("valid bits");
        f.u32("channel mask");
        fmt.format = f.u16("sub format");
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw FormatError("data chunk before fmt chunk", chunk_start);
      data_offset = r.offset();
      data = r.take(size, "data chunk");
      have_data = true;
      break;
    } else {
      r.skip(size, "chunk body");
    }
    if ((size & 1U) != 0 && r.remaining() > 0) r.skip(1, "chunk padding");
  }

  if (fmt.channels == 0) throw FormatError("zero channels", fmt_offset + 2);
  if (fmt.sample_rate == 0) throw FormatError("zero sample rate", fmt_offset + 4);
  const bool pcm = fmt.format == kFormatPcm && (fmt.bits == 16 || fmt.bits == 24);
  const bool flt = fmt.format == kFormatFloat && fmt.bits == 32;
  if (!pcm && !flt) {
    throw FormatError("unsupported codec (format " + std::to_string(fmt.format) + ", " +
                          std::to_string(fmt.bits) + " bits)",
                      fmt_offset);
  }
  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  if (data.size() % frame_bytes != 0) {
    throw FormatError("data chunk size is not a whole number of frames", data_offset);
  }
  const std::size_t frames = data.size() / frame_bytes;

  AudioTrack track = AudioTrack::zeros(fmt.channels, frames, static_cast<int>(fmt.sample_rate));
  const std::uint8_t* p = data.data();
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < fmt.channels; ++c) {
      float v = 0.0f;
      if (flt) {
        std::memcpy(&v, p, 4);
      } else if (fmt.bits == 16) {
        const auto s = static_cast<std::int16_t>(p[0] | (p[1] << 8));
        v = static_cast<float>(s / 32768.0);
      } else {
        std::int32_t s = p[0] | (p[1] << 8) | (p[2] << 16);
        if (s & 0x800000) s -= 0x1000000;
        v = static_cast<float>(s / 8388608.0);
      }
      track.channels[c][i] = v;
      p += bytes_per_sample;
    }
  }
  return track;
}

AudioTrack read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

std::vector<std::uint8_t> encode_wav(const AudioTrack& track, WavEncoding encoding) {
  track.validate();
  const std::uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : encoding == WavEncoding::kPcm24 ? 24 : 32;
  const std::uint16_t format = encoding == WavEncoding::kFloat32 ? kFormatFloat : kFormatPcm;
  const auto channels = static_cast<std::uint16_t>(track.num_channels());
  const std::size_t frames = track.length();
  const std::uint16_t block_align = static_cast<std::uint16_t>(channels * bits / 8);
  const std::size_t data_bytes = frames * block_align;
  if (data_bytes > 0xFFFFFFFFULL - 36) {
    throw Error(ErrorCode::kInvalidArgument, "track too long for a RIFF file");
  }

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, static_cast<std::uint32_t>(36 + data_bytes));
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, format);
  put_u16(out, channels);
  put_u32(out, static_cast<std::uint32_t>(track.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(track.sample_rate) * block_align);
  put_u16(out, block_align);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, static_cast<std::uint32_t>(data_bytes));

  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const float v = track.channels[c][i];
      switch (encoding) {
        case WavEncoding::kFloat32: {
          std::uint32_t u;
          std::memcpy(&u, &v, 4);
          put_u32(out, u);
          break;
        }
        case WavEncoding::kPcm16:
          put_u16(out, static_cast<std::uint16_t>(quantize(v, 32768.0, -32768, 32767)));
          break;
        case WavEncoding::kPcm24: {
          const auto s = static_cast<std::uint32_t>(quantize(v, 8388608.0, -8388608, 8388607));
          out.push_back(static_cast<std::uint8_t>(s & 0xFF));
          out.push_back(static_cast<std::uint8_t>((s >> 8) & 0xFF));
          out.push_back(static_cast<std::uint8_t>((s >> 16) & 0xFF));
          break;
        }
      }
    }
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const AudioTrack& track, WavEncoding encoding) {
  const auto bytes = encode_wav(track, encoding);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

}  // namespace bsrnn
