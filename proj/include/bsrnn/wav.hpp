#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "bsrnn/audio.hpp"

namespace bsrnn {

enum class WavEncoding { kPcm16, kPcm24, kFloat32 };

// Reads RIFF/WAVE with PCM 16/24-bit or IEEE float32 samples. Any malformed
// or truncated structure raises FormatError carrying the byte offset.
AudioTrack read_wav(const std::filesystem::path& path);
AudioTrack decode_wav(std::span<const std::uint8_t> bytes);

void write_wav(const std::filesystem::path& path, const AudioTrack& track,
               WavEncoding encoding = WavEncoding::kFloat32);
std::vector<std::uint8_t> encode_wav(const AudioTrack& track, WavEncoding encoding);

}  // namespace bsrnn
