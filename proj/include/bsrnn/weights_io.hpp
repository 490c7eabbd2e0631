#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bsrnn/model.hpp"

namespace bsrnn {

// `.bsrw` container, all integers little-endian:
//
//   "BSRW" | u32 version | str scheme_name | str ledger | u32 N | u32 blocks
//   | u32 H | u32 tensor_count | tensor* | u32 crc32
//   str    = u32 byte length + UTF-8
//   tensor = str name | u8 dtype (0 = f32) | u32 ndim | u32 dims[ndim]
//            | row-major f32 payload
//
// The CRC-32 covers every byte after the magic up to the checksum itself.
// Files describe 44.1 kHz / 2048-point models; the scheme is recompiled from
// the ledger string on load.
inline constexpr std::uint32_t kWeightFormatVersion = 1;
inline constexpr int kContainerSampleRate = 44100;
inline constexpr std::size_t kContainerFft = 2048;

struct ContainerHeader {
  std::string scheme_name;
  std::string ledger;
  std::uint32_t feature_dim = 0;
  std::uint32_t num_blocks = 0;
  std::uint32_t lstm_hidden = 0;
};

using NamedTensor = std::pair<std::string, Tensor>;

// Raw encoder: writes the tensors exactly as given, no config validation.
std::vector<std::uint8_t> encode_container(const ContainerHeader& header,
                                           std::span<const NamedTensor> tensors);

struct DecodedContainer {
  ContainerHeader header;
  std::vector<NamedTensor> tensors;
};
DecodedContainer decode_container(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_weights(const ModelWeights& weights, const ModelConfig& config);
std::pair<ModelWeights, ModelConfig> decode_weights(std::span<const std::uint8_t> bytes);

void save_weights(const ModelWeights& weights, const ModelConfig& config, const std::filesystem::path& path);
std::pair<ModelWeights, ModelConfig> load_weights(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace bsrnn
