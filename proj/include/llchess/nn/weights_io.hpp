#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "llchess/nn/network.hpp"

namespace llchess::nn {

// Binary weight file, all integers and floats little-endian:
//   "LLCWNET1"                     8-byte magic
//   u32 version (1)
//   u32 layer count
//   per layer: u32 in, u32 out, u8 activation tag, f32 dropout after this layer
//              (0 for the last), in*out f32 weights row-major, out f32 biases
//   u32 CRC-32 of every preceding byte
inline constexpr std::uint32_t kWeightFormatVersion = 1;

class WeightFileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string serialize_params(const NetworkParams<float>& net);
NetworkParams<float> deserialize_params(const std::string& bytes);

void save_params(const NetworkParams<float>& net, const std::filesystem::path& path);
NetworkParams<float> load_params(const std::filesystem::path& path);

}  // namespace llchess::nn
