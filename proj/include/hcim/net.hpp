// net.hpp -- quantized network description and fixture IO.
//
// A network is a flat layer list over integer tensors.  Compute layers
// (conv, fc) carry int8 weights with a per-tensor scale and int32 biases
// at the accumulator scale; explicit quantize layers requantize the
// accumulator to the next activation scale.  Activations are unsigned
// 8-bit throughout (post-ReLU convention).
//
// Fixture formats (all integers little-endian):
//
//   images.bin   magic "HCIMIMG1", u32 count, u32 height, u32 width,
//                u32 channels, then count*h*w*c bytes of u8 pixels.
//   labels.bin   magic "HCIMLAB1", u32 count, then count bytes of u8.
//   weights.bin  magic "HCIMWTS1", u32 record count, then records of
//                u32 name_len, name bytes, u8 dtype (0 = int8,
//                1 = int32), u32 ndim, u32 dims[ndim], payload.
//   net.json     input geometry/scale, layer list, weight tensor names,
//                and the weights.bin file name (relative to net.json).
#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "hcim/core.hpp"

namespace hcim {

struct ConvLayer {
  std::string name;
  int in_ch = 0, out_ch = 0;
  int kernel = 0, stride = 1, pad = 0;
  QuantTensor weight;  // (out_ch, in_ch, kernel, kernel), int8 signed
  std::vector<int32_t> bias;
  double weight_scale = 1.0;
};

struct FcLayer {
  std::string name;
  int in_features = 0, out_features = 0;
  QuantTensor weight;  // (out_features, in_features), int8 signed
  std::vector<int32_t> bias;
  double weight_scale = 1.0;
};

struct ReluLayer {};

struct PoolLayer {  // max pool
  int size = 2;
  int stride = 2;
};

struct QuantizeLayer {
  int bits = 8;
  double scale = 1.0;
};

using Layer = std::variant<ConvLayer, FcLayer, ReluLayer, PoolLayer,
                           QuantizeLayer>;

struct NetDescription {
  int in_h = 0, in_w = 0, in_ch = 0;
  int input_bits = 8;
  double input_scale = 1.0;
  std::vector<Layer> layers;
};

// Throws ConfigError/ShapeError on inconsistent metadata.
void validate(const NetDescription& net);

NetDescription load_net(const std::string& json_path);

struct Dataset {
  int height = 0, width = 0, channels = 0;
  std::vector<std::vector<uint8_t>> images;
  std::vector<uint8_t> labels;
};

Dataset load_dataset(const std::string& images_path,
                     const std::string& labels_path);

}  // namespace hcim
