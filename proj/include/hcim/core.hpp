// core.hpp -- quantized tensors, bit-plane decomposition, grid partition.
//
// The macro evaluates a multi-bit MAC as a grid of 1-bit MACs.  For weight
// bit i and activation bit j the product carries significance 2^(i+j); the
// sum i+j is called the output order k.  A partition splits the w x a grid
// by order into four regions:
//
//   eval     k >= w+a-1-s            top s orders, always digital, feed the
//                                    saliency estimate
//   digital  k >= boundary, not eval exact bit-serial path
//   analog   boundary-window <= k < boundary
//            grouped per weight bit into contiguous activation runs of
//            length <= window, one DAC/ADC conversion per group
//   discard  k < boundary-window    dropped entirely
//
// Invariants: the four regions partition the grid exactly; every analog
// group is contiguous with length <= window; group count <= w.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "hcim/bitrow.hpp"
#include "hcim/errors.hpp"

namespace hcim {

// Round-half-up for non-negative quantizer inputs.
inline int64_t round_half_up(double x) {
  return static_cast<int64_t>(std::floor(x + 0.5));
}

// ===========================================================================
// Quantized tensors and bit planes
// ===========================================================================

// Flat integer tensor with quantization metadata.  values[n] must fit the
// declared width: [0, 2^bits) unsigned, [-2^(bits-1), 2^(bits-1)) signed.
struct QuantTensor {
  std::vector<int64_t> shape;
  std::vector<int32_t> values;
  int bits = 8;
  bool is_signed = false;
  double scale = 1.0;
};

// Throws RangeError when a value does not fit the declared width,
// ShapeError when shape and values disagree, ConfigError on bad metadata.
void validate(const QuantTensor& t);

QuantTensor make_quant_tensor(std::vector<int64_t> shape,
                              std::vector<int32_t> values, int bits,
                              bool is_signed, double scale = 1.0);

// Bit planes in LSB-first order: planes[b][n] is bit b of value n.
// msb_negative marks two's-complement semantics: the top plane carries
// weight -2^(bits-1) instead of +2^(bits-1).
struct BitPlanes {
  std::vector<std::vector<uint8_t>> planes;
  bool msb_negative = false;
};

BitPlanes decompose_bits(const QuantTensor& t);
std::vector<int32_t> recompose(const BitPlanes& p);

// Column-packed variant used on the macro hot path.  plane[b] holds bit b
// of every column.
struct PackedPlanes {
  std::vector<BitRow> plane;
  bool msb_negative = false;
  int cols = 0;
};

PackedPlanes pack_planes(const std::vector<int32_t>& values, int bits,
                         bool is_signed);

// ===========================================================================
// Grid partition
// ===========================================================================

struct Cell {
  int i = 0;  // weight bit
  int j = 0;  // activation bit
};

// Contiguous activation-bit run for one weight bit on the analog path.
// j range is inclusive; significance of the group is 2^(i + j_lo).
struct AnalogGroup {
  int i = 0;
  int j_lo = 0;
  int j_hi = 0;
};

struct Partition {
  int w = 0;
  int a = 0;
  int s = 0;
  int boundary = 0;
  int window = 4;
  std::vector<Cell> eval_cells;
  std::vector<Cell> digital_cells;
  std::vector<Cell> discard_cells;
  std::vector<AnalogGroup> analog_groups;
};

// Lowest order handled by the eval region (and the largest legal boundary).
inline int min_eval_order(int w, int a, int s) { return w + a - 1 - s; }

// Throws ConfigError on out-of-range parameters (boundary must lie in
// [0, w+a-1-s], window in [1, 4], s in [1, w+a-1]).
Partition partition_grid(int w, int a, int s, int boundary, int window = 4);

}  // namespace hcim
