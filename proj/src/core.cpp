#include "hcim/core.hpp"

#include <cmath>
#include <cstddef>
#include <string>

namespace hcim {

namespace {

int64_t element_count(const std::vector<int64_t>& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

}  // namespace

void validate(const QuantTensor& t) {
  if (t.bits < 1 || t.bits > 16)
    throw ConfigError("QuantTensor: bits must be in [1, 16], got " +
                      std::to_string(t.bits));
  if (!(t.scale > 0.0))
    throw ConfigError("QuantTensor: scale must be positive");
  for (int64_t d : t.shape)
    if (d <= 0) throw ShapeError("QuantTensor: non-positive shape dimension");
  if (!t.shape.empty() &&
      element_count(t.shape) != static_cast<int64_t>(t.values.size()))
    throw ShapeError("QuantTensor: shape does not match value count");
  int64_t lo = t.is_signed ? -(1ll << (t.bits - 1)) : 0;
  int64_t hi = t.is_signed ? (1ll << (t.bits - 1)) - 1 : (1ll << t.bits) - 1;
  for (int32_t v : t.values)
    if (v < lo || v > hi)
      throw RangeError("QuantTensor: value " + std::to_string(v) +
                       " outside [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "] at " + std::to_string(t.bits) +
                       (t.is_signed ? " signed bits" : " unsigned bits"));
}

QuantTensor make_quant_tensor(std::vector<int64_t> shape,
                              std::vector<int32_t> values, int bits,
                              bool is_signed, double scale) {
  QuantTensor t;
  t.shape = std::move(shape);
  t.values = std::move(values);
  t.bits = bits;
  t.is_signed = is_signed;
  t.scale = scale;
  validate(t);
  return t;
}

BitPlanes decompose_bits(const QuantTensor& t) {
  validate(t);
  BitPlanes p;
  p.msb_negative = t.is_signed;
  p.planes.assign(t.bits, std::vector<uint8_t>(t.values.size(), 0));
  uint32_t mask = (t.bits == 32) ? ~0u : ((1u << t.bits) - 1);
  for (size_t n = 0; n < t.values.size(); ++n) {
    uint32_t u = static_cast<uint32_t>(t.values[n]) & mask;  // two's complement
    for (int b = 0; b < t.bits; ++b) p.planes[b][n] = (u >> b) & 1;
  }
  return p;
}

std::vector<int32_t> recompose(const BitPlanes& p) {
  if (p.planes.empty()) throw DegenerateInputError("recompose: no planes");
  size_t n = p.planes[0].size();
  for (const auto& plane : p.planes)
    if (plane.size() != n) throw ShapeError("recompose: ragged planes");
  int bits = static_cast<int>(p.planes.size());
  std::vector<int32_t> out(n, 0);
  for (size_t e = 0; e < n; ++e) {
    int64_t v = 0;
    for (int b = 0; b < bits; ++b) {
      if (p.planes[b][e] > 1) throw RangeError("recompose: non-binary plane");
      int64_t term = static_cast<int64_t>(p.planes[b][e]) << b;
      if (p.msb_negative && b == bits - 1) term = -term;
      v += term;
    }
    out[e] = static_cast<int32_t>(v);
  }
  return out;
}

PackedPlanes pack_planes(const std::vector<int32_t>& values, int bits,
                         bool is_signed) {
  PackedPlanes p;
  p.msb_negative = is_signed;
  p.cols = static_cast<int>(values.size());
  p.plane.assign(bits, BitRow(p.cols));
  uint32_t mask = (1u << bits) - 1;
  for (int c = 0; c < p.cols; ++c) {
    uint32_t u = static_cast<uint32_t>(values[c]) & mask;
    for (int b = 0; b < bits; ++b)
      if ((u >> b) & 1) p.plane[b].set(c, true);
  }
  return p;
}

Partition partition_grid(int w, int a, int s, int boundary, int window) {
  if (w < 1 || w > 8 || a < 1 || a > 8)
    throw ConfigError("partition_grid: widths must be in [1, 8]");
  if (s < 1 || s > w + a - 1)
    throw ConfigError("partition_grid: s must be in [1, w+a-1]");
  if (window < 1 || window > 4)
    throw ConfigError("partition_grid: window must be in [1, 4]");
  int k_eval = min_eval_order(w, a, s);
  if (boundary < 0 || boundary > k_eval)
    throw ConfigError("partition_grid: boundary " + std::to_string(boundary) +
                      " outside [0, " + std::to_string(k_eval) + "]");

  Partition part;
  part.w = w;
  part.a = a;
  part.s = s;
  part.boundary = boundary;
  part.window = window;
  for (int i = 0; i < w; ++i) {
    for (int j = 0; j < a; ++j) {
      int k = i + j;
      if (k >= k_eval)
        part.eval_cells.push_back({i, j});
      else if (k >= boundary)
        part.digital_cells.push_back({i, j});
      else if (k < boundary - window)
        part.discard_cells.push_back({i, j});
      // cells with boundary-window <= k < boundary land in analog groups
    }
  }
  for (int i = 0; i < w; ++i) {
    int j_lo = std::max(0, boundary - window - i);
    int j_hi = std::min(a - 1, boundary - 1 - i);
    if (j_lo <= j_hi) part.analog_groups.push_back({i, j_lo, j_hi});
  }
  return part;
}

}  // namespace hcim
