#include "hcim/dcim.hpp"

#include <algorithm>
#include <string>

namespace hcim {

Dmac dmac_cycle(std::span<const uint8_t> act_bits,
                std::span<const uint8_t> weight_bits, int order) {
  if (act_bits.size() != weight_bits.size())
    throw ShapeError("dmac_cycle: plane lengths differ (" +
                     std::to_string(act_bits.size()) + " vs " +
                     std::to_string(weight_bits.size()) + ")");
  Dmac d;
  d.active_cols = static_cast<int>(act_bits.size());
  d.order = order;
  for (size_t c = 0; c < act_bits.size(); ++c) {
    if (act_bits[c] > 1 || weight_bits[c] > 1)
      throw RangeError("dmac_cycle: non-binary plane value");
    d.value += act_bits[c] & weight_bits[c];
  }
  return d;
}

int nq_quantize(const Dmac& d) {
  if (d.active_cols <= 0)
    throw DegenerateInputError("nq_quantize: zero active columns");
  if (d.value < 0 || d.value > d.active_cols)
    throw RangeError("nq_quantize: count " + std::to_string(d.value) +
                     " outside [0, " + std::to_string(d.active_cols) + "]");
  int max_code = (1 << kNqBits) - 1;
  int64_t code =
      round_half_up(static_cast<double>(max_code) * d.value / d.active_cols);
  return static_cast<int>(std::clamp<int64_t>(code, 0, max_code));
}

int64_t reference_mac(std::span<const int32_t> acts,
                      std::span<const int32_t> weights) {
  if (acts.size() != weights.size())
    throw ShapeError("reference_mac: operand lengths differ");
  int64_t acc = 0;
  for (size_t c = 0; c < acts.size(); ++c)
    acc += static_cast<int64_t>(acts[c]) * weights[c];
  return acc;
}

}  // namespace hcim
