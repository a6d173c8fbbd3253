// dcim.hpp -- digital compute-in-memory path.
//
// One digital cycle evaluates a single 1-bit MAC cell across all columns:
// the AND of one weight plane and one activation plane, reduced to a
// population count by the adder tree.  The result is exact.  During
// saliency evaluation the per-cycle count is normalized by the number of
// active columns and quantized to a 3-bit code for the on-the-fly saliency
// estimator.
//
// Identity (verified in tests over widths 2..8, signed and unsigned):
//   sum over cells of sign(i,j) * 2^(i+j) * dmac(i,j) == reference_mac,
// where sign flips on the weight MSB plane (signed weights) and on the
// activation MSB plane (signed activations).
#pragma once

#include <cstdint>
#include <span>

#include "hcim/core.hpp"

namespace hcim {

inline constexpr int kNqBits = 3;  // normalize/quantize output width

// Result of one digital MAC cycle.
struct Dmac {
  int value = 0;        // popcount of the AND, in [0, active_cols]
  int active_cols = 0;  // columns participating in this invocation
  int order = 0;        // output order k = i + j
};

// One cycle: AND of an activation plane and a weight plane, popcounted.
// Throws ShapeError on length mismatch, RangeError on non-binary input.
Dmac dmac_cycle(std::span<const uint8_t> act_bits,
                std::span<const uint8_t> weight_bits, int order = 0);

// 3-bit normalize/quantize: round-half-up of 7 * value / active_cols,
// clamped to [0, 7].  Throws DegenerateInputError when active_cols is 0.
int nq_quantize(const Dmac& d);

// Exact integer dot product; the oracle the hybrid path is judged against.
// Throws ShapeError on length mismatch.
int64_t reference_mac(std::span<const int32_t> acts,
                      std::span<const int32_t> weights);

}  // namespace hcim
