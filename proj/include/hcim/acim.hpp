// acim.hpp -- analog compute-in-memory path.
//
// Analog groups evaluate several low-order cells in one shot: the
// activation bits j_lo..j_hi of each column drive a multi-bit DAC level,
// the weight bit gates the cell current, and the column charge is shared
// across all columns.  The normalized charge
//
//   v = sum_c weight[c] * level[c] / (cols * (2^width - 1))   in [0, 1]
//
// picks up additive Gaussian noise and is quantized by a low-bit ADC.
// Decoding maps the code back to integer units and scales by the group
// significance 2^(i + j_lo).  The ADC conversion range defaults to the
// full normalized swing (0, 1) and is configurable.
//
// range_tracks_active_cols is a mapping-level knob: when a caller drives
// only `active` of `cols` columns, the conversion range shrinks to the
// reachable swing (hi scaled by active/cols) and the noise is referred to
// the conversion range (sigma scales with range width).  Off by default;
// all formula-level behavior then matches the plain (0, 1) model.
//
// measure_snr draws random MAC jobs from a sparse, network-like
// distribution (half-normal activations with sigma 2^a/4, normal weights
// with sigma 2^w/4, both clamped to their ranges), runs them through the
// hybrid path at a fixed boundary, and reports
// 10*log10(sum y_exact^2 / sum (y_sim - y_exact)^2).
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hcim/core.hpp"
#include "hcim/rng.hpp"

namespace hcim {

struct AnalogParams {
  int dac_bits_max = 4;
  int adc_bits = 3;
  double noise_sigma = 0.0;  // std-dev on the normalized charge value
  double adc_lo = 0.0;       // ADC conversion range in normalized units
  double adc_hi = 1.0;
  bool range_tracks_active_cols = false;
};

// Throws ConfigError on out-of-range parameters.
void validate(const AnalogParams& p);

// Unsigned value of an activation bit slice, LSB first.  width must equal
// the slice length and stay within dac_bits_max.
int dac_encode(std::span<const uint8_t> slice_bits, int width,
               const AnalogParams& p = {});

// Quantize a normalized value against the conversion range; clamps to
// [0, 2^adc_bits - 1].
int adc_quantize(double v, const AnalogParams& p);

// One converted analog group.
struct Amac {
  int code = 0;
  AnalogGroup group;
  int64_t significance = 1;  // 2^(i + j_lo)
  int width = 1;
};

// Charge-share, noise, and ADC conversion for one group.  levels[c] is the
// DAC level of column c, in [0, 2^width - 1].  Noise is drawn from
// `noise` only when noise_sigma > 0.
Amac amac_group(std::span<const uint8_t> weight_bits,
                std::span<const int> levels, int width, const AnalogParams& p,
                RngStream& noise, const AnalogGroup& group = {});

// Integer contribution of a converted group:
//   round(range(code) * cols * (2^width - 1)) * significance
// where range(code) maps the code back into [adc_lo, adc_hi].
int64_t decode_amac(const Amac& m, int cols, int width, const AnalogParams& p);

// ===========================================================================
// Hybrid datapath kernel
// ===========================================================================

// One dot product through the partitioned datapath.  simulated = digital +
// analog_decoded; the exact value decomposes as digital + analog_exact +
// discard_loss.  eval_counts, when given, receives the raw per-eval-cell
// AND counts in partition order (the inputs to the saliency estimator).
struct HybridBreakdown {
  int64_t simulated = 0;
  int64_t digital = 0;
  int64_t analog_exact = 0;
  int64_t analog_decoded = 0;
  int64_t discard_loss = 0;
};

HybridBreakdown hybrid_dot(const PackedPlanes& weights,
                           const PackedPlanes& acts, const Partition& part,
                           const AnalogParams& p, RngStream& noise,
                           std::vector<int>* eval_counts = nullptr);

// ===========================================================================
// SNR measurement
// ===========================================================================

struct SnrOptions {
  int cols = 144;
  bool signed_weights = true;
};

struct SnrResult {
  double snr_db = 0.0;
  bool exact = false;  // zero error energy; report as sentinel "exact"
  double signal_energy = 0.0;
  double error_energy = 0.0;
  int64_t trials = 0;
};

// Throws DegenerateInputError when the job set has zero signal energy.
SnrResult measure_snr(int w, int a, int s, int boundary, int window,
                      const AnalogParams& p, int64_t trials, uint64_t seed,
                      const SnrOptions& opts = {});

}  // namespace hcim
