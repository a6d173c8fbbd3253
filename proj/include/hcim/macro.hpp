// macro.hpp -- full macro model: weight array, OSE, hybrid datapath.
//
// Geometry: `rows` physical wordlines = hmus * cells_per_hcima (default
// 64 = 8 * 8), `cols` HCIMA columns per HMU row (default 144).  Each HMU
// produces one dot product per invocation.  An HCIMA's cell stack holds
// either one weight of up to 8 bits (one_8bit) or two 4-bit weights
// (two_4bit); dual mode exposes two weight banks selected per invocation.
//
// One invocation:
//   1. the eval cells run on the digital path; per-HMU counts are N/Q
//      quantized and accumulated into the saliency score,
//   2. the boundary is selected (OSE mode) or taken from the config
//      (fixed mode), and the grid is partitioned,
//   3. digital cells accumulate exactly; analog groups are charge-shared,
//      noised, converted, and decoded; discarded cells are dropped,
//   4. the schedule and energy report are built for the invocation.
//
// The activation tensor must be unsigned (post-ReLU convention): a DAC
// level cannot carry a per-column sign.  Signed weights are supported; the
// MSB plane contributes negatively on both paths.
//
// Noise determinism: the per-group noise stream is derived from
// (seed, hmu index, "noise" tag), so results are independent of HMU and
// group evaluation order.
#pragma once

#include <cstdint>
#include <vector>

#include "hcim/acim.hpp"
#include "hcim/core.hpp"
#include "hcim/ose.hpp"
#include "hcim/scheduler.hpp"

namespace hcim {

enum class WeightMode { one_8bit, two_4bit };
enum class RunMode { fixed_boundary, osa };

struct MacroConfig {
  int rows = 64;
  int cols = 144;
  int hmus = 8;
  int cells_per_hcima = 8;
  WeightMode weight_mode = WeightMode::one_8bit;
  int weight_bits = 8;  // w
  int act_bits = 8;     // a
  bool weights_signed = true;
  int saliency_orders = 2;  // s
  int window = 4;           // V
  RunMode mode = RunMode::osa;
  int fixed_boundary = 0;
  BoundaryTable boundary_table;
  AnalogParams analog;
  TimingParams timing;
  EnergyModel energy;
};

// Geometry, widths, mode, and table legality.  Energy costs are checked
// at accounting time, not here.
void validate(const MacroConfig& cfg);

// Loaded weight array: integer values for the exact reference plus packed
// bit planes for the datapath.  Row r of bank b lives at index
// b * hmus + r.
struct MacroState {
  int cols = 0;
  int weight_bits = 0;
  bool weights_signed = false;
  int banks = 1;
  int hmus = 0;
  std::vector<std::vector<int32_t>> row_values;
  std::vector<PackedPlanes> row_planes;
};

// weights shape must be (hmus, cols) in one_8bit mode or (2 * hmus, cols)
// in two_4bit mode, at the configured width and signedness.
MacroState load_weights(const QuantTensor& weights, const MacroConfig& cfg);

// Reconstructs the weight tensor from the stored bit planes.
QuantTensor read_back(const MacroState& st);

struct RunOptions {
  int weight_bank = 0;
  // Columns actually driven by the caller (the rest are zero padding).
  // Defaults to all columns.  Feeds N/Q normalization and, when
  // range_tracks_active_cols is set, the ADC conversion range.
  int active_cols = -1;
};

struct MacResult {
  std::vector<int64_t> outputs;  // simulated, one per HMU
  std::vector<int64_t> exact;    // reference dot products
  std::vector<int64_t> error;    // outputs - exact
  // error == discard_error + adc_error elementwise; with sigma = 0 the
  // second term is pure ADC quantization error.
  std::vector<int64_t> discard_error;
  std::vector<int64_t> adc_error;
  int chosen_boundary = 0;
  SaliencyScore saliency;
  Schedule schedule;
  EnergyReport energy;
};

MacResult run_mac(const MacroState& st, const QuantTensor& acts,
                  const MacroConfig& cfg, uint64_t seed,
                  const RunOptions& opt = {});

}  // namespace hcim
