#include "hcim/macro.hpp"

#include <algorithm>
#include <string>

#include "hcim/dcim.hpp"

namespace hcim {

namespace {

constexpr uint64_t kNoiseTag = 0x4e4f;

int bank_count(const MacroConfig& cfg) {
  return cfg.weight_mode == WeightMode::two_4bit ? 2 : 1;
}

}  // namespace

void validate(const MacroConfig& cfg) {
  if (cfg.hmus < 1 || cfg.cells_per_hcima < 1 || cfg.cols < 1)
    throw ConfigError("MacroConfig: non-positive geometry");
  if (cfg.rows != cfg.hmus * cfg.cells_per_hcima)
    throw ConfigError("MacroConfig: rows must equal hmus * cells_per_hcima");
  if (cfg.act_bits < 1 || cfg.act_bits > 8)
    throw ConfigError("MacroConfig: act_bits must be in [1, 8]");
  if (cfg.weight_mode == WeightMode::one_8bit) {
    if (cfg.weight_bits < 1 || cfg.weight_bits > cfg.cells_per_hcima)
      throw ConfigError("MacroConfig: weight_bits exceeds HCIMA cell count");
  } else {
    if (cfg.weight_bits != 4 || cfg.cells_per_hcima < 8)
      throw ConfigError("MacroConfig: two_4bit mode requires 4-bit weights "
                        "and 8 cells per HCIMA");
  }
  if (cfg.window < 1 || cfg.window > cfg.analog.dac_bits_max)
    throw ConfigError("MacroConfig: window must be in [1, dac_bits_max]");
  int s_hi = cfg.weight_bits + cfg.act_bits - 1;
  if (cfg.saliency_orders < 1 || cfg.saliency_orders >= s_hi)
    throw ConfigError("MacroConfig: saliency_orders out of range");
  validate(cfg.analog);
  validate(cfg.timing);
  int b_hi = min_eval_order(cfg.weight_bits, cfg.act_bits, cfg.saliency_orders);
  if (cfg.mode == RunMode::fixed_boundary) {
    if (cfg.fixed_boundary < 0 || cfg.fixed_boundary > b_hi)
      throw ConfigError("MacroConfig: fixed_boundary outside [0, " +
                        std::to_string(b_hi) + "]");
  } else {
    validate(cfg.boundary_table, cfg.weight_bits, cfg.act_bits,
             cfg.saliency_orders);
  }
}

MacroState load_weights(const QuantTensor& weights, const MacroConfig& cfg) {
  validate(cfg);
  validate(weights);
  int banks = bank_count(cfg);
  int64_t want_rows = static_cast<int64_t>(banks) * cfg.hmus;
  if (weights.shape.size() != 2 || weights.shape[0] != want_rows ||
      weights.shape[1] != cfg.cols)
    throw ShapeError("load_weights: expected shape (" +
                     std::to_string(want_rows) + ", " +
                     std::to_string(cfg.cols) + ")");
  if (weights.bits != cfg.weight_bits)
    throw ConfigError("load_weights: width does not match weight_mode");
  if (weights.is_signed != cfg.weights_signed)
    throw ConfigError("load_weights: signedness does not match config");

  MacroState st;
  st.cols = cfg.cols;
  st.weight_bits = cfg.weight_bits;
  st.weights_signed = cfg.weights_signed;
  st.banks = banks;
  st.hmus = cfg.hmus;
  for (int64_t r = 0; r < want_rows; ++r) {
    auto first = weights.values.begin() + r * cfg.cols;
    std::vector<int32_t> row(first, first + cfg.cols);
    st.row_planes.push_back(
        pack_planes(row, cfg.weight_bits, cfg.weights_signed));
    st.row_values.push_back(std::move(row));
  }
  return st;
}

QuantTensor read_back(const MacroState& st) {
  QuantTensor t;
  t.bits = st.weight_bits;
  t.is_signed = st.weights_signed;
  t.shape = {static_cast<int64_t>(st.row_planes.size()), st.cols};
  for (const PackedPlanes& p : st.row_planes) {
    for (int c = 0; c < st.cols; ++c) {
      int64_t v = 0;
      for (int b = 0; b < st.weight_bits; ++b) {
        int64_t term = static_cast<int64_t>(p.plane[b].get(c)) << b;
        if (p.msb_negative && b == st.weight_bits - 1) term = -term;
        v += term;
      }
      t.values.push_back(static_cast<int32_t>(v));
    }
  }
  validate(t);
  return t;
}

MacResult run_mac(const MacroState& st, const QuantTensor& acts,
                  const MacroConfig& cfg, uint64_t seed,
                  const RunOptions& opt) {
  validate(cfg);
  validate(acts);
  if (st.cols != cfg.cols || st.hmus != cfg.hmus ||
      st.weight_bits != cfg.weight_bits ||
      st.weights_signed != cfg.weights_signed ||
      st.banks != bank_count(cfg))
    throw ConfigError("run_mac: state does not match config");
  if (acts.shape != std::vector<int64_t>{cfg.cols} &&
      !(acts.shape.empty() &&
        static_cast<int>(acts.values.size()) == cfg.cols))
    throw ShapeError("run_mac: activations must be a length-cols vector");
  if (acts.bits != cfg.act_bits)
    throw ConfigError("run_mac: activation width does not match config");
  if (acts.is_signed)
    throw ConfigError("run_mac: activations must be unsigned (post-ReLU)");
  if (opt.weight_bank < 0 || opt.weight_bank >= st.banks)
    throw ConfigError("run_mac: weight bank out of range");
  int active_cols = opt.active_cols < 0 ? cfg.cols : opt.active_cols;
  if (active_cols < 1 || active_cols > cfg.cols)
    throw ConfigError("run_mac: active_cols outside [1, cols]");

  int w = cfg.weight_bits, a = cfg.act_bits, s = cfg.saliency_orders;
  int k_eval = min_eval_order(w, a, s);
  PackedPlanes act_planes = pack_planes(acts.values, a, false);

  // Saliency evaluation mode: one cycle per eval cell, highest order
  // first.  Codes are per HMU; counts are reused by the datapath via the
  // schedule's event accounting (no double count).
  std::vector<CycleCodes> cycles;
  for (int k = w + a - 2; k >= k_eval; --k) {
    for (int i = 0; i < w; ++i) {
      int j = k - i;
      if (j < 0 || j >= a) continue;
      CycleCodes cc;
      cc.order = k;
      for (int h = 0; h < cfg.hmus; ++h) {
        const PackedPlanes& wp = st.row_planes[opt.weight_bank * cfg.hmus + h];
        int count =
            static_cast<int>(and_popcount(wp.plane[i], act_planes.plane[j]));
        cc.codes.push_back(nq_quantize({count, active_cols, k}));
      }
      cycles.push_back(std::move(cc));
    }
  }

  MacResult res;
  res.saliency = saliency_accumulate(cycles);
  res.chosen_boundary = cfg.mode == RunMode::osa
                            ? select_boundary(res.saliency, cfg.boundary_table)
                            : cfg.fixed_boundary;

  Partition part = partition_grid(w, a, s, res.chosen_boundary, cfg.window);

  AnalogParams ap = cfg.analog;
  if (ap.range_tracks_active_cols && active_cols < cfg.cols) {
    double frac = static_cast<double>(active_cols) / cfg.cols;
    ap.adc_hi = ap.adc_lo + (ap.adc_hi - ap.adc_lo) * frac;
    ap.noise_sigma *= frac;
  }

  for (int h = 0; h < cfg.hmus; ++h) {
    int row = opt.weight_bank * cfg.hmus + h;
    RngStream noise =
        derive_stream(seed, {static_cast<uint64_t>(h), kNoiseTag});
    HybridBreakdown hb =
        hybrid_dot(st.row_planes[row], act_planes, part, ap, noise);
    int64_t exact = reference_mac(st.row_values[row], acts.values);
    res.outputs.push_back(hb.simulated);
    res.exact.push_back(exact);
    res.error.push_back(hb.simulated - exact);
    res.discard_error.push_back(-hb.discard_loss);
    res.adc_error.push_back(hb.analog_decoded - hb.analog_exact);
  }

  res.schedule = build_schedule(part, cfg.timing);
  res.energy = account_energy(res.schedule, cfg.energy);
  return res;
}

}  // namespace hcim
