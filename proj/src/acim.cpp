#include "hcim/acim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hcim/dcim.hpp"

namespace hcim {

void validate(const AnalogParams& p) {
  if (p.dac_bits_max < 1 || p.dac_bits_max > 4)
    throw ConfigError("AnalogParams: dac_bits_max must be in [1, 4]");
  if (p.adc_bits < 1 || p.adc_bits > 16)
    throw ConfigError("AnalogParams: adc_bits must be in [1, 16]");
  if (!(p.noise_sigma >= 0.0))
    throw ConfigError("AnalogParams: noise_sigma must be >= 0");
  if (!(p.adc_hi > p.adc_lo))
    throw ConfigError("AnalogParams: adc range must satisfy hi > lo");
}

int dac_encode(std::span<const uint8_t> slice_bits, int width,
               const AnalogParams& p) {
  if (width < 1 || width > p.dac_bits_max)
    throw ConfigError("dac_encode: width " + std::to_string(width) +
                      " outside [1, " + std::to_string(p.dac_bits_max) + "]");
  if (static_cast<int>(slice_bits.size()) != width)
    throw ShapeError("dac_encode: slice length does not match width");
  int level = 0;
  for (int b = 0; b < width; ++b) {
    if (slice_bits[b] > 1) throw RangeError("dac_encode: non-binary bit");
    level |= slice_bits[b] << b;
  }
  return level;
}

int adc_quantize(double v, const AnalogParams& p) {
  validate(p);
  int max_code = (1 << p.adc_bits) - 1;
  double norm = (v - p.adc_lo) / (p.adc_hi - p.adc_lo);
  int64_t code = round_half_up(norm * max_code);
  return static_cast<int>(std::clamp<int64_t>(code, 0, max_code));
}

Amac amac_group(std::span<const uint8_t> weight_bits,
                std::span<const int> levels, int width, const AnalogParams& p,
                RngStream& noise, const AnalogGroup& group) {
  validate(p);
  if (width < 1 || width > p.dac_bits_max)
    throw ConfigError("amac_group: width outside [1, dac_bits_max]");
  if (weight_bits.size() != levels.size())
    throw ShapeError("amac_group: operand lengths differ");
  if (weight_bits.empty())
    throw DegenerateInputError("amac_group: zero columns");
  int full = (1 << width) - 1;
  int64_t sum = 0;
  for (size_t c = 0; c < weight_bits.size(); ++c) {
    if (weight_bits[c] > 1) throw RangeError("amac_group: non-binary weight");
    if (levels[c] < 0 || levels[c] > full)
      throw RangeError("amac_group: level outside [0, 2^width - 1]");
    sum += weight_bits[c] ? levels[c] : 0;
  }
  double v = static_cast<double>(sum) /
             (static_cast<double>(weight_bits.size()) * full);
  if (p.noise_sigma > 0.0) v += p.noise_sigma * noise.next_gaussian();
  Amac m;
  m.code = adc_quantize(v, p);
  m.group = group;
  m.significance = 1ll << (group.i + group.j_lo);
  m.width = width;
  return m;
}

int64_t decode_amac(const Amac& m, int cols, int width,
                    const AnalogParams& p) {
  validate(p);
  int max_code = (1 << p.adc_bits) - 1;
  if (m.code < 0 || m.code > max_code)
    throw RangeError("decode_amac: code outside [0, 2^adc_bits - 1]");
  if (cols < 1) throw DegenerateInputError("decode_amac: zero columns");
  double frac =
      p.adc_lo + static_cast<double>(m.code) / max_code * (p.adc_hi - p.adc_lo);
  int64_t units = round_half_up(frac * cols * ((1ll << width) - 1));
  return units * m.significance;
}

// ===========================================================================
// Hybrid datapath kernel
// ===========================================================================

HybridBreakdown hybrid_dot(const PackedPlanes& weights,
                           const PackedPlanes& acts, const Partition& part,
                           const AnalogParams& p, RngStream& noise,
                           std::vector<int>* eval_counts) {
  validate(p);
  if (weights.cols != acts.cols)
    throw ShapeError("hybrid_dot: column counts differ");
  if (static_cast<int>(weights.plane.size()) != part.w ||
      static_cast<int>(acts.plane.size()) != part.a)
    throw ShapeError("hybrid_dot: plane counts do not match partition");

  auto cell_sign = [&](int i, int j) {
    int64_t s = 1;
    if (weights.msb_negative && i == part.w - 1) s = -s;
    if (acts.msb_negative && j == part.a - 1) s = -s;
    return s;
  };

  HybridBreakdown out;
  if (eval_counts) eval_counts->clear();
  for (const Cell& c : part.eval_cells) {
    int64_t n = and_popcount(weights.plane[c.i], acts.plane[c.j]);
    if (eval_counts) eval_counts->push_back(static_cast<int>(n));
    out.digital += cell_sign(c.i, c.j) * (n << (c.i + c.j));
  }
  for (const Cell& c : part.digital_cells) {
    int64_t n = and_popcount(weights.plane[c.i], acts.plane[c.j]);
    out.digital += cell_sign(c.i, c.j) * (n << (c.i + c.j));
  }
  for (const Cell& c : part.discard_cells) {
    int64_t n = and_popcount(weights.plane[c.i], acts.plane[c.j]);
    out.discard_loss += cell_sign(c.i, c.j) * (n << (c.i + c.j));
  }

  for (const AnalogGroup& g : part.analog_groups) {
    if (acts.msb_negative && g.j_hi == part.a - 1)
      throw ConfigError(
          "hybrid_dot: signed activations cannot feed the analog path");
    int width = g.j_hi - g.j_lo + 1;
    int full = (1 << width) - 1;
    // sum_c weight[c] * level[c] without materializing per-column levels
    int64_t gsum = 0;
    for (int j = g.j_lo; j <= g.j_hi; ++j)
      gsum += and_popcount(weights.plane[g.i], acts.plane[j])
              << (j - g.j_lo);
    int64_t sig = 1ll << (g.i + g.j_lo);
    int64_t wsign = (weights.msb_negative && g.i == part.w - 1) ? -1 : 1;
    double v = static_cast<double>(gsum) /
               (static_cast<double>(weights.cols) * full);
    if (p.noise_sigma > 0.0) v += p.noise_sigma * noise.next_gaussian();
    int max_code = (1 << p.adc_bits) - 1;
    double norm = (v - p.adc_lo) / (p.adc_hi - p.adc_lo);
    int code = static_cast<int>(
        std::clamp<int64_t>(round_half_up(norm * max_code), 0, max_code));
    double frac =
        p.adc_lo + static_cast<double>(code) / max_code * (p.adc_hi - p.adc_lo);
    int64_t decoded = round_half_up(frac * weights.cols * full);
    out.analog_exact += wsign * gsum * sig;
    out.analog_decoded += wsign * decoded * sig;
  }

  out.simulated = out.digital + out.analog_decoded;
  return out;
}

// ===========================================================================
// SNR measurement
// ===========================================================================

namespace {

constexpr uint64_t kSnrJobTag = 0x534e;

void draw_snr_job(RngStream& rng, int w, int a, int cols, bool signed_weights,
                  std::vector<int32_t>& acts, std::vector<int32_t>& wts) {
  double sigma_a = static_cast<double>(1 << a) / 4.0;
  double sigma_w = static_cast<double>(1 << w) / 4.0;
  int32_t amax = (1 << a) - 1;
  int32_t wlo = signed_weights ? -(1 << (w - 1)) : 0;
  int32_t whi = signed_weights ? (1 << (w - 1)) - 1 : (1 << w) - 1;
  acts.resize(cols);
  wts.resize(cols);
  for (int c = 0; c < cols; ++c) {
    double g = rng.next_gaussian();
    acts[c] = static_cast<int32_t>(
        std::clamp<int64_t>(round_half_up(std::abs(g) * sigma_a), 0, amax));
  }
  for (int c = 0; c < cols; ++c) {
    double g = rng.next_gaussian();
    int64_t v = std::llround(g * sigma_w);
    wts[c] = static_cast<int32_t>(std::clamp<int64_t>(v, wlo, whi));
  }
}

}  // namespace

SnrResult measure_snr(int w, int a, int s, int boundary, int window,
                      const AnalogParams& p, int64_t trials, uint64_t seed,
                      const SnrOptions& opts) {
  validate(p);
  if (trials < 1) throw DegenerateInputError("measure_snr: no trials");
  Partition part = partition_grid(w, a, s, boundary, window);

  SnrResult r;
  r.trials = trials;
  std::vector<int32_t> acts, wts;
  std::vector<int32_t> clean;
  for (int64_t t = 0; t < trials; ++t) {
    RngStream rng = derive_stream(seed, {kSnrJobTag, static_cast<uint64_t>(t)});
    draw_snr_job(rng, w, a, opts.cols, opts.signed_weights, acts, wts);
    PackedPlanes ap = pack_planes(acts, a, false);
    PackedPlanes wp = pack_planes(wts, w, opts.signed_weights);
    HybridBreakdown hb = hybrid_dot(wp, ap, part, p, rng);
    int64_t exact = reference_mac(acts, wts);
    double err = static_cast<double>(hb.simulated - exact);
    r.signal_energy += static_cast<double>(exact) * exact;
    r.error_energy += err * err;
  }
  if (r.signal_energy == 0.0)
    throw DegenerateInputError("measure_snr: zero signal energy");
  if (r.error_energy == 0.0) {
    r.exact = true;
    r.snr_db = std::numeric_limits<double>::infinity();
  } else {
    r.snr_db = 10.0 * std::log10(r.signal_energy / r.error_energy);
  }
  return r;
}

}  // namespace hcim
