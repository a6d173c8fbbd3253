// test_acim.cpp -- analog path: DAC/ADC, charge sharing, hybrid kernel, SNR.
#include <doctest.h>

#include <cmath>
#include <hcim/acim.hpp>
#include <hcim/dcim.hpp>

#include "support/oracles.hpp"

using namespace hcim;

TEST_CASE("dac_encode reads an LSB-first slice") {
  std::vector<uint8_t> slice{1, 0, 1};
  CHECK(dac_encode(slice, 3) == 5);
  std::vector<uint8_t> ones{1, 1, 1, 1};
  CHECK(dac_encode(ones, 4) == 15);
  CHECK_THROWS_AS(dac_encode(slice, 2), ShapeError);
  std::vector<uint8_t> five(5, 1);
  CHECK_THROWS_AS(dac_encode(five, 5), ConfigError);
  std::vector<uint8_t> bad{2, 0, 0};
  CHECK_THROWS_AS(dac_encode(bad, 3), RangeError);
}

TEST_CASE("adc_quantize on the default range") {
  AnalogParams p;
  CHECK(adc_quantize(0.0, p) == 0);
  CHECK(adc_quantize(1.0, p) == 7);
  // Half swing sits exactly between codes 3 and 4 and rounds up.
  CHECK(adc_quantize(0.5, p) == 4);
  CHECK(adc_quantize(-0.3, p) == 0);
  CHECK(adc_quantize(1.7, p) == 7);
  for (int k = 0; k <= 7; ++k) CHECK(adc_quantize(k / 7.0, p) == k);

  AnalogParams narrow = p;
  narrow.adc_lo = 0.25;
  narrow.adc_hi = 0.75;
  CHECK(adc_quantize(0.25, narrow) == 0);
  CHECK(adc_quantize(0.75, narrow) == 7);
  CHECK(adc_quantize(0.1, narrow) == 0);
}

TEST_CASE("amac_group + decode on a frozen example") {
  // weights [1,0,1,1], 2-bit levels [3,0,1,2]: charge 6 of 12 -> v = 0.5,
  // 3-bit code 4, decode round(4/7 * 12) = 7 against an exact 6.
  AnalogParams p;
  std::vector<uint8_t> w{1, 0, 1, 1};
  std::vector<int> levels{3, 0, 1, 2};
  RngStream noise(0);
  AnalogGroup g{0, 0, 1};
  Amac m = amac_group(w, levels, 2, p, noise, g);
  CHECK(m.code == 4);
  CHECK(m.significance == 1);
  CHECK(decode_amac(m, 4, 2, p) == 7);

  // Same group one weight bit up carries significance 2.
  AnalogGroup g2{1, 0, 1};
  Amac m2 = amac_group(w, levels, 2, p, noise, g2);
  CHECK(m2.significance == 2);
  CHECK(decode_amac(m2, 4, 2, p) == 14);
}

TEST_CASE("noiseless codes follow the expected staircase") {
  AnalogParams p;
  RngStream noise(0);
  // One driven column out of eight, level ramp: v = level / (8 * 15).
  for (int level = 0; level <= 15; ++level) {
    std::vector<uint8_t> w{1, 0, 0, 0, 0, 0, 0, 0};
    std::vector<int> lv(8, 0);
    lv[0] = level;
    Amac m = amac_group(w, lv, 4, p, noise);
    double v = level / (8.0 * 15.0);
    CHECK(m.code == round_half_up(v * 7));
  }
}

TEST_CASE("noisy code mean matches the analytic dither oracle") {
  // At half swing with sigma 0.02 the Gaussian dither straddles the 3.5
  // code threshold symmetrically: the mean code converges to ~3.5, not to
  // the noiseless code 4.
  AnalogParams p;
  p.noise_sigma = 0.02;
  std::vector<uint8_t> w{1, 0, 1, 1};
  std::vector<int> levels{3, 0, 1, 2};
  const int trials = 60000;
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    RngStream noise = derive_stream(17, {static_cast<uint64_t>(t)});
    sum += amac_group(w, levels, 2, p, noise).code;
  }
  double mean = sum / trials;
  double want = oracle::expected_code(0.5, 0.02, 3);
  CHECK(std::abs(want - 3.5) < 1e-9);
  CHECK(std::abs(mean - want) < 0.05);
}

TEST_CASE("hybrid_dot accounting identity holds under noise") {
  RngStream rng = derive_stream(23, {0xac});
  AnalogParams p;
  p.noise_sigma = 0.05;
  for (int trial = 0; trial < 100; ++trial) {
    int cols = static_cast<int>(rng.uniform_int(4, 144));
    int boundary = static_cast<int>(rng.uniform_int(0, 13));
    std::vector<int32_t> acts(cols), wts(cols);
    for (int c = 0; c < cols; ++c) {
      acts[c] = static_cast<int32_t>(rng.uniform_int(0, 255));
      wts[c] = static_cast<int32_t>(rng.uniform_int(-128, 127));
    }
    PackedPlanes ap = pack_planes(acts, 8, false);
    PackedPlanes wp = pack_planes(wts, 8, true);
    Partition part = partition_grid(8, 8, 2, boundary, 4);
    RngStream noise = derive_stream(23, {7, static_cast<uint64_t>(trial)});
    HybridBreakdown hb = hybrid_dot(wp, ap, part, p, noise);

    int64_t exact = reference_mac(acts, wts);
    CHECK(hb.digital + hb.analog_exact + hb.discard_loss == exact);
    CHECK(hb.simulated == hb.digital + hb.analog_decoded);
  }
}

TEST_CASE("hybrid_dot is exact when nothing is discarded or analog") {
  std::vector<int32_t> acts{200, 3, 77, 145};
  std::vector<int32_t> wts{-100, 42, 7, -1};
  PackedPlanes ap = pack_planes(acts, 8, false);
  PackedPlanes wp = pack_planes(wts, 8, true);
  Partition part = partition_grid(8, 8, 2, 0, 4);
  AnalogParams p;
  RngStream noise(0);
  HybridBreakdown hb = hybrid_dot(wp, ap, part, p, noise);
  CHECK(hb.simulated == reference_mac(acts, wts));
  CHECK(hb.analog_exact == 0);
  CHECK(hb.analog_decoded == 0);
  CHECK(hb.discard_loss == 0);
}

TEST_CASE("hybrid_dot surfaces eval counts in partition order") {
  std::vector<int32_t> acts{255, 255};
  std::vector<int32_t> wts{127, 127};
  PackedPlanes ap = pack_planes(acts, 8, false);
  PackedPlanes wp = pack_planes(wts, 8, true);
  Partition part = partition_grid(8, 8, 2, 9, 4);
  AnalogParams p;
  RngStream noise(0);
  std::vector<int> counts;
  hybrid_dot(wp, ap, part, p, noise, &counts);
  REQUIRE(counts.size() == part.eval_cells.size());
  for (size_t n = 0; n < counts.size(); ++n) {
    const Cell& c = part.eval_cells[n];
    // Acts are all-ones planes; weight plane 7 is the sign plane of 127,
    // which is zero, so counts follow the weight bits alone.
    int want = (c.i < 7) ? 2 : 0;
    CHECK(counts[n] == want);
  }
}

TEST_CASE("signed activations may not reach the analog region") {
  std::vector<int32_t> acts{-5, 3, 7, -1};
  std::vector<int32_t> wts{1, 2, 3, 4};
  PackedPlanes ap = pack_planes(acts, 8, true);
  PackedPlanes wp = pack_planes(wts, 8, false);
  Partition part = partition_grid(8, 8, 2, 8, 4);
  AnalogParams p;
  RngStream noise(0);
  CHECK_THROWS_AS(hybrid_dot(wp, ap, part, p, noise), ConfigError);
}

TEST_CASE("measure_snr reports exact at an all-digital boundary") {
  AnalogParams p;
  SnrResult r = measure_snr(8, 8, 2, 0, 4, p, 50, 99);
  CHECK(r.exact);
  CHECK(r.error_energy == 0.0);
  CHECK(r.signal_energy > 0.0);
}

TEST_CASE("measure_snr is deterministic and degrades with boundary") {
  AnalogParams p;
  p.noise_sigma = 0.03;
  SnrResult a = measure_snr(8, 8, 2, 5, 4, p, 200, 7);
  SnrResult b = measure_snr(8, 8, 2, 5, 4, p, 200, 7);
  CHECK(a.snr_db == b.snr_db);
  CHECK_FALSE(a.exact);
  SnrResult hi = measure_snr(8, 8, 2, 9, 4, p, 200, 7);
  CHECK(a.snr_db > hi.snr_db);
  CHECK(a.snr_db > 20.0);

  AnalogParams clean;
  clean.adc_bits = 16;
  SnrResult fine = measure_snr(8, 8, 2, 5, 4, clean, 200, 7);
  CHECK(fine.snr_db > a.snr_db);
}
