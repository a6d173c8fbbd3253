// test_ose.cpp -- saliency accumulation and boundary selection.
#include <doctest.h>

#include <algorithm>
#include <hcim/ose.hpp>
#include <hcim/rng.hpp>

#include "support/oracles.hpp"

using namespace hcim;

TEST_CASE("saliency_accumulate weighs cycles by order") {
  std::vector<CycleCodes> cycles{{13, {7, 7}}, {14, {3, 0}}};
  SaliencyScore s = saliency_accumulate(cycles);
  // k_min = 13: cycle one contributes 14, cycle two 2 * 3.
  CHECK(s.value == 20);
  CHECK(s.cycles_used == 2);
  REQUIRE(s.per_cycle.size() == 2);
  CHECK(s.per_cycle[0] == std::pair<int, int64_t>{13, 14});
  CHECK(s.per_cycle[1] == std::pair<int, int64_t>{14, 3});
}

TEST_CASE("saliency_accumulate is invariant to hmu and cycle order") {
  std::vector<CycleCodes> a{{5, {1, 2, 3}}, {6, {0, 7, 4}}, {7, {2, 2, 2}}};
  std::vector<CycleCodes> b{{7, {2, 2, 2}}, {5, {3, 2, 1}}, {6, {4, 0, 7}}};
  CHECK(saliency_accumulate(a).value == saliency_accumulate(b).value);
}

TEST_CASE("saliency_accumulate rejects bad input") {
  std::vector<CycleCodes> empty;
  CHECK_THROWS_AS(saliency_accumulate(empty), DegenerateInputError);
  std::vector<CycleCodes> bad{{3, {8}}};
  CHECK_THROWS_AS(saliency_accumulate(bad), RangeError);
  std::vector<CycleCodes> neg{{3, {-1}}};
  CHECK_THROWS_AS(saliency_accumulate(neg), RangeError);
}

TEST_CASE("max_saliency for the reference geometry") {
  // Orders 13 and 14 hold 2 and 1 cells; 8 HMUs at full code 7 give
  // (2*1 + 1*2) * 56 = 224.
  CHECK(max_saliency(8, 8, 2, 8) == 224);
  // One eval order, one cell, one HMU: a single code 7.
  CHECK(max_saliency(1, 1, 1, 1) == 7);
}

TEST_CASE("boundary table validation") {
  BoundaryTable t{{5, 7, 9, 11}, {40.0, 25.0, 10.0}};
  validate(t);
  validate(t, 8, 8, 2);

  BoundaryTable wrong_size{{5, 7}, {40.0, 25.0}};
  CHECK_THROWS_AS(validate(wrong_size), ConfigError);
  BoundaryTable not_ascending{{7, 5}, {40.0}};
  CHECK_THROWS_AS(validate(not_ascending), ConfigError);
  BoundaryTable increasing{{5, 7, 9}, {10.0, 25.0}};
  CHECK_THROWS_AS(validate(increasing), ConfigError);
  BoundaryTable out_of_range{{5, 14}, {40.0}};
  CHECK_THROWS_AS(validate(out_of_range, 8, 8, 2), ConfigError);
  BoundaryTable empty{{}, {}};
  CHECK_THROWS_AS(validate(empty), ConfigError);
  BoundaryTable single{{9}, {}};
  validate(single);
}

TEST_CASE("select_boundary walks gates with ties toward precision") {
  BoundaryTable t{{5, 7, 9, 11}, {40.0, 25.0, 10.0}};
  auto pick = [&](int64_t v) {
    SaliencyScore s;
    s.value = v;
    return select_boundary(s, t);
  };
  CHECK(pick(224) == 5);
  CHECK(pick(40) == 5);  // tie clears the gate
  CHECK(pick(39) == 7);
  CHECK(pick(25) == 7);
  CHECK(pick(24) == 9);
  CHECK(pick(10) == 9);
  CHECK(pick(9) == 11);
  CHECK(pick(0) == 11);

  SaliencyScore neg;
  neg.value = -1;
  CHECK_THROWS_AS(select_boundary(neg, t), RangeError);

  BoundaryTable single{{9}, {}};
  SaliencyScore any;
  any.value = 12345;
  CHECK(select_boundary(any, single) == 9);
}

TEST_CASE("sentinel thresholds stop the walk at their candidate") {
  // Stages 2 and 3 unsearched: scores failing gate 0 settle on candidate 1
  // rather than falling through to the least precise entry.
  BoundaryTable t{{5, 7, 9, 11}, {40.0, -1.0, -1.0}};
  SaliencyScore s;
  s.value = 0;
  CHECK(select_boundary(s, t) == 7);
  s.value = 39;
  CHECK(select_boundary(s, t) == 7);
  s.value = 40;
  CHECK(select_boundary(s, t) == 5);
}

TEST_CASE("select_boundary agrees with the direct-scan oracle") {
  RngStream rng = derive_stream(31, {0x05e});
  for (int trial = 0; trial < 200; ++trial) {
    int stages = static_cast<int>(rng.uniform_int(1, 5));
    BoundaryTable t;
    int c = static_cast<int>(rng.uniform_int(0, 3));
    for (int i = 0; i < stages; ++i) {
      t.candidates.push_back(c);
      c += static_cast<int>(rng.uniform_int(1, 3));
    }
    double thr = 200.0;
    for (int i = 0; i + 1 < stages; ++i) {
      thr -= static_cast<double>(rng.uniform_int(0, 40));
      t.thresholds.push_back(thr);
    }
    for (int64_t v = 0; v <= 224; ++v) {
      SaliencyScore s;
      s.value = v;
      CHECK(select_boundary(s, t) ==
            oracle::select(v, t.candidates, t.thresholds));
    }
  }
}
