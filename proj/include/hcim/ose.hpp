// ose.hpp -- on-the-fly saliency evaluation and boundary selection.
//
// While the eval cells run, each HMU's per-cycle count is quantized to a
// 3-bit code.  The estimator sums the codes across HMUs and accumulates
// cycles shifted by their output order:
//
//   S = sum over cycles 2^(k_c - k_min) * (sum of codes in cycle c)
//
// where k_min is the lowest order in the eval region.  Selection walks a
// calibrated table: candidates ascending (most precise first), thresholds
// non-increasing.  The chosen index is the number of thresholds strictly
// above the score, so a large score clears every gate and lands on the
// most precise candidate; a tie S == T_i clears gate i toward the precise
// side.  Calibration parks unsearched stages at the sentinel -1: scores
// are non-negative, so an inactive gate never pushes selection past its
// candidate, and samples failing the last searched gate settle on the next
// candidate rather than falling to the least precise one.
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hcim/errors.hpp"

namespace hcim {

struct BoundaryTable {
  std::vector<int> candidates;     // ascending, most precise first
  std::vector<double> thresholds;  // size candidates-1, non-increasing
};

// Structural check: sizes, ordering.  The (w, a, s) overload also checks
// every candidate lies in the legal boundary range.
void validate(const BoundaryTable& t);
void validate(const BoundaryTable& t, int w, int a, int s);

// Codes of one eval cycle: one 3-bit code per HMU, all at output order k.
struct CycleCodes {
  int order = 0;
  std::vector<int> codes;
};

struct SaliencyScore {
  int64_t value = 0;
  int cycles_used = 0;
  // (order, summed code) per cycle, in accumulation order.
  std::vector<std::pair<int, int64_t>> per_cycle;
};

// Accumulate a saliency score.  Invariant to HMU ordering within a cycle.
// Throws RangeError on non-3-bit codes, DegenerateInputError on an empty
// cycle list.
SaliencyScore saliency_accumulate(std::span<const CycleCodes> per_cycle_codes);

// Index walk over the table; returns the chosen boundary.
// Throws ConfigError on an invalid table, RangeError on a negative score.
int select_boundary(const SaliencyScore& s, const BoundaryTable& t);

// Largest score reachable at the given geometry; handy as a calibration
// search bound.
int64_t max_saliency(int w, int a, int s, int hmus);

}  // namespace hcim
