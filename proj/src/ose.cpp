#include "hcim/ose.hpp"

#include <algorithm>
#include <string>

#include "hcim/core.hpp"
#include "hcim/dcim.hpp"

namespace hcim {

void validate(const BoundaryTable& t) {
  if (t.candidates.empty())
    throw ConfigError("BoundaryTable: empty candidate list");
  for (size_t i = 1; i < t.candidates.size(); ++i)
    if (t.candidates[i] <= t.candidates[i - 1])
      throw ConfigError("BoundaryTable: candidates must be strictly ascending");
  if (t.thresholds.size() + 1 != t.candidates.size())
    throw ConfigError("BoundaryTable: need one threshold per candidate pair");
  for (size_t i = 1; i < t.thresholds.size(); ++i)
    if (t.thresholds[i] > t.thresholds[i - 1])
      throw ConfigError("BoundaryTable: thresholds must be non-increasing");
}

void validate(const BoundaryTable& t, int w, int a, int s) {
  validate(t);
  int hi = min_eval_order(w, a, s);
  for (int b : t.candidates)
    if (b < 0 || b > hi)
      throw ConfigError("BoundaryTable: candidate " + std::to_string(b) +
                        " outside [0, " + std::to_string(hi) + "]");
}

SaliencyScore saliency_accumulate(
    std::span<const CycleCodes> per_cycle_codes) {
  if (per_cycle_codes.empty())
    throw DegenerateInputError("saliency_accumulate: no cycles");
  int k_min = per_cycle_codes[0].order;
  int k_max = k_min;
  for (const CycleCodes& c : per_cycle_codes) {
    k_min = std::min(k_min, c.order);
    k_max = std::max(k_max, c.order);
  }
  if (k_max - k_min > 32)
    throw RangeError("saliency_accumulate: order span too wide");

  SaliencyScore s;
  for (const CycleCodes& c : per_cycle_codes) {
    if (c.codes.empty())
      throw DegenerateInputError("saliency_accumulate: empty cycle");
    int64_t cycle_sum = 0;
    for (int code : c.codes) {
      if (code < 0 || code > (1 << kNqBits) - 1)
        throw RangeError("saliency_accumulate: code " + std::to_string(code) +
                         " is not a 3-bit value");
      cycle_sum += code;
    }
    s.value += cycle_sum << (c.order - k_min);
    s.per_cycle.emplace_back(c.order, cycle_sum);
    ++s.cycles_used;
  }
  return s;
}

int select_boundary(const SaliencyScore& s, const BoundaryTable& t) {
  validate(t);
  if (s.value < 0) throw RangeError("select_boundary: negative score");
  size_t idx = 0;
  for (double thr : t.thresholds) {
    if (static_cast<double>(s.value) < thr)
      ++idx;
    else
      break;  // thresholds are non-increasing; the first pass ends the walk
  }
  return t.candidates[idx];
}

int64_t max_saliency(int w, int a, int s, int hmus) {
  int k_min = min_eval_order(w, a, s);
  int k_max = w + a - 2;
  int64_t total = 0;
  for (int k = k_min; k <= k_max; ++k) {
    // cell count at order k in a w x a grid
    int cells = std::min({k, w - 1, a - 1, w + a - 2 - k}) + 1;
    total += static_cast<int64_t>(cells) << (k - k_min);
  }
  return total * hmus * ((1 << kNqBits) - 1);
}

}  // namespace hcim
