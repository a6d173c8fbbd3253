// calibration.hpp -- threshold search against loss constraints.
//
// Thresholds are searched one stage at a time, most precise pair first.
// Unsearched stages sit at the inactive sentinel -1, so during stage i the
// workload splits between candidates i and i+1 only.  Raising T_i moves
// samples toward the less precise candidate, so the stage loss is modeled
// as non-decreasing in T_i; each stage bisects [t_min, min(t_max, T_{i-1})]
// for a loss inside the target band |loss - L_i| <= epsilon.  When the
// endpoint probes contradict monotonicity the stage falls back to a
// fixed-step walk (step halves on every direction reversal).  Stages that
// cannot reach the band park at the nearest bound, flagged best-effort;
// the search never throws for that.
//
// The upper bound min(t_max, T_{i-1}) keeps the finished table
// non-increasing by construction.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hcim/harness.hpp"
#include "hcim/macro.hpp"
#include "hcim/net.hpp"
#include "hcim/ose.hpp"

namespace hcim {

struct LossConstraints {
  std::vector<double> targets;  // one per threshold, size candidates-1
  double epsilon = 1e-3;
  int max_iters = 60;  // loss evaluations per stage, endpoint probes included
  double t_min = 0.0;
  double t_max = -1.0;       // <= 0: derive from max_saliency
  double initial_step = 0.0;  // 0: (hi-lo)/8 for the fallback walk
};

struct CalibrationTracePoint {
  int stage = 0;
  int iteration = 0;
  double threshold = 0.0;
  double loss = 0.0;
  double target = 0.0;
};

struct CalibrationResult {
  BoundaryTable table;
  bool converged = true;  // all stages reached the band
  std::vector<uint8_t> stage_converged;
  int64_t eval_calls = 0;
  std::vector<CalibrationTracePoint> trace;
};

// Loss of the table with stages > `stage` still at the sentinel.
using StageLossFn = std::function<double(const BoundaryTable&, int stage)>;

// Generic search core.  Throws ConfigError on a malformed constraint set
// (targets size, t_max <= t_min after resolution).
CalibrationResult search_thresholds(const std::vector<int>& candidates,
                                    const LossConstraints& constraints,
                                    const StageLossFn& loss);

// Mean cross-entropy of the simulated net over a calibration set, with
// boundaries chosen by the given table.
double eval_loss(const BoundaryTable& table, const Dataset& calib,
                 const NetDescription& net, const MacroConfig& cfg,
                 uint64_t seed);

// Production calibration: search_thresholds wired to eval_loss.
CalibrationResult calibrate_thresholds(const std::vector<int>& candidates,
                                       const LossConstraints& constraints,
                                       const Dataset& calib,
                                       const NetDescription& net,
                                       const MacroConfig& cfg, uint64_t seed);

}  // namespace hcim
