#include "hcim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hcim {

namespace {

struct StageSearch {
  CalibrationResult* res;
  const StageLossFn* loss;
  int stage;
  double target;
  int iters = 0;

  double eval(double t) {
    res->table.thresholds[stage] = t;
    double l = (*loss)(res->table, stage);
    ++res->eval_calls;
    res->trace.push_back({stage, iters++, t, l, target});
    return l;
  }
};

}  // namespace

CalibrationResult search_thresholds(const std::vector<int>& candidates,
                                    const LossConstraints& constraints,
                                    const StageLossFn& loss) {
  if (candidates.size() < 2)
    throw ConfigError("search_thresholds: need at least two candidates");
  size_t stages = candidates.size() - 1;
  if (constraints.targets.size() != stages)
    throw ConfigError("search_thresholds: need one target per threshold");
  if (!(constraints.epsilon > 0.0))
    throw ConfigError("search_thresholds: epsilon must be positive");
  if (constraints.max_iters < 3)
    throw ConfigError("search_thresholds: max_iters too small");
  double t_max = constraints.t_max;
  if (t_max <= constraints.t_min)
    throw ConfigError("search_thresholds: t_max must exceed t_min");

  CalibrationResult res;
  res.table.candidates = candidates;
  res.table.thresholds.assign(stages, -1.0);  // inactive sentinel
  res.stage_converged.assign(stages, 0);

  double eps = constraints.epsilon;
  for (size_t st = 0; st < stages; ++st) {
    StageSearch s{&res, &loss, static_cast<int>(st),
                  constraints.targets[st]};
    double lo = constraints.t_min;
    double hi = st > 0 ? std::min(t_max, res.table.thresholds[st - 1]) : t_max;
    bool done = false;

    if (hi <= lo) {
      // Earlier stages pinned the range shut; one probe, best effort.
      double l = s.eval(hi);
      res.stage_converged[st] = std::abs(l - s.target) <= eps;
      res.table.thresholds[st] = hi;
      done = true;
    }

    double f_lo = 0.0, f_hi = 0.0;
    if (!done) {
      f_hi = s.eval(hi);
      if (std::abs(f_hi - s.target) <= eps) {
        // In band at the top of the range: take the largest threshold (most
        // work shifted to the cheaper candidate at equal loss).
        res.table.thresholds[st] = hi;
        res.stage_converged[st] = 1;
        done = true;
      }
    }
    if (!done) {
      f_lo = s.eval(lo);
      if (std::abs(f_lo - s.target) <= eps) {
        res.table.thresholds[st] = lo;
        res.stage_converged[st] = 1;
        done = true;
      }
    }

    if (!done && f_lo < s.target && f_hi > s.target) {
      // Endpoints straddle the target as the monotone model predicts.
      double t = 0.5 * (lo + hi);
      while (s.iters < constraints.max_iters) {
        t = 0.5 * (lo + hi);
        double l = s.eval(t);
        if (std::abs(l - s.target) <= eps) {
          res.stage_converged[st] = 1;
          break;
        }
        if (l > s.target)
          hi = t;
        else
          lo = t;
      }
      res.table.thresholds[st] = t;
    } else if (!done) {
      // No straddle (target beyond the range, or endpoints disagree with
      // the monotone model): fixed-step walk, step halved on every
      // direction reversal.  Ends best-effort if the band is never hit.
      double step = constraints.initial_step > 0.0 ? constraints.initial_step
                                                   : (hi - lo) / 8.0;
      double t = 0.5 * (lo + hi);
      int last_dir = 0;
      while (s.iters < constraints.max_iters) {
        double l = s.eval(t);
        if (std::abs(l - s.target) <= eps) {
          res.stage_converged[st] = 1;
          break;
        }
        int dir = l > s.target ? -1 : 1;
        if (last_dir != 0 && dir != last_dir) step *= 0.5;
        last_dir = dir;
        double next = std::clamp(t + dir * step, lo, hi);
        if (next == t) break;  // pinned at a bound; walking is pointless
        t = next;
      }
      res.table.thresholds[st] = t;
    }

    // Projection keeps the table non-increasing even on best-effort exits.
    if (st > 0)
      res.table.thresholds[st] =
          std::min(res.table.thresholds[st], res.table.thresholds[st - 1]);
    if (!res.stage_converged[st]) res.converged = false;
  }

  validate(res.table);
  return res;
}

double eval_loss(const BoundaryTable& table, const Dataset& calib,
                 const NetDescription& net, const MacroConfig& cfg,
                 uint64_t seed) {
  MacroConfig run_cfg = cfg;
  run_cfg.mode = RunMode::osa;
  run_cfg.boundary_table = table;
  ForwardResult fr = forward_dataset(net, calib, run_cfg, seed);

  double total = 0.0;
  for (size_t i = 0; i < fr.logits.size(); ++i) {
    const std::vector<int64_t>& logits = fr.logits[i];
    int label = calib.labels[i];
    if (label < 0 || label >= static_cast<int>(logits.size()))
      throw RangeError("eval_loss: label outside logit range");
    double m = -std::numeric_limits<double>::infinity();
    for (int64_t v : logits)
      m = std::max(m, static_cast<double>(v) * fr.logit_scale);
    double sum = 0.0;
    for (int64_t v : logits)
      sum += std::exp(static_cast<double>(v) * fr.logit_scale - m);
    double correct = static_cast<double>(logits[label]) * fr.logit_scale;
    total += -(correct - m - std::log(sum));
  }
  return total / static_cast<double>(fr.logits.size());
}

CalibrationResult calibrate_thresholds(const std::vector<int>& candidates,
                                       const LossConstraints& constraints,
                                       const Dataset& calib,
                                       const NetDescription& net,
                                       const MacroConfig& cfg, uint64_t seed) {
  LossConstraints c = constraints;
  if (c.t_max <= 0.0)
    c.t_max = static_cast<double>(max_saliency(
        cfg.weight_bits, cfg.act_bits, cfg.saliency_orders, cfg.hmus));
  StageLossFn fn = [&](const BoundaryTable& t, int) {
    return eval_loss(t, calib, net, cfg, seed);
  };
  return search_thresholds(candidates, c, fn);
}

}  // namespace hcim
