// hcim_main.cpp -- batch experiment front-end.
//
// Subcommands: mac, snr-sweep, calibrate, infer, saliency-map, report,
// fit-sigma, fit-energy.  Every run is driven by one JSON experiment
// config plus a seed; identical config and seed give byte-identical
// artifacts.  Exit codes: 0 success, 2 config/usage error, 1 anything
// else; failures print one machine-readable JSON line on stderr.
#include <CLI11.hpp>
#include <algorithm>
#include <array>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <string>
#include <vector>

#include "hcim/calibration.hpp"
#include "hcim/config.hpp"
#include "hcim/harness.hpp"
#include "hcim/macro.hpp"
#include "hcim/net.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace hcim;

namespace {

// ===========================================================================
// Shared plumbing
// ===========================================================================

struct CommonArgs {
  std::string config_path;
  uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& c) {
  cmd->add_option("--config", c.config_path,
                  "Experiment config JSON (omit for built-in defaults)");
  cmd->add_option("--seed", c.seed, "Master seed (overrides the config)")
      ->each([&c](const std::string&) { c.seed_set = true; });
}

ExperimentConfig resolve_config(const CommonArgs& c) {
  ExperimentConfig cfg = c.config_path.empty()
                             ? default_experiment_config()
                             : load_config(c.config_path);
  if (c.seed_set) cfg.seed = c.seed;
  return cfg;
}

// Default artifact location: under the config's out_dir unless --out names
// a path explicitly.
std::string artifact_path(const CommonArgs& c, const ExperimentConfig& cfg,
                          const std::string& default_name) {
  fs::path p = c.out.empty() ? fs::path(cfg.out_dir) / default_name
                             : fs::path(c.out);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p.string();
}

std::string artifact_dir(const CommonArgs& c, const ExperimentConfig& cfg) {
  fs::path p = c.out.empty() ? fs::path(cfg.out_dir) : fs::path(c.out);
  fs::create_directories(p);
  return p.string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error("failed writing '" + path + "'");
}

void write_json(const std::string& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

// Shortest-round-trip double formatting, stable across runs.
std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// "5..10" (inclusive range) or "0,5,9" (comma list).
std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  size_t dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      int lo = std::stoi(text.substr(0, dots));
      int hi = std::stoi(text.substr(dots + 2));
      if (hi < lo) throw UsageError("range '" + text + "' is reversed");
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      size_t pos = 0;
      while (pos <= text.size()) {
        size_t comma = text.find(',', pos);
        std::string tok = text.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!tok.empty()) out.push_back(std::stoi(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
  } catch (const std::invalid_argument&) {
    throw UsageError("cannot parse integer list '" + text + "'");
  } catch (const std::out_of_range&) {
    throw UsageError("integer list '" + text + "' out of range");
  }
  if (out.empty()) throw UsageError("empty integer list '" + text + "'");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  size_t pos = 0;
  try {
    while (pos <= text.size()) {
      size_t comma = text.find(',', pos);
      std::string tok = text.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (!tok.empty()) out.push_back(std::stod(tok));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  } catch (const std::exception&) {
    throw UsageError("cannot parse number list '" + text + "'");
  }
  if (out.empty()) throw UsageError("empty number list '" + text + "'");
  return out;
}

json schedule_json(const Schedule& s) {
  json ev = json::object();
  for (int i = 0; i < kNumEventClasses; ++i)
    ev[to_string(static_cast<EventClass>(i))] = s.events[i];
  return json{{"eval_span", s.eval_span},
              {"digital_span", s.digital_span},
              {"analog_span", s.analog_span},
              {"makespan", s.makespan},
              {"events", ev}};
}

json energy_json(const EnergyReport& r) {
  json per = json::object(), share = json::object();
  for (int i = 0; i < kNumEventClasses; ++i) {
    per[to_string(static_cast<EventClass>(i))] = r.per_class[i];
    share[to_string(static_cast<EventClass>(i))] = r.share[i];
  }
  return json{{"total", r.total}, {"per_class", per}, {"share", share}};
}

json table_json(const BoundaryTable& t) {
  return json{{"candidates", t.candidates}, {"thresholds", t.thresholds}};
}

Dataset load_split(const ExperimentConfig& cfg, const std::string& split,
                   int limit) {
  const FixturePaths& fx = cfg.fixtures;
  Dataset ds = split == "calib"
                   ? load_dataset(fx.calib_images, fx.calib_labels)
                   : load_dataset(fx.test_images, fx.test_labels);
  if (limit > 0 && limit < static_cast<int>(ds.images.size())) {
    ds.images.resize(limit);
    ds.labels.resize(limit);
  }
  return ds;
}

void apply_mode(MacroConfig& macro, const std::string& mode, int boundary) {
  if (mode == "fixed") {
    macro.mode = RunMode::fixed_boundary;
    if (boundary >= 0) macro.fixed_boundary = boundary;
  } else if (mode == "osa") {
    macro.mode = RunMode::osa;
  } else if (!mode.empty()) {
    throw UsageError("unknown mode '" + mode + "' (use fixed or osa)");
  } else if (boundary >= 0) {
    macro.mode = RunMode::fixed_boundary;
    macro.fixed_boundary = boundary;
  }
}

// ===========================================================================
// mac: one invocation, full trace
// ===========================================================================

int cmd_mac(const CommonArgs& c, const std::string& mode, int boundary,
            int bank) {
  ExperimentConfig cfg = resolve_config(c);
  apply_mode(cfg.macro, mode, boundary);
  validate(cfg);
  const MacroConfig& m = cfg.macro;

  RngStream wrng = derive_stream(cfg.seed, {0x3ac, 0});
  RngStream arng = derive_stream(cfg.seed, {0x3ac, 1});
  int banks = m.weight_mode == WeightMode::two_4bit ? 2 : 1;
  int wlo = m.weights_signed ? -(1 << (m.weight_bits - 1)) : 0;
  int whi = m.weights_signed ? (1 << (m.weight_bits - 1)) - 1
                             : (1 << m.weight_bits) - 1;
  std::vector<int32_t> wv(static_cast<size_t>(banks) * m.hmus * m.cols);
  for (auto& x : wv) x = static_cast<int32_t>(wrng.uniform_int(wlo, whi));
  MacroState st = load_weights(
      make_quant_tensor({banks * m.hmus, m.cols}, std::move(wv),
                        m.weight_bits, m.weights_signed, 1.0),
      m);
  std::vector<int32_t> av(m.cols);
  for (auto& x : av)
    x = static_cast<int32_t>(arng.uniform_int(0, (1 << m.act_bits) - 1));
  QuantTensor acts =
      make_quant_tensor({m.cols}, std::move(av), m.act_bits, false, 1.0);

  RunOptions opt;
  opt.weight_bank = bank;
  MacResult r = run_mac(st, acts, m, cfg.seed, opt);

  json per_cycle = json::array();
  for (const auto& [k, sum] : r.saliency.per_cycle)
    per_cycle.push_back(json{{"order", k}, {"code_sum", sum}});
  json j{{"seed", cfg.seed},
         {"mode", m.mode == RunMode::osa ? "osa" : "fixed"},
         {"chosen_boundary", r.chosen_boundary},
         {"saliency", json{{"value", r.saliency.value},
                           {"cycles_used", r.saliency.cycles_used},
                           {"per_cycle", per_cycle}}},
         {"outputs", r.outputs},
         {"exact", r.exact},
         {"error", r.error},
         {"discard_error", r.discard_error},
         {"adc_error", r.adc_error},
         {"schedule", schedule_json(r.schedule)},
         {"energy", energy_json(r.energy)}};
  if (m.mode == RunMode::osa) j["boundary_table"] = table_json(m.boundary_table);

  std::string path = artifact_path(c, cfg, "mac_trace.json");
  write_json(path, j);
  int64_t max_err = 0;
  for (int64_t e : r.error)
    max_err = std::max<int64_t>(max_err, std::llabs(e));
  std::printf("mac: boundary=%d saliency=%" PRId64 " max|error|=%" PRId64
              " makespan=%s energy=%s -> %s\n",
              r.chosen_boundary, r.saliency.value, max_err,
              num(r.schedule.makespan).c_str(), num(r.energy.total).c_str(),
              path.c_str());
  return 0;
}

// ===========================================================================
// snr-sweep: SNR vs boundary CSV
// ===========================================================================

int cmd_snr_sweep(const CommonArgs& c, int w, int a, int s, int window,
                  const std::string& boundaries, int64_t trials,
                  double sigma_override, int adc_override) {
  ExperimentConfig cfg = resolve_config(c);
  AnalogParams p = cfg.macro.analog;
  if (sigma_override >= 0.0) p.noise_sigma = sigma_override;
  if (adc_override > 0) p.adc_bits = adc_override;
  if (w <= 0) w = cfg.macro.weight_bits;
  if (a <= 0) a = cfg.macro.act_bits;
  if (s <= 0) s = cfg.macro.saliency_orders;
  if (window <= 0) window = cfg.macro.window;

  std::string csv = "boundary,snr_db,energy,makespan\n";
  for (int boundary : parse_int_list(boundaries)) {
    SnrOptions so;
    so.cols = cfg.macro.cols;
    so.signed_weights = cfg.macro.weights_signed;
    SnrResult sr =
        measure_snr(w, a, s, boundary, window, p, trials, cfg.seed, so);
    Partition part = partition_grid(w, a, s, boundary, window);
    Schedule sch = build_schedule(part, cfg.macro.timing);
    EnergyReport er = account_energy(sch, cfg.macro.energy);
    double snr = sr.exact ? std::numeric_limits<double>::infinity()
                          : sr.snr_db;
    csv += std::to_string(boundary) + "," + num(snr) + "," + num(er.total) +
           "," + num(sch.makespan) + "\n";
  }
  std::string path = artifact_path(c, cfg, "snr_sweep.csv");
  write_text(path, csv);
  std::printf("snr-sweep: w=%d a=%d s=%d window=%d trials=%" PRId64
              " -> %s\n",
              w, a, s, window, trials, path.c_str());
  return 0;
}

// ===========================================================================
// calibrate: threshold search on the calibration split
// ===========================================================================

int cmd_calibrate(const CommonArgs& c, const std::string& targets_text,
                  const std::string& candidates_text, double epsilon,
                  int max_iters, int limit) {
  ExperimentConfig cfg = resolve_config(c);
  std::vector<int> candidates = candidates_text.empty()
                                    ? cfg.macro.boundary_table.candidates
                                    : parse_int_list(candidates_text);
  LossConstraints lc;
  lc.targets = parse_double_list(targets_text);
  if (epsilon > 0) lc.epsilon = epsilon;
  if (max_iters > 0) lc.max_iters = max_iters;

  NetDescription net = load_net(cfg.fixtures.net);
  Dataset calib = load_split(cfg, "calib", limit);
  CalibrationResult r = calibrate_thresholds(candidates, lc, calib, net,
                                             cfg.macro, cfg.seed);

  std::string dir = artifact_dir(c, cfg);
  json j{{"candidates", r.table.candidates},
         {"thresholds", r.table.thresholds},
         {"converged", r.converged},
         {"stage_converged", r.stage_converged},
         {"eval_calls", r.eval_calls},
         {"targets", lc.targets},
         {"epsilon", lc.epsilon},
         {"images", calib.images.size()},
         {"seed", cfg.seed}};
  write_json(dir + "/calibration.json", j);

  std::string csv = "stage,iteration,threshold,loss,target\n";
  for (const CalibrationTracePoint& p : r.trace)
    csv += std::to_string(p.stage) + "," + std::to_string(p.iteration) + "," +
           num(p.threshold) + "," + num(p.loss) + "," + num(p.target) + "\n";
  write_text(dir + "/calibration_trace.csv", csv);

  std::string thr;
  for (size_t i = 0; i < r.table.thresholds.size(); ++i)
    thr += (i ? "," : "") + num(r.table.thresholds[i]);
  std::printf("calibrate: thresholds=[%s] converged=%s eval_calls=%" PRId64
              " -> %s\n",
              thr.c_str(), r.converged ? "true" : "false", r.eval_calls,
              dir.c_str());
  return r.converged ? 0 : 1;
}

// ===========================================================================
// infer: full report
// ===========================================================================

json report_json(const InferenceReport& rep, const MacroConfig& m) {
  json layers = json::array();
  for (const LayerStats& l : rep.layers) {
    json counts = json::object();
    for (const auto& [b, n] : l.boundary_counts)
      counts[std::to_string(b)] = n;
    layers.push_back(json{{"name", l.name},
                          {"invocations", l.invocations},
                          {"energy", l.energy},
                          {"makespan", l.makespan},
                          {"ops", l.ops},
                          {"boundary_counts", counts}});
  }
  json j{{"mode", m.mode == RunMode::osa ? "osa" : "fixed"},
         {"images", rep.images},
         {"seed", rep.seed},
         {"top1", rep.top1},
         {"total_energy", rep.total_energy},
         {"total_ops", rep.total_ops},
         {"total_invocations", rep.total_invocations},
         {"mean_invocation_makespan", rep.mean_invocation_makespan},
         {"ops_per_energy", rep.total_energy > 0.0
                                ? rep.total_ops / rep.total_energy
                                : 0.0},
         {"layers", layers},
         {"predictions", rep.predictions}};
  if (m.mode == RunMode::osa)
    j["boundary_table"] = table_json(m.boundary_table);
  else
    j["fixed_boundary"] = m.fixed_boundary;
  return j;
}

int cmd_infer(const CommonArgs& c, const std::string& mode, int boundary,
              int limit, const std::string& split) {
  ExperimentConfig cfg = resolve_config(c);
  apply_mode(cfg.macro, mode, boundary);
  validate(cfg);
  NetDescription net = load_net(cfg.fixtures.net);
  Dataset ds = load_split(cfg, split, limit);
  InferenceReport rep = infer(net, ds, cfg.macro, cfg.seed);

  std::string dir = artifact_dir(c, cfg);
  write_json(dir + "/report.json", report_json(rep, cfg.macro));

  std::string layers_csv = "layer,invocations,energy,makespan,ops\n";
  for (const LayerStats& l : rep.layers)
    layers_csv += l.name + "," + std::to_string(l.invocations) + "," +
                  num(l.energy) + "," + num(l.makespan) + "," + num(l.ops) +
                  "\n";
  write_text(dir + "/layers.csv", layers_csv);

  std::string pred_csv = "image,label,prediction,correct\n";
  for (size_t i = 0; i < rep.predictions.size(); ++i)
    pred_csv += std::to_string(i) + "," + std::to_string(ds.labels[i]) + "," +
                std::to_string(rep.predictions[i]) + "," +
                (rep.predictions[i] == ds.labels[i] ? "1" : "0") + "\n";
  write_text(dir + "/predictions.csv", pred_csv);

  std::printf("infer: images=%" PRId64 " top1=%s energy=%s -> %s\n",
              rep.images, num(rep.top1).c_str(),
              num(rep.total_energy).c_str(), dir.c_str());
  return 0;
}

// ===========================================================================
// saliency-map: per-pixel boundary exports
// ===========================================================================

int cmd_saliency_map(const CommonArgs& c, int image, int layer,
                     const std::string& split) {
  ExperimentConfig cfg = resolve_config(c);
  validate(cfg);
  NetDescription net = load_net(cfg.fixtures.net);
  Dataset ds = load_split(cfg, split, 0);
  SaliencyMap m = saliency_map(net, ds, image, layer, cfg.macro, cfg.seed);

  std::string dir = artifact_dir(c, cfg);
  int maxval = min_eval_order(cfg.macro.weight_bits, cfg.macro.act_bits,
                              cfg.macro.saliency_orders);
  std::string pgm = "P2\n" + std::to_string(m.width) + " " +
                    std::to_string(m.height) + "\n" +
                    std::to_string(maxval) + "\n";
  std::string csv = "y,x,boundary\n";
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      int b = m.boundary[static_cast<size_t>(y) * m.width + x];
      pgm += std::to_string(b) + (x + 1 < m.width ? " " : "\n");
      csv += std::to_string(y) + "," + std::to_string(x) + "," +
             std::to_string(b) + "\n";
    }
  }
  write_text(dir + "/saliency_map.pgm", pgm);
  write_text(dir + "/saliency_map.csv", csv);
  std::printf("saliency-map: image=%d layer=%d size=%dx%d -> %s\n", image,
              layer, m.width, m.height, dir.c_str());
  return 0;
}

// ===========================================================================
// report: accuracy-vs-energy frontier
// ===========================================================================

int cmd_report(const CommonArgs& c, const std::string& boundaries,
               bool no_osa, int limit, const std::string& split) {
  ExperimentConfig cfg = resolve_config(c);
  validate(cfg);
  NetDescription net = load_net(cfg.fixtures.net);
  Dataset ds = load_split(cfg, split, limit);

  std::string csv =
      "mode,boundary,top1,total_energy,total_ops,mean_invocation_makespan\n";
  for (int b : parse_int_list(boundaries)) {
    MacroConfig m = cfg.macro;
    m.mode = RunMode::fixed_boundary;
    m.fixed_boundary = b;
    validate(m);
    InferenceReport rep = infer(net, ds, m, cfg.seed);
    csv += "fixed," + std::to_string(b) + "," + num(rep.top1) + "," +
           num(rep.total_energy) + "," + num(rep.total_ops) + "," +
           num(rep.mean_invocation_makespan) + "\n";
  }
  if (!no_osa) {
    MacroConfig m = cfg.macro;
    m.mode = RunMode::osa;
    validate(m);
    InferenceReport rep = infer(net, ds, m, cfg.seed);
    csv += "osa,-1," + num(rep.top1) + "," + num(rep.total_energy) + "," +
           num(rep.total_ops) + "," + num(rep.mean_invocation_makespan) +
           "\n";
  }
  std::string path = artifact_path(c, cfg, "frontier.csv");
  write_text(path, csv);
  std::printf("report: images=%zu -> %s\n", ds.images.size(), path.c_str());
  return 0;
}

// ===========================================================================
// fit-sigma: find the noise level for a target SNR operating point
// ===========================================================================

int cmd_fit_sigma(const CommonArgs& c, int boundary, double target_db,
                  int64_t trials, double lo, double hi, int iters) {
  ExperimentConfig cfg = resolve_config(c);
  const MacroConfig& m = cfg.macro;
  AnalogParams p = m.analog;
  SnrOptions so;
  so.cols = m.cols;
  so.signed_weights = m.weights_signed;

  auto snr_at = [&](double sigma) {
    AnalogParams q = p;
    q.noise_sigma = sigma;
    return measure_snr(m.weight_bits, m.act_bits, m.saliency_orders, boundary,
                       m.window, q, trials, cfg.seed, so)
        .snr_db;
  };
  double f_lo = snr_at(lo), f_hi = snr_at(hi);
  if (f_lo < target_db)
    throw Error("fit-sigma: target " + num(target_db) +
                " dB unreachable even at sigma=" + num(lo) + " (" +
                num(f_lo) + " dB); raise --trials or lower the target");
  double sigma = hi;
  if (f_hi > target_db) {
    // Even the loudest bracket end is above target; keep hi.
  } else {
    for (int it = 0; it < iters; ++it) {
      sigma = 0.5 * (lo + hi);
      double s = snr_at(sigma);
      if (s > target_db)
        lo = sigma;
      else
        hi = sigma;
    }
    sigma = 0.5 * (lo + hi);
  }
  double achieved = snr_at(sigma);

  json j{{"sigma", sigma},        {"achieved_db", achieved},
         {"target_db", target_db}, {"boundary", boundary},
         {"trials", trials},       {"seed", cfg.seed},
         {"adc_bits", p.adc_bits}};
  std::string path = artifact_path(c, cfg, "fit_sigma.json");
  write_json(path, j);
  std::printf("fit-sigma: sigma=%s snr=%s dB (target %s) -> %s\n",
              num(sigma).c_str(), num(achieved).c_str(),
              num(target_db).c_str(), path.c_str());
  return 0;
}

// ===========================================================================
// fit-energy: unit costs hitting the ADC/OSE share anchors
// ===========================================================================

int cmd_fit_energy(const CommonArgs& c, double adc_share, double ose_share,
                   int limit, const std::string& split) {
  ExperimentConfig cfg = resolve_config(c);
  validate(cfg);
  NetDescription net = load_net(cfg.fixtures.net);
  Dataset ds = load_split(cfg, split, limit);
  InferenceReport rep = infer(net, ds, cfg.macro, cfg.seed);

  // Event totals over the workload: rebuild per-class counts by rerunning
  // the schedule per boundary bucket.
  std::array<double, kNumEventClasses> counts{};
  for (const LayerStats& l : rep.layers) {
    for (const auto& [b, n] : l.boundary_counts) {
      Partition part =
          partition_grid(cfg.macro.weight_bits, cfg.macro.act_bits,
                         cfg.macro.saliency_orders, b, cfg.macro.window);
      Schedule s = build_schedule(part, cfg.macro.timing);
      for (int i = 0; i < kNumEventClasses; ++i)
        counts[i] += static_cast<double>(s.events[i]) * n;
    }
  }

  // Anchor classes get their cost from the target shares; the rest keep
  // the configured relative costs.
  int i_adc = static_cast<int>(EventClass::adc_convert);
  int i_ose = static_cast<int>(EventClass::ose_eval);
  double rest = 0.0;
  for (int i = 0; i < kNumEventClasses; ++i) {
    if (i == i_adc || i == i_ose) continue;
    if (cfg.macro.energy.unit_cost[i] < 0.0)
      throw ConfigError("fit-energy: cost for '" +
                        std::string(to_string(static_cast<EventClass>(i))) +
                        "' missing from the config");
    rest += counts[i] * cfg.macro.energy.unit_cost[i];
  }
  double other_share = 1.0 - adc_share - ose_share;
  if (other_share <= 0.0)
    throw UsageError("fit-energy: shares must leave room for the rest");
  if (counts[i_adc] <= 0.0 || counts[i_ose] <= 0.0)
    throw DegenerateInputError(
        "fit-energy: workload produced no ADC or OSE events");
  double total = rest / other_share;
  EnergyModel fitted = cfg.macro.energy;
  fitted.unit_cost[i_adc] = adc_share * total / counts[i_adc];
  fitted.unit_cost[i_ose] = ose_share * total / counts[i_ose];

  // Verify the fit by re-accounting the workload.
  std::array<double, kNumEventClasses> per{};
  double check_total = 0.0;
  for (int i = 0; i < kNumEventClasses; ++i) {
    per[i] = counts[i] * fitted.unit_cost[i];
    check_total += per[i];
  }
  json costs = json::object(), shares = json::object();
  for (int i = 0; i < kNumEventClasses; ++i) {
    costs[to_string(static_cast<EventClass>(i))] = fitted.unit_cost[i];
    shares[to_string(static_cast<EventClass>(i))] = per[i] / check_total;
  }
  json j{{"unit_costs", costs},
         {"achieved_shares", shares},
         {"target_adc_share", adc_share},
         {"target_ose_share", ose_share},
         {"images", ds.images.size()},
         {"seed", cfg.seed}};
  std::string path = artifact_path(c, cfg, "fit_energy.json");
  write_json(path, j);
  std::printf("fit-energy: adc_cost=%s ose_cost=%s adc_share=%s -> %s\n",
              num(fitted.unit_cost[i_adc]).c_str(),
              num(fitted.unit_cost[i_ose]).c_str(),
              num(per[i_adc] / check_total).c_str(), path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Saliency-aware hybrid digital/analog CIM macro simulator"};
  app.require_subcommand(1);

  CommonArgs c_mac, c_snr, c_cal, c_inf, c_sal, c_rep, c_fsig, c_fen;

  auto* mac = app.add_subcommand("mac", "Run one MAC invocation, dump trace");
  add_common(mac, c_mac);
  mac->add_option("--out", c_mac.out, "Trace JSON path");
  std::string mac_mode;
  int mac_boundary = -1, mac_bank = 0;
  mac->add_option("--mode", mac_mode, "fixed or osa (default: config)");
  mac->add_option("--boundary", mac_boundary, "Fixed boundary override");
  mac->add_option("--bank", mac_bank, "Weight bank (two_4bit mode)");

  auto* snr = app.add_subcommand("snr-sweep", "SNR vs boundary CSV");
  add_common(snr, c_snr);
  snr->add_option("--out", c_snr.out, "CSV path");
  int snr_w = 0, snr_a = 0, snr_s = 0, snr_window = 0, snr_adc = 0;
  int64_t snr_trials = 10000;
  double snr_sigma = -1.0;
  std::string snr_bounds = "5..10";
  snr->add_option("--w", snr_w, "Weight bits (default: config)");
  snr->add_option("--a", snr_a, "Activation bits (default: config)");
  snr->add_option("--s", snr_s, "Saliency orders (default: config)");
  snr->add_option("--window", snr_window, "Analog window (default: config)");
  snr->add_option("--boundaries", snr_bounds, "Range lo..hi or comma list");
  snr->add_option("--trials", snr_trials, "Jobs per boundary");
  snr->add_option("--sigma", snr_sigma, "Noise sigma (default: config)");
  snr->add_option("--adc-bits", snr_adc, "ADC bits (default: config)");

  auto* cal = app.add_subcommand("calibrate", "Search boundary thresholds");
  add_common(cal, c_cal);
  cal->add_option("--out", c_cal.out, "Artifact directory");
  std::string cal_targets, cal_candidates;
  double cal_epsilon = 0.0;
  int cal_iters = 0, cal_limit = 0;
  cal->add_option("--targets", cal_targets, "Loss targets, one per stage")
      ->required();
  cal->add_option("--candidates", cal_candidates,
                  "Boundary candidates (default: config table)");
  cal->add_option("--epsilon", cal_epsilon, "Band half-width");
  cal->add_option("--max-iters", cal_iters, "Loss evaluations per stage");
  cal->add_option("--limit", cal_limit, "Cap calibration images");

  auto* inf = app.add_subcommand("infer", "Run inference, write reports");
  add_common(inf, c_inf);
  inf->add_option("--out", c_inf.out, "Artifact directory");
  std::string inf_mode, inf_split = "test";
  int inf_boundary = -1, inf_limit = 0;
  inf->add_option("--mode", inf_mode, "fixed or osa (default: config)");
  inf->add_option("--boundary", inf_boundary, "Fixed boundary override");
  inf->add_option("--limit", inf_limit, "Cap images");
  inf->add_option("--split", inf_split, "test or calib");

  auto* sal = app.add_subcommand("saliency-map",
                                 "Per-pixel boundary map (PGM + CSV)");
  add_common(sal, c_sal);
  sal->add_option("--out", c_sal.out, "Artifact directory");
  int sal_image = 0, sal_layer = 0;
  std::string sal_split = "test";
  sal->add_option("--image", sal_image, "Image index");
  sal->add_option("--layer", sal_layer, "Conv layer index in the net");
  sal->add_option("--split", sal_split, "test or calib");

  auto* rep = app.add_subcommand("report", "Accuracy-vs-energy frontier CSV");
  add_common(rep, c_rep);
  rep->add_option("--out", c_rep.out, "CSV path");
  std::string rep_bounds = "0,5,7,9,11";
  bool rep_no_osa = false;
  int rep_limit = 0;
  std::string rep_split = "test";
  rep->add_option("--boundaries", rep_bounds, "Fixed boundaries to sweep");
  rep->add_flag("--no-osa", rep_no_osa, "Skip the OSA row");
  rep->add_option("--limit", rep_limit, "Cap images");
  rep->add_option("--split", rep_split, "test or calib");

  auto* fsig = app.add_subcommand("fit-sigma",
                                  "Fit noise sigma to a target SNR");
  add_common(fsig, c_fsig);
  fsig->add_option("--out", c_fsig.out, "Result JSON path");
  int fsig_boundary = 5, fsig_iters = 40;
  double fsig_target = 40.0, fsig_lo = 1e-4, fsig_hi = 0.5;
  int64_t fsig_trials = 4000;
  fsig->add_option("--boundary", fsig_boundary, "Operating-point boundary");
  fsig->add_option("--target-db", fsig_target, "Target SNR in dB");
  fsig->add_option("--trials", fsig_trials, "Jobs per probe");
  fsig->add_option("--lo", fsig_lo, "Sigma bracket low end");
  fsig->add_option("--hi", fsig_hi, "Sigma bracket high end");
  fsig->add_option("--iters", fsig_iters, "Bisection iterations");

  auto* fen = app.add_subcommand("fit-energy",
                                 "Fit ADC/OSE unit costs to share targets");
  add_common(fen, c_fen);
  fen->add_option("--out", c_fen.out, "Result JSON path");
  double fen_adc = 0.17, fen_ose = 0.01;
  int fen_limit = 16;
  std::string fen_split = "calib";
  fen->add_option("--adc-share", fen_adc, "Target ADC energy share");
  fen->add_option("--ose-share", fen_ose, "Target OSE energy share");
  fen->add_option("--limit", fen_limit, "Cap images");
  fen->add_option("--split", fen_split, "test or calib");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fflush(stdout);
    std::fprintf(stderr, "%s\n", app.help().c_str());
    json err{{"error", {{"type", "usage"}, {"message", e.what()}}}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 2;
  }

  try {
    if (mac->parsed()) return cmd_mac(c_mac, mac_mode, mac_boundary, mac_bank);
    if (snr->parsed())
      return cmd_snr_sweep(c_snr, snr_w, snr_a, snr_s, snr_window, snr_bounds,
                           snr_trials, snr_sigma, snr_adc);
    if (cal->parsed())
      return cmd_calibrate(c_cal, cal_targets, cal_candidates, cal_epsilon,
                           cal_iters, cal_limit);
    if (inf->parsed())
      return cmd_infer(c_inf, inf_mode, inf_boundary, inf_limit, inf_split);
    if (sal->parsed())
      return cmd_saliency_map(c_sal, sal_image, sal_layer, sal_split);
    if (rep->parsed())
      return cmd_report(c_rep, rep_bounds, rep_no_osa, rep_limit, rep_split);
    if (fsig->parsed())
      return cmd_fit_sigma(c_fsig, fsig_boundary, fsig_target, fsig_trials,
                           fsig_lo, fsig_hi, fsig_iters);
    if (fen->parsed())
      return cmd_fit_energy(c_fen, fen_adc, fen_ose, fen_limit, fen_split);
  } catch (const ConfigError& e) {
    json err{{"error", {{"type", "config"}, {"message", e.what()}}}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 2;
  } catch (const UsageError& e) {
    json err{{"error", {{"type", "usage"}, {"message", e.what()}}}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 2;
  } catch (const std::exception& e) {
    json err{{"error", {{"type", "runtime"}, {"message", e.what()}}}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
  }
  return 0;
}
