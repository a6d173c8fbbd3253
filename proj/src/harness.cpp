#include "hcim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <thread>

namespace hcim {

namespace {

// ===========================================================================
// Layer preparation (weights loaded once, reused across images)
// ===========================================================================

struct PreparedBlock {
  MacroState state;
  int group_size = 0;  // real output units in this HMU group
  int tile_len = 0;    // real columns in this tile
};

struct PreparedLayer {
  const ConvLayer* conv = nullptr;
  const FcLayer* fc = nullptr;
  std::string name;
  TilePlan plan;
  size_t layer_index = 0;  // position in net.layers
  std::vector<PreparedBlock> blocks;  // [group * col_tiles + tile]
};

struct PreparedNet {
  std::vector<PreparedLayer> compute;
  double logit_scale = 1.0;
};

int ceil_div(int a, int b) { return (a + b - 1) / b; }

TilePlan make_plan(int patch_len, int out_units, const MacroConfig& cfg) {
  if (patch_len < 1 || out_units < 1)
    throw ShapeError("map_layer: empty layer");
  TilePlan p;
  p.patch_len = patch_len;
  p.out_units = out_units;
  p.col_tiles = ceil_div(patch_len, cfg.cols);
  p.hmu_groups = ceil_div(out_units, cfg.hmus);
  return p;
}

// Pack the weight block of one (group, tile) pair: rows are output units,
// columns are a patch slice, zero-padded to the macro width.
PreparedBlock make_block(const std::vector<int32_t>& flat_weights,
                         int patch_len, int out_units, int group, int tile,
                         double scale, const MacroConfig& cfg) {
  PreparedBlock b;
  b.group_size = std::min(cfg.hmus, out_units - group * cfg.hmus);
  b.tile_len = std::min(cfg.cols, patch_len - tile * cfg.cols);
  std::vector<int32_t> vals(static_cast<size_t>(cfg.hmus) * cfg.cols, 0);
  for (int h = 0; h < b.group_size; ++h) {
    int unit = group * cfg.hmus + h;
    const int32_t* src = flat_weights.data() +
                         static_cast<int64_t>(unit) * patch_len +
                         static_cast<int64_t>(tile) * cfg.cols;
    std::copy(src, src + b.tile_len, vals.begin() + h * cfg.cols);
  }
  QuantTensor wt = make_quant_tensor({cfg.hmus, cfg.cols}, std::move(vals),
                                     cfg.weight_bits, cfg.weights_signed,
                                     scale);
  b.state = load_weights(wt, cfg);
  return b;
}

PreparedNet prepare_net(const NetDescription& net, const MacroConfig& cfg) {
  validate(net);
  validate(cfg);
  if (cfg.weight_mode != WeightMode::one_8bit)
    throw ConfigError("harness: network mapping uses one_8bit weight mode");
  PreparedNet pn;
  double act_scale = net.input_scale;
  for (size_t li = 0; li < net.layers.size(); ++li) {
    const Layer& l = net.layers[li];
    if (const auto* cv = std::get_if<ConvLayer>(&l)) {
      PreparedLayer pl;
      pl.conv = cv;
      pl.name = cv->name;
      pl.layer_index = li;
      pl.plan = make_plan(cv->in_ch * cv->kernel * cv->kernel, cv->out_ch,
                          cfg);
      for (int g = 0; g < pl.plan.hmu_groups; ++g)
        for (int t = 0; t < pl.plan.col_tiles; ++t)
          pl.blocks.push_back(make_block(cv->weight.values,
                                         pl.plan.patch_len, cv->out_ch, g, t,
                                         cv->weight_scale, cfg));
      pn.compute.push_back(std::move(pl));
      act_scale *= cv->weight_scale;
    } else if (const auto* fc = std::get_if<FcLayer>(&l)) {
      PreparedLayer pl;
      pl.fc = fc;
      pl.name = fc->name;
      pl.layer_index = li;
      pl.plan = make_plan(fc->in_features, fc->out_features, cfg);
      for (int g = 0; g < pl.plan.hmu_groups; ++g)
        for (int t = 0; t < pl.plan.col_tiles; ++t)
          pl.blocks.push_back(make_block(fc->weight.values,
                                         pl.plan.patch_len, fc->out_features,
                                         g, t, fc->weight_scale, cfg));
      pn.compute.push_back(std::move(pl));
      act_scale *= fc->weight_scale;
    } else if (const auto* q = std::get_if<QuantizeLayer>(&l)) {
      act_scale = q->scale;
    }
  }
  pn.logit_scale = act_scale;
  return pn;
}

// ===========================================================================
// Forward pass
// ===========================================================================

struct Tensor3 {
  int c = 0, h = 0, w = 0;
  std::vector<int64_t> v;  // channel-major
  int64_t at(int ci, int yi, int xi) const {
    return v[(static_cast<size_t>(ci) * h + yi) * w + xi];
  }
};

struct ImageOut {
  std::vector<int64_t> logits;
  int prediction = 0;
  std::vector<LayerStats> layers;
};

constexpr double kMacBitNorm = 64.0;  // 8b x 8b reference for op counting

// One compute layer over one already-built patch: run every (group, tile)
// block and add the partial sums into acc (length out_units).
void run_patch(const PreparedLayer& pl, const std::vector<int32_t>& patch,
               double patch_scale, int pixel, const MacroConfig& cfg,
               uint64_t seed, uint64_t image_id, LayerStats& stats,
               int* pixel_boundary, std::vector<int64_t>& acc) {
  const TilePlan& plan = pl.plan;
  for (int g = 0; g < plan.hmu_groups; ++g) {
    for (int t = 0; t < plan.col_tiles; ++t) {
      const PreparedBlock& b = pl.blocks[g * plan.col_tiles + t];
      std::vector<int32_t> vals(cfg.cols, 0);
      std::copy(patch.begin() + t * cfg.cols,
                patch.begin() + t * cfg.cols + b.tile_len, vals.begin());
      QuantTensor acts = make_quant_tensor(
          {cfg.cols}, std::move(vals), cfg.act_bits, false, patch_scale);
      uint64_t inv_seed =
          derive_stream(seed, {image_id, static_cast<uint64_t>(pl.layer_index),
                               static_cast<uint64_t>(pixel),
                               static_cast<uint64_t>(t),
                               static_cast<uint64_t>(g)})
              .next_u64();
      RunOptions opt;
      opt.active_cols = b.tile_len;
      MacResult r = run_mac(b.state, acts, cfg, inv_seed, opt);
      for (int h = 0; h < b.group_size; ++h)
        acc[g * cfg.hmus + h] += r.outputs[h];
      ++stats.invocations;
      stats.energy += r.energy.total;
      stats.makespan += r.schedule.makespan;
      stats.ops += cfg.energy.ops_per_mac * b.tile_len * b.group_size *
                   (static_cast<double>(cfg.weight_bits) * cfg.act_bits /
                    kMacBitNorm);
      ++stats.boundary_counts[r.chosen_boundary];
      if (pixel_boundary)
        *pixel_boundary = std::max(*pixel_boundary, r.chosen_boundary);
    }
  }
}

ImageOut run_image(const PreparedNet& pn, const NetDescription& net,
                   const std::vector<uint8_t>& image, const MacroConfig& cfg,
                   uint64_t seed, uint64_t image_id, int saliency_layer,
                   SaliencyMap* smap) {
  ImageOut out;
  for (const PreparedLayer& pl : pn.compute)
    out.layers.push_back(LayerStats{pl.name, 0, 0.0, 0.0, 0.0, {}});

  Tensor3 cur;
  cur.c = net.in_ch;
  cur.h = net.in_h;
  cur.w = net.in_w;
  cur.v.assign(image.begin(), image.end());
  double cur_scale = net.input_scale;
  int cur_bits = net.input_bits;
  bool quantized = true;  // input arrives quantized

  size_t compute_idx = 0;
  std::vector<int32_t> patch;
  for (size_t li = 0; li < net.layers.size(); ++li) {
    const Layer& l = net.layers[li];
    if (const auto* cv = std::get_if<ConvLayer>(&l)) {
      if (!quantized || cur_bits != cfg.act_bits)
        throw ConfigError("harness: conv '" + cv->name +
                          "' needs quantized activations at act_bits");
      if (cur.c != cv->in_ch)
        throw ShapeError("harness: conv '" + cv->name + "' channel mismatch");
      const PreparedLayer& pl = pn.compute[compute_idx];
      LayerStats& stats = out.layers[compute_idx];
      int oh = (cur.h + 2 * cv->pad - cv->kernel) / cv->stride + 1;
      int ow = (cur.w + 2 * cv->pad - cv->kernel) / cv->stride + 1;
      if (oh < 1 || ow < 1)
        throw ShapeError("harness: conv '" + cv->name +
                         "' output would be empty");
      bool track = static_cast<int>(li) == saliency_layer;
      if (track) {
        smap->height = oh;
        smap->width = ow;
        smap->boundary.assign(static_cast<size_t>(oh) * ow, -1);
      }
      Tensor3 next;
      next.c = cv->out_ch;
      next.h = oh;
      next.w = ow;
      next.v.assign(static_cast<size_t>(cv->out_ch) * oh * ow, 0);
      patch.assign(pl.plan.col_tiles * cfg.cols, 0);
      std::vector<int64_t> acc(pl.plan.hmu_groups * cfg.hmus, 0);
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          std::fill(patch.begin(), patch.end(), 0);
          int idx = 0;
          for (int ci = 0; ci < cv->in_ch; ++ci)
            for (int ky = 0; ky < cv->kernel; ++ky)
              for (int kx = 0; kx < cv->kernel; ++kx, ++idx) {
                int iy = oy * cv->stride - cv->pad + ky;
                int ix = ox * cv->stride - cv->pad + kx;
                if (iy >= 0 && iy < cur.h && ix >= 0 && ix < cur.w)
                  patch[idx] = static_cast<int32_t>(cur.at(ci, iy, ix));
              }
          std::fill(acc.begin(), acc.end(), 0);
          int pixel = oy * ow + ox;
          int* pb = track ? &smap->boundary[pixel] : nullptr;
          run_patch(pl, patch, cur_scale, pixel, cfg, seed, image_id, stats,
                    pb, acc);
          for (int oc = 0; oc < cv->out_ch; ++oc)
            next.v[(static_cast<size_t>(oc) * oh + oy) * ow + ox] =
                acc[oc] + cv->bias[oc];
        }
      }
      cur = std::move(next);
      cur_scale *= cv->weight_scale;
      quantized = false;
      ++compute_idx;
    } else if (const auto* fc = std::get_if<FcLayer>(&l)) {
      if (!quantized || cur_bits != cfg.act_bits)
        throw ConfigError("harness: fc '" + fc->name +
                          "' needs quantized activations at act_bits");
      if (static_cast<int>(cur.v.size()) != fc->in_features)
        throw ShapeError("harness: fc '" + fc->name + "' input size mismatch");
      const PreparedLayer& pl = pn.compute[compute_idx];
      LayerStats& stats = out.layers[compute_idx];
      patch.assign(pl.plan.col_tiles * cfg.cols, 0);
      for (int i = 0; i < fc->in_features; ++i)
        patch[i] = static_cast<int32_t>(cur.v[i]);
      std::vector<int64_t> acc(pl.plan.hmu_groups * cfg.hmus, 0);
      run_patch(pl, patch, cur_scale, 0, cfg, seed, image_id, stats, nullptr,
                acc);
      Tensor3 next;
      next.c = fc->out_features;
      next.h = 1;
      next.w = 1;
      for (int u = 0; u < fc->out_features; ++u)
        next.v.push_back(acc[u] + fc->bias[u]);
      cur = std::move(next);
      cur_scale *= fc->weight_scale;
      quantized = false;
      ++compute_idx;
    } else if (std::get_if<ReluLayer>(&l)) {
      for (int64_t& v : cur.v) v = std::max<int64_t>(v, 0);
    } else if (const auto* pool = std::get_if<PoolLayer>(&l)) {
      int oh = (cur.h - pool->size) / pool->stride + 1;
      int ow = (cur.w - pool->size) / pool->stride + 1;
      if (oh < 1 || ow < 1) throw ShapeError("harness: pool output empty");
      Tensor3 next;
      next.c = cur.c;
      next.h = oh;
      next.w = ow;
      next.v.assign(static_cast<size_t>(cur.c) * oh * ow, 0);
      for (int ci = 0; ci < cur.c; ++ci)
        for (int oy = 0; oy < oh; ++oy)
          for (int ox = 0; ox < ow; ++ox) {
            int64_t m = std::numeric_limits<int64_t>::min();
            for (int ky = 0; ky < pool->size; ++ky)
              for (int kx = 0; kx < pool->size; ++kx)
                m = std::max(m, cur.at(ci, oy * pool->stride + ky,
                                       ox * pool->stride + kx));
            next.v[(static_cast<size_t>(ci) * oh + oy) * ow + ox] = m;
          }
      cur = std::move(next);
    } else if (const auto* q = std::get_if<QuantizeLayer>(&l)) {
      double factor = cur_scale / q->scale;
      int64_t hi = (1ll << q->bits) - 1;
      for (int64_t& v : cur.v)
        v = std::clamp<int64_t>(
            std::llround(static_cast<double>(v) * factor), 0, hi);
      cur_scale = q->scale;
      cur_bits = q->bits;
      quantized = true;
    }
  }

  out.logits = cur.v;
  out.prediction = static_cast<int>(
      std::max_element(out.logits.begin(), out.logits.end()) -
      out.logits.begin());
  return out;
}

// ===========================================================================
// Parallel image loop
// ===========================================================================

int thread_cap() {
  unsigned hw = std::thread::hardware_concurrency();
  int cap = hw > 0 ? static_cast<int>(hw) : 1;
  if (const char* env = std::getenv("HCIM_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw ConfigError("HCIM_THREADS must be a positive integer");
    cap = std::min<long>(cap, v);
  }
  return cap;
}

template <typename Fn>
void parallel_images(int64_t n, Fn&& fn) {
  int workers = std::min<int64_t>(thread_cap(), n);
  if (workers <= 1) {
    for (int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int64_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex err_mu;
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (;;) {
        int64_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

void check_dims(const NetDescription& net, const Dataset& ds) {
  if (ds.height != net.in_h || ds.width != net.in_w ||
      ds.channels != net.in_ch)
    throw ShapeError("dataset dimensions do not match the network input");
  if (ds.images.empty()) throw DegenerateInputError("dataset is empty");
}

}  // namespace

TilePlan map_layer(const ConvLayer& l, const MacroConfig& cfg) {
  validate(cfg);
  return make_plan(l.in_ch * l.kernel * l.kernel, l.out_ch, cfg);
}

TilePlan map_layer(const FcLayer& l, const MacroConfig& cfg) {
  validate(cfg);
  return make_plan(l.in_features, l.out_features, cfg);
}

InferenceReport infer(const NetDescription& net, const Dataset& ds,
                      const MacroConfig& cfg, uint64_t seed) {
  check_dims(net, ds);
  PreparedNet pn = prepare_net(net, cfg);
  int64_t n = static_cast<int64_t>(ds.images.size());
  std::vector<ImageOut> outs(n);
  parallel_images(n, [&](int64_t i) {
    outs[i] = run_image(pn, net, ds.images[i], cfg, seed,
                        static_cast<uint64_t>(i), -1, nullptr);
  });

  InferenceReport rep;
  rep.images = n;
  rep.seed = seed;
  for (const PreparedLayer& pl : pn.compute)
    rep.layers.push_back(LayerStats{pl.name, 0, 0.0, 0.0, 0.0, {}});
  int64_t correct = 0;
  double makespan_sum = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const ImageOut& o = outs[i];
    rep.predictions.push_back(o.prediction);
    if (o.prediction == ds.labels[i]) ++correct;
    for (size_t l = 0; l < o.layers.size(); ++l) {
      LayerStats& dst = rep.layers[l];
      const LayerStats& src = o.layers[l];
      dst.invocations += src.invocations;
      dst.energy += src.energy;
      dst.makespan += src.makespan;
      dst.ops += src.ops;
      for (const auto& [b, c] : src.boundary_counts)
        dst.boundary_counts[b] += c;
    }
  }
  for (const LayerStats& l : rep.layers) {
    rep.total_energy += l.energy;
    rep.total_ops += l.ops;
    rep.total_invocations += l.invocations;
    makespan_sum += l.makespan;
  }
  rep.top1 = static_cast<double>(correct) / static_cast<double>(n);
  rep.mean_invocation_makespan =
      rep.total_invocations > 0 ? makespan_sum / rep.total_invocations : 0.0;
  return rep;
}

ForwardResult forward_dataset(const NetDescription& net, const Dataset& ds,
                              const MacroConfig& cfg, uint64_t seed) {
  check_dims(net, ds);
  PreparedNet pn = prepare_net(net, cfg);
  int64_t n = static_cast<int64_t>(ds.images.size());
  ForwardResult fr;
  fr.logits.resize(n);
  fr.logit_scale = pn.logit_scale;
  parallel_images(n, [&](int64_t i) {
    fr.logits[i] = run_image(pn, net, ds.images[i], cfg, seed,
                             static_cast<uint64_t>(i), -1, nullptr)
                       .logits;
  });
  return fr;
}

SaliencyMap saliency_map(const NetDescription& net, const Dataset& ds,
                         int image_index, int layer_index,
                         const MacroConfig& cfg, uint64_t seed) {
  check_dims(net, ds);
  if (image_index < 0 ||
      image_index >= static_cast<int>(ds.images.size()))
    throw UsageError("saliency_map: image index out of range");
  if (layer_index < 0 ||
      layer_index >= static_cast<int>(net.layers.size()) ||
      !std::holds_alternative<ConvLayer>(net.layers[layer_index]))
    throw UsageError("saliency_map: layer_index must name a conv layer");
  PreparedNet pn = prepare_net(net, cfg);
  SaliencyMap smap;
  run_image(pn, net, ds.images[image_index], cfg, seed,
            static_cast<uint64_t>(image_index), layer_index, &smap);
  return smap;
}

std::vector<LayerHistogram> boundary_histogram(const InferenceReport& rep) {
  std::vector<LayerHistogram> out;
  for (const LayerStats& l : rep.layers) {
    LayerHistogram h;
    h.name = l.name;
    int64_t total = 0;
    for (const auto& [b, c] : l.boundary_counts) total += c;
    for (const auto& [b, c] : l.boundary_counts)
      h.proportions.emplace_back(
          b, total > 0 ? static_cast<double>(c) / total : 0.0);
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace hcim
