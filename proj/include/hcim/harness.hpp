// harness.hpp -- mapping a quantized net onto the macro and running it.
//
// Conv layers run as im2col: each output pixel's patch is a dot product of
// length in_ch * k * k (channel-major, then kernel row, then column).
// Patches longer than the column count split into column tiles; output
// channels split into HMU groups of at most `hmus`.  Tiles are zero-padded
// to the full column width and their partial sums add exactly (integer
// addition), so tiling never changes full-digital results.  FC layers map
// the same way with the flattened CHW input as the patch.
//
// Per-invocation seeds derive from (seed, image, layer, pixel, tile,
// group), so image- and tile-level parallelism cannot change any result.
// The HCIM_THREADS environment variable caps worker threads.
//
// Boundary bookkeeping: every invocation's chosen boundary lands in the
// per-layer histogram; the per-pixel saliency map records the maximum
// (least precise) boundary over the invocations that computed that pixel.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hcim/macro.hpp"
#include "hcim/net.hpp"

namespace hcim {

// Static tiling split for one compute layer.
struct TilePlan {
  int patch_len = 0;   // flattened dot-product length
  int out_units = 0;   // output channels / features
  int col_tiles = 0;   // ceil(patch_len / cols)
  int hmu_groups = 0;  // ceil(out_units / hmus)
};

TilePlan map_layer(const ConvLayer& l, const MacroConfig& cfg);
TilePlan map_layer(const FcLayer& l, const MacroConfig& cfg);

struct LayerStats {
  std::string name;
  int64_t invocations = 0;
  double energy = 0.0;
  double makespan = 0.0;  // summed over invocations
  double ops = 0.0;
  std::map<int, int64_t> boundary_counts;
};

struct InferenceReport {
  int64_t images = 0;
  uint64_t seed = 0;
  double top1 = 0.0;
  double total_energy = 0.0;
  double total_ops = 0.0;
  int64_t total_invocations = 0;
  double mean_invocation_makespan = 0.0;
  std::vector<LayerStats> layers;  // compute layers, in network order
  std::vector<int> predictions;
};

InferenceReport infer(const NetDescription& net, const Dataset& ds,
                      const MacroConfig& cfg, uint64_t seed);

// Logit-level forward pass (used by calibration).  logit_scale converts
// the integer logits to real units.
struct ForwardResult {
  std::vector<std::vector<int64_t>> logits;
  double logit_scale = 1.0;
};

ForwardResult forward_dataset(const NetDescription& net, const Dataset& ds,
                              const MacroConfig& cfg, uint64_t seed);

// Chosen boundary per output pixel of one conv layer on one image.
// layer_index addresses net.layers and must name a conv layer.
struct SaliencyMap {
  int height = 0;
  int width = 0;
  std::vector<int> boundary;  // row-major
};

SaliencyMap saliency_map(const NetDescription& net, const Dataset& ds,
                         int image_index, int layer_index,
                         const MacroConfig& cfg, uint64_t seed);

// Per-layer boundary usage proportions (sum to 1 per layer).
struct LayerHistogram {
  std::string name;
  std::vector<std::pair<int, double>> proportions;
};

std::vector<LayerHistogram> boundary_histogram(const InferenceReport& rep);

}  // namespace hcim
