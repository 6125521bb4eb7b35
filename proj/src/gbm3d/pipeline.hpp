#pragma once

#include <vector>

#include "gbm3d/core.hpp"

namespace gbm3d {

struct Patch {
  Position origin;
  int width = 0;
  int height = 0;
};

/// Overlapping decomposition of an image into patches of side 256 + n
/// (raster order). Consecutive origins are n + (patch - n) apart except the
/// last one per axis, which is pulled inward to end at the image border.
struct PatchPlan {
  int patch_size = 0;
  int overlap = 0;
  int width = 0;
  int height = 0;
  std::vector<int> row_origins;
  std::vector<int> col_origins;
  std::vector<Patch> patches;
};

PatchPlan plan_patches(int width, int height, int n);

/// Per-pixel blending weight of one patch: separable linear ramps across the
/// bands it shares with its neighbours; weights of all patches sum to 1.
std::vector<double> patch_blend_weights(const PatchPlan& plan, std::size_t patch_index);

struct PipelineOptions {
  int workers = 1;
  bool patched = true;
};

struct DenoiseStages {
  Image basic;  // stage-1 estimate
  Image final;  // stage-2 estimate, or a copy of basic when stage == 1
};

/// Runs stage 1 (and stage 2 when stage == 2) with patch decomposition,
/// stitching after each stage. Output is independent of options.workers.
DenoiseStages denoise_stages(const Image& img, double sigma, int stage, const DenoiseParams& params,
                             const PipelineOptions& options = {});

Image denoise(const Image& img, double sigma, int stage, const DenoiseParams& params,
              const PipelineOptions& options = {});

}  // namespace gbm3d
