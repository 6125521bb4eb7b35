#include "gbm3d/pipeline.hpp"

#include <numeric>

#include "gbm3d/parallel.hpp"
#include "gbm3d/stage1.hpp"
#include "gbm3d/stage2.hpp"

namespace gbm3d {

namespace {

constexpr int kPatchCore = 256;

std::vector<int> axis_origins(int extent, int patch, int step) {
  std::vector<int> origins{0};
  if (extent <= patch) return origins;
  while (origins.back() + patch < extent) origins.push_back(std::min(origins.back() + step, extent - patch));
  return origins;
}

// Linear ramps over the bands shared with the previous and next patch along one axis.
std::vector<double> axis_weights(const std::vector<int>& origins, std::size_t i, int len) {
  std::vector<double> w(len, 1.0);
  const int start = origins[i];
  const int end = start + len;
  if (i > 0) {
    const int prev_end = std::min(end, origins[i - 1] + len);
    const double band = prev_end - start;
    for (int x = start; x < prev_end; ++x) w[x - start] *= (x - start + 0.5) / band;
  }
  if (i + 1 < origins.size()) {
    const int next_start = origins[i + 1];
    const double band = end - next_start;
    for (int x = next_start; x < end; ++x) w[x - start] *= (end - x - 0.5) / band;
  }
  return w;
}

Image extract(const Image& img, const Patch& p) {
  Image out(p.width, p.height, 0.0, img.peak);
  for (int r = 0; r < p.height; ++r) {
    const double* src = img.row_ptr(p.origin.row + r) + p.origin.col;
    std::copy(src, src + p.width, out.row_ptr(r));
  }
  return out;
}

// Averages the trial results of each patch in trial order, then blends patches.
Image stitch(const PatchPlan& plan, const std::vector<Image>& trial_results, std::size_t trials, double peak) {
  Image num(plan.width, plan.height, 0.0, peak);
  Image den(plan.width, plan.height, 0.0, peak);
  for (std::size_t p = 0; p < plan.patches.size(); ++p) {
    const Patch& patch = plan.patches[p];
    const std::vector<double> weights = patch_blend_weights(plan, p);
    std::vector<double> mean(static_cast<std::size_t>(patch.width) * patch.height, 0.0);
    for (std::size_t t = 0; t < trials; ++t) {
      const Image& r = trial_results[p * trials + t];
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += r.data[i];
    }
    const double inv = 1.0 / static_cast<double>(trials);
    for (int r = 0; r < patch.height; ++r) {
      double* nrow = num.row_ptr(patch.origin.row + r) + patch.origin.col;
      double* drow = den.row_ptr(patch.origin.row + r) + patch.origin.col;
      for (int c = 0; c < patch.width; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * patch.width + c;
        nrow[c] += weights[i] * mean[i] * inv;
        drow[c] += weights[i];
      }
    }
  }
  for (std::size_t i = 0; i < num.data.size(); ++i) num.data[i] /= den.data[i];
  return num;
}

}  // namespace

PatchPlan plan_patches(int width, int height, int n) {
  require(width > 0 && height > 0, "plan_patches: empty image");
  require(n >= 1, "plan_patches: block side must be positive");
  PatchPlan plan;
  plan.patch_size = kPatchCore + n;
  plan.overlap = n;
  plan.width = width;
  plan.height = height;
  const int step = plan.patch_size - plan.overlap;
  plan.row_origins = axis_origins(height, plan.patch_size, step);
  plan.col_origins = axis_origins(width, plan.patch_size, step);
  const int ph = std::min(height, plan.patch_size);
  const int pw = std::min(width, plan.patch_size);
  for (int r : plan.row_origins)
    for (int c : plan.col_origins) plan.patches.push_back({{r, c}, pw, ph});
  return plan;
}

std::vector<double> patch_blend_weights(const PatchPlan& plan, std::size_t patch_index) {
  require(patch_index < plan.patches.size(), "patch_blend_weights: index out of range");
  const std::size_t cols = plan.col_origins.size();
  const Patch& p = plan.patches[patch_index];
  const std::vector<double> wr = axis_weights(plan.row_origins, patch_index / cols, p.height);
  const std::vector<double> wc = axis_weights(plan.col_origins, patch_index % cols, p.width);
  std::vector<double> w(static_cast<std::size_t>(p.width) * p.height);
  for (int r = 0; r < p.height; ++r)
    for (int c = 0; c < p.width; ++c) w[static_cast<std::size_t>(r) * p.width + c] = wr[r] * wc[c];
  return w;
}

DenoiseStages denoise_stages(const Image& img, double sigma, int stage, const DenoiseParams& base_params,
                             const PipelineOptions& options) {
  require(stage == 1 || stage == 2, "denoise: stage must be 1 or 2");
  require(!img.empty(), "denoise: empty image");
  DenoiseParams params = base_params;
  params.sigma = sigma;
  params.validate();

  // One padding for both stages keeps every patch origin aligned to both tilings and the dyadic grid.
  const Image padded = pad_image(img, std::lcm(params.n1, params.n2), params.levels);
  const PatchPlan plan = options.patched ? plan_patches(padded.width, padded.height, params.n1)
                                         : PatchPlan{padded.width, 0, padded.width, padded.height, {0}, {0},
                                                     {Patch{{0, 0}, padded.width, padded.height}}};

  const std::size_t patches = plan.patches.size();
  std::vector<Image> noisy_patches(patches);
  for (std::size_t p = 0; p < patches; ++p) noisy_patches[p] = extract(padded, plan.patches[p]);

  const std::vector<int> shifts1 = trial_shifts(params.n1, params.trials);
  std::vector<Image> results(patches * shifts1.size());
  parallel_for(results.size(), options.workers, [&](std::size_t job, int) {
    results[job] = stage1_trial(noisy_patches[job / shifts1.size()], params, shifts1[job % shifts1.size()]);
  });
  Image basic = stitch(plan, results, shifts1.size(), img.peak);

  DenoiseStages out;
  if (stage == 2) {
    std::vector<Image> basic_patches(patches);
    for (std::size_t p = 0; p < patches; ++p) basic_patches[p] = extract(basic, plan.patches[p]);
    const std::vector<int> shifts2 = trial_shifts(params.n2, params.trials);
    results.assign(patches * shifts2.size(), Image{});
    parallel_for(results.size(), options.workers, [&](std::size_t job, int) {
      const std::size_t p = job / shifts2.size();
      results[job] = stage2_trial(noisy_patches[p], basic_patches[p], params, shifts2[job % shifts2.size()]);
    });
    out.final = crop_image(stitch(plan, results, shifts2.size(), img.peak), img.width, img.height);
  }
  out.basic = crop_image(basic, img.width, img.height);
  if (stage == 1) out.final = out.basic;
  return out;
}

Image denoise(const Image& img, double sigma, int stage, const DenoiseParams& params, const PipelineOptions& options) {
  return denoise_stages(img, sigma, stage, params, options).final;
}

}  // namespace gbm3d
