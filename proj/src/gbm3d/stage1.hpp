#pragma once

#include <vector>

#include "gbm3d/blockmatch.hpp"
#include "gbm3d/core.hpp"
#include "gbm3d/volume.hpp"

namespace gbm3d {

/// Image-sized stack of matched blocks: slice z holds, behind every reference
/// tile, that tile's z-th match. Slice 0 is the image itself.
struct MatchedVolume {
  Volume data;
  MatchTable table;
};

/// Per-tile aggregation weights, raster order.
struct WeightField {
  int cols = 0;
  int rows = 0;
  std::vector<double> w;
};

MatchedVolume assemble_volume(const Image& img, MatchTable table, int k);

/// Cycle-spun hard thresholding: mean over h < params.spins of
/// S_-h(synthesize(threshold(analyze(S_h(vol))))).
Volume filter_volume(const Volume& vol, const DenoiseParams& params);

/// Anisotropic total variation (sum of absolute forward differences along
/// col, row and z) of the n x n x k block behind one tile.
double block_tv(const Volume& vol, Position origin, int n, int k);

WeightField tv_weights(const Volume& filtered, const TileGrid& grid, int k, double eps);

/// Scatters every genuine filtered patch back to its matched position with its
/// tile weight and normalizes by the accumulated weight.
Image aggregate(const Volume& filtered, const MatchTable& table, const WeightField& weights);

/// One pass of match, assemble, filter, weight and aggregate on a padded image.
Image stage1_estimate(const Image& padded, const DenoiseParams& params);

/// S_-h(stage1_estimate(S_h(padded))), shifting both axes by `shift`.
Image stage1_trial(const Image& padded, const DenoiseParams& params, int shift);

/// Translation-averaged first estimate, cropped back to the input size.
Image stage1_denoise(const Image& img, const DenoiseParams& params, int workers = 1);

}  // namespace gbm3d
