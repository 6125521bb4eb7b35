#include "gbm3d/stage1.hpp"

#include <algorithm>
#include <cmath>

#include "gbm3d/parallel.hpp"
#include "gbm3d/wavelet.hpp"

namespace gbm3d {

MatchedVolume assemble_volume(const Image& img, MatchTable table, int k) {
  const TileGrid& grid = table.grid;
  require(table.k == k, "assemble_volume: table was built for a different k");
  require(grid.padded_width == img.width && grid.padded_height == img.height,
          "assemble_volume: table does not match image shape");
  require(table.entries.size() == static_cast<std::size_t>(grid.count()) * k, "assemble_volume: malformed table");

  const int n = grid.tile;
  Volume vol(img.width, img.height, k);
  for (int t = 0; t < grid.count(); ++t) {
    const Position origin = grid.origin(t);
    const auto matches = table.tile(t);
    for (int z = 0; z < k; ++z) {
      const Position src = matches[z].pos;
      for (int r = 0; r < n; ++r) {
        const double* from = img.row_ptr(src.row + r) + src.col;
        std::copy(from, from + n, &vol.at(z, origin.row + r, origin.col));
      }
    }
  }
  return MatchedVolume{std::move(vol), std::move(table)};
}

Volume filter_volume(const Volume& vol, const DenoiseParams& params) {
  require(params.spins >= 1, "filter_volume: spins must be at least 1");
  Volume sum(vol.width, vol.height, vol.depth);
  for (int h = 0; h < params.spins; ++h) {
    WaveletPyramid pyr = analyze3d(cyclic_shift(vol, h), bior15_bank(), haar_bank(), params.levels);
    hard_threshold_in_place(pyr, params.sigma);
    const Volume back = cyclic_shift(synthesize3d(std::move(pyr)), -h);
    for (std::size_t i = 0; i < sum.data.size(); ++i) sum.data[i] += back.data[i];
  }
  const double inv = 1.0 / params.spins;
  for (double& v : sum.data) v *= inv;
  return sum;
}

double block_tv(const Volume& vol, Position origin, int n, int k) {
  double tv = 0.0;
  for (int z = 0; z < k; ++z) {
    for (int r = 0; r < n; ++r) {
      const double* row = &vol.data[vol.index(z, origin.row + r, origin.col)];
      for (int c = 0; c + 1 < n; ++c) tv += std::abs(row[c + 1] - row[c]);
      if (r + 1 < n) {
        const double* below = row + vol.width;
        for (int c = 0; c < n; ++c) tv += std::abs(below[c] - row[c]);
      }
      if (z + 1 < k) {
        const double* behind = row + vol.plane_size();
        for (int c = 0; c < n; ++c) tv += std::abs(behind[c] - row[c]);
      }
    }
  }
  return tv;
}

WeightField tv_weights(const Volume& filtered, const TileGrid& grid, int k, double eps) {
  require(eps > 0.0, "tv_weights: eps must be positive");
  require(filtered.width == grid.padded_width && filtered.height == grid.padded_height && filtered.depth == k,
          "tv_weights: volume not aligned with grid");
  WeightField field{grid.cols, grid.rows, std::vector<double>(grid.count())};
  for (int t = 0; t < grid.count(); ++t) field.w[t] = 1.0 / (block_tv(filtered, grid.origin(t), grid.tile, k) + eps);
  return field;
}

Image aggregate(const Volume& filtered, const MatchTable& table, const WeightField& weights) {
  const TileGrid& grid = table.grid;
  require(filtered.width == grid.padded_width && filtered.height == grid.padded_height && filtered.depth == table.k,
          "aggregate: volume does not match table");
  require(weights.w.size() == static_cast<std::size_t>(grid.count()), "aggregate: weight field does not match grid");

  const int n = grid.tile;
  Image num(grid.padded_width, grid.padded_height);
  Image den(grid.padded_width, grid.padded_height);
  for (int t = 0; t < grid.count(); ++t) {
    const Position origin = grid.origin(t);
    const auto matches = table.tile(t);
    const double w = weights.w[t];
    // pad-fill repeats of the reference are excluded
    for (int z = 0; z < table.valid[t]; ++z) {
      const Position dst = matches[z].pos;
      for (int r = 0; r < n; ++r) {
        const double* src = &filtered.data[filtered.index(z, origin.row + r, origin.col)];
        double* nrow = num.row_ptr(dst.row + r) + dst.col;
        double* drow = den.row_ptr(dst.row + r) + dst.col;
        for (int c = 0; c < n; ++c) {
          nrow[c] += w * src[c];
          drow[c] += w;
        }
      }
    }
  }
  for (std::size_t i = 0; i < num.data.size(); ++i) {
    if (!(den.data[i] > 0.0)) fail(ErrorCode::Internal, "aggregate: pixel not covered by any patch");
    num.data[i] /= den.data[i];
  }
  return num;
}

Image stage1_estimate(const Image& padded, const DenoiseParams& params) {
  MatchedVolume mv = assemble_volume(padded, build_match_table(padded, params, params.n1), params.k);
  const Volume filtered = filter_volume(mv.data, params);
  const WeightField weights = tv_weights(filtered, mv.table.grid, params.k, params.eps_tv);
  Image out = aggregate(filtered, mv.table, weights);
  out.peak = padded.peak;
  return out;
}

Image stage1_trial(const Image& padded, const DenoiseParams& params, int shift) {
  return cyclic_shift(stage1_estimate(cyclic_shift(padded, shift, shift), params), -shift, -shift);
}

Image stage1_denoise(const Image& img, const DenoiseParams& params, int workers) {
  params.validate();
  const Image padded = pad_image(img, params.n1, params.levels);
  const std::vector<int> shifts = trial_shifts(params.n1, params.trials);
  std::vector<Image> results(shifts.size());
  parallel_for(shifts.size(), workers,
               [&](std::size_t t, int) { results[t] = stage1_trial(padded, params, shifts[t]); });

  Image mean(padded.width, padded.height, 0.0, img.peak);
  for (const Image& r : results)
    for (std::size_t i = 0; i < mean.data.size(); ++i) mean.data[i] += r.data[i];
  const double inv = 1.0 / static_cast<double>(results.size());
  for (double& v : mean.data) v *= inv;
  return crop_image(mean, img.width, img.height);
}

}  // namespace gbm3d
