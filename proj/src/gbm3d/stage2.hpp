#pragma once

#include <vector>

#include "gbm3d/blockmatch.hpp"
#include "gbm3d/core.hpp"

namespace gbm3d {

/// Matched groups of the whole tiling as one 5D tensor n x n x K x B x B.
/// Element (row i, col j, slot z, tile t) lives at ((t * K + z) * n + i) * n + j.
struct GroupStack {
  int n = 0;
  int k = 0;
  MatchTable table;  // built on the basic estimate
  std::vector<double> noisy;
  std::vector<double> basic;

  int groups() const noexcept { return table.grid.count(); }
  std::size_t group_size() const noexcept { return static_cast<std::size_t>(n) * n * k; }
  std::size_t offset(int tile, int slot) const noexcept {
    return (static_cast<std::size_t>(tile) * k + slot) * static_cast<std::size_t>(n) * n;
  }
};

struct WienerResult {
  std::vector<double> filtered;  // same layout as GroupStack::noisy
  std::vector<double> weights;   // per group, 1 / (sigma^2 ||W||^2)
};

GroupStack build_group_stack(const Image& noisy, const Image& basic, const DenoiseParams& params);

/// Depth of the Haar transform along the group axis: log2(k).
int group_haar_levels(int k);

/// Empirical Wiener shrinkage of every group in one pass over the tensor:
/// T = 2D DCT per block then Haar along the slots; W = Tb^2 / (Tb^2 + sigma^2);
/// output = T^-1(W . T(noisy)). With sigma = 0 the shrinkage is the identity.
WienerResult wiener_filter_groups(const GroupStack& stack, double sigma);

/// Weighted scatter of the filtered groups back into an image (pad-fill slots skipped).
Image aggregate_groups(const GroupStack& stack, const WienerResult& result);

/// One stage-2 pass on padded, equally sized images.
Image stage2_estimate(const Image& noisy, const Image& basic, const DenoiseParams& params);

Image stage2_trial(const Image& noisy, const Image& basic, const DenoiseParams& params, int shift);

/// Translation-averaged Wiener estimate cropped to the input size.
Image stage2_denoise(const Image& noisy, const Image& basic, const DenoiseParams& params, int workers = 1);

}  // namespace gbm3d
