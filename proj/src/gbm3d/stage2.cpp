#include "gbm3d/stage2.hpp"

#include <algorithm>
#include <bit>

#include "gbm3d/parallel.hpp"
#include "gbm3d/spectral.hpp"
#include "gbm3d/wavelet.hpp"

namespace gbm3d {

GroupStack build_group_stack(const Image& noisy, const Image& basic, const DenoiseParams& params) {
  require(noisy.width == basic.width && noisy.height == basic.height, "build_group_stack: image shapes differ");
  const int n = params.n2;
  GroupStack stack;
  stack.n = n;
  stack.k = params.k;
  stack.table = build_match_table(basic, params, n);
  const std::size_t total = static_cast<std::size_t>(stack.groups()) * stack.group_size();
  stack.noisy.resize(total);
  stack.basic.resize(total);
  for (int t = 0; t < stack.groups(); ++t) {
    const auto matches = stack.table.tile(t);
    for (int z = 0; z < stack.k; ++z) {
      const Position p = matches[z].pos;
      double* dn = stack.noisy.data() + stack.offset(t, z);
      double* db = stack.basic.data() + stack.offset(t, z);
      for (int r = 0; r < n; ++r) {
        std::copy_n(noisy.row_ptr(p.row + r) + p.col, n, dn + static_cast<std::size_t>(r) * n);
        std::copy_n(basic.row_ptr(p.row + r) + p.col, n, db + static_cast<std::size_t>(r) * n);
      }
    }
  }
  return stack;
}

int group_haar_levels(int k) {
  require(k >= 1 && std::has_single_bit(static_cast<unsigned>(k)), "group size must be a power of two");
  return std::countr_zero(static_cast<unsigned>(k));
}

namespace {

void forward_3d(std::vector<double>& tensor, int n, int k, int groups) {
  const DctBasis& dct = dct_basis(n);
  const std::size_t block = static_cast<std::size_t>(n) * n;
  const std::size_t blocks = static_cast<std::size_t>(groups) * k;
  for (std::size_t b = 0; b < blocks; ++b) dct.forward(tensor.data() + b * block, tensor.data() + b * block);
  const int levels = group_haar_levels(k);
  for (int g = 0; g < groups; ++g)
    analyze_strided(tensor.data() + static_cast<std::size_t>(g) * k * block, k, block, static_cast<int>(block),
                    haar_bank(), levels);
}

void inverse_3d(std::vector<double>& tensor, int n, int k, int groups) {
  const DctBasis& dct = dct_basis(n);
  const std::size_t block = static_cast<std::size_t>(n) * n;
  const int levels = group_haar_levels(k);
  for (int g = 0; g < groups; ++g)
    synthesize_strided(tensor.data() + static_cast<std::size_t>(g) * k * block, k, block, static_cast<int>(block),
                       haar_bank(), levels);
  const std::size_t blocks = static_cast<std::size_t>(groups) * k;
  for (std::size_t b = 0; b < blocks; ++b) dct.inverse(tensor.data() + b * block, tensor.data() + b * block);
}

}  // namespace

WienerResult wiener_filter_groups(const GroupStack& stack, double sigma) {
  require(sigma >= 0.0, "wiener_filter_groups: sigma must be non-negative");
  const int groups = stack.groups();
  const std::size_t gsize = stack.group_size();
  require(stack.noisy.size() == gsize * groups && stack.basic.size() == gsize * groups,
          "wiener_filter_groups: malformed stack");

  WienerResult out;
  out.filtered = stack.noisy;
  out.weights.assign(groups, 1.0);
  forward_3d(out.filtered, stack.n, stack.k, groups);

  if (sigma > 0.0) {
    std::vector<double> spectrum = stack.basic;
    forward_3d(spectrum, stack.n, stack.k, groups);
    const double s2 = sigma * sigma;
    for (int g = 0; g < groups; ++g) {
      double energy = 0.0;
      const std::size_t base = static_cast<std::size_t>(g) * gsize;
      for (std::size_t i = base; i < base + gsize; ++i) {
        const double b2 = spectrum[i] * spectrum[i];
        const double w = b2 / (b2 + s2);
        out.filtered[i] *= w;
        energy += w * w;
      }
      out.weights[g] = 1.0 / (s2 * std::max(energy, 1.0));
    }
  }

  inverse_3d(out.filtered, stack.n, stack.k, groups);
  return out;
}

Image aggregate_groups(const GroupStack& stack, const WienerResult& result) {
  const TileGrid& grid = stack.table.grid;
  require(result.filtered.size() == stack.noisy.size() && result.weights.size() == static_cast<std::size_t>(stack.groups()),
          "aggregate_groups: result does not match stack");
  const int n = stack.n;
  Image num(grid.padded_width, grid.padded_height);
  Image den(grid.padded_width, grid.padded_height);
  for (int t = 0; t < stack.groups(); ++t) {
    const auto matches = stack.table.tile(t);
    const double w = result.weights[t];
    for (int z = 0; z < stack.table.valid[t]; ++z) {
      const Position dst = matches[z].pos;
      const double* src = result.filtered.data() + stack.offset(t, z);
      for (int r = 0; r < n; ++r) {
        double* nrow = num.row_ptr(dst.row + r) + dst.col;
        double* drow = den.row_ptr(dst.row + r) + dst.col;
        for (int c = 0; c < n; ++c) {
          nrow[c] += w * src[static_cast<std::size_t>(r) * n + c];
          drow[c] += w;
        }
      }
    }
  }
  for (std::size_t i = 0; i < num.data.size(); ++i) {
    if (!(den.data[i] > 0.0)) fail(ErrorCode::Internal, "aggregate_groups: pixel not covered by any patch");
    num.data[i] /= den.data[i];
  }
  return num;
}

Image stage2_estimate(const Image& noisy, const Image& basic, const DenoiseParams& params) {
  const GroupStack stack = build_group_stack(noisy, basic, params);
  Image out = aggregate_groups(stack, wiener_filter_groups(stack, params.sigma));
  out.peak = noisy.peak;
  return out;
}

Image stage2_trial(const Image& noisy, const Image& basic, const DenoiseParams& params, int shift) {
  return cyclic_shift(stage2_estimate(cyclic_shift(noisy, shift, shift), cyclic_shift(basic, shift, shift), params),
                      -shift, -shift);
}

Image stage2_denoise(const Image& noisy, const Image& basic, const DenoiseParams& params, int workers) {
  params.validate();
  require(noisy.width == basic.width && noisy.height == basic.height, "stage2_denoise: image shapes differ");
  const Image pn = pad_image(noisy, params.n2, 0);
  const Image pb = pad_image(basic, params.n2, 0);
  const std::vector<int> shifts = trial_shifts(params.n2, params.trials);
  std::vector<Image> results(shifts.size());
  parallel_for(shifts.size(), workers,
               [&](std::size_t t, int) { results[t] = stage2_trial(pn, pb, params, shifts[t]); });

  Image mean(pn.width, pn.height, 0.0, noisy.peak);
  for (const Image& r : results)
    for (std::size_t i = 0; i < mean.data.size(); ++i) mean.data[i] += r.data[i];
  const double inv = 1.0 / static_cast<double>(results.size());
  for (double& v : mean.data) v *= inv;
  return crop_image(mean, noisy.width, noisy.height);
}

}  // namespace gbm3d
