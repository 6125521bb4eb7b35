#include "gbm3d/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gbm3d {

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

Image::Image(int w, int h, double fill, double peak_value)
    : width(w), height(h), peak(peak_value) {
  require(w >= 0 && h >= 0, "image dimensions must be non-negative");
  data.assign(static_cast<std::size_t>(w) * h, fill);
}

Image::Image(int w, int h, std::vector<double> values, double peak_value)
    : width(w), height(h), data(std::move(values)), peak(peak_value) {
  require(w >= 0 && h >= 0, "image dimensions must be non-negative");
  require(data.size() == static_cast<std::size_t>(w) * h, "image data length must equal width*height");
  for (double v : data) require(std::isfinite(v), "image intensities must be finite");
}

void DenoiseParams::validate() const {
  require(n1 > 0 && n2 > 0, "block sizes must be positive");
  require(window > 0, "search window must be positive");
  require(k > 0 && (k & (k - 1)) == 0, "k must be a power of two");
  require(levels >= 0 && levels < 30, "levels out of range");
  require(k >= (1 << levels), "k must be at least 2^levels");
  require(window >= n1 && window >= n2, "search window must be at least the block size");
  require(spins >= 1, "spins must be at least 1");
  require(trials >= 1, "trials must be at least 1");
  require(std::isfinite(sigma) && sigma >= 0.0, "sigma must be finite and non-negative");
  require(eps_tv > 0.0, "eps_tv must be positive");
}

Image pad_image(const Image& img, int n, int levels) {
  require(n >= 1 && levels >= 0, "pad_image: n >= 1 and levels >= 0 required");
  require(img.width > 0 && img.height > 0, "pad_image: zero-sized image");
  const int unit = std::lcm(n, 1 << levels);
  const int w = (img.width + unit - 1) / unit * unit;
  const int h = (img.height + unit - 1) / unit * unit;
  if (w == img.width && h == img.height) return img;

  Image out(w, h, 0.0, img.peak);
  for (int r = 0; r < h; ++r) {
    const double* src = img.row_ptr(std::min(r, img.height - 1));
    double* dst = out.row_ptr(r);
    std::copy(src, src + img.width, dst);
    std::fill(dst + img.width, dst + w, src[img.width - 1]);
  }
  return out;
}

Image crop_image(const Image& img, int width, int height) {
  require(width >= 0 && height >= 0, "crop_image: negative size");
  require(width <= img.width && height <= img.height, "crop_image: target larger than source");
  if (width == img.width && height == img.height) return img;
  Image out(width, height, 0.0, img.peak);
  for (int r = 0; r < height; ++r) {
    const double* src = img.row_ptr(r);
    std::copy(src, src + width, out.row_ptr(r));
  }
  return out;
}

TileGrid tile_grid(int width, int height, int n) {
  require(n >= 1, "tile_grid: block side must be positive");
  require(width > 0 && height > 0, "tile_grid: zero-sized image");
  require(width % n == 0 && height % n == 0, "tile_grid: dimensions must be multiples of the block side (pad first)");
  return TileGrid{n, width / n, height / n, width, height};
}

Image cyclic_shift(const Image& img, int dr, int dc) {
  if (img.empty()) return img;
  const int h = img.height;
  const int w = img.width;
  dr = ((dr % h) + h) % h;
  dc = ((dc % w) + w) % w;
  if (dr == 0 && dc == 0) return img;
  Image out(w, h, 0.0, img.peak);
  for (int r = 0; r < h; ++r) {
    const double* src = img.row_ptr((r - dr + h) % h);
    double* dst = out.row_ptr(r);
    // dst[c] = src[(c - dc) mod w]
    std::copy(src + (w - dc), src + w, dst);
    std::copy(src, src + (w - dc), dst + dc);
  }
  return out;
}

std::vector<int> trial_shifts(int n, int trials) {
  std::vector<int> shifts;
  shifts.reserve(trials);
  for (int t = 0; t < trials; ++t) shifts.push_back(t * n / 4);
  return shifts;
}

}  // namespace gbm3d
