#pragma once

#include <cstddef>
#include <vector>

namespace gbm3d {

/// Dense 3D array indexed (z, row, col), col fastest. Each z-slice is an image-shaped plane.
struct Volume {
  int width = 0;
  int height = 0;
  int depth = 0;
  std::vector<double> data;

  Volume() = default;
  Volume(int w, int h, int d, double fill = 0.0)
      : width(w), height(h), depth(d), data(static_cast<std::size_t>(w) * h * d, fill) {}

  std::size_t plane_size() const noexcept { return static_cast<std::size_t>(width) * height; }
  std::size_t index(int z, int row, int col) const noexcept {
    return static_cast<std::size_t>(z) * plane_size() + static_cast<std::size_t>(row) * width + col;
  }
  double& at(int z, int row, int col) { return data[index(z, row, col)]; }
  double at(int z, int row, int col) const { return data[index(z, row, col)]; }
  double* plane(int z) { return data.data() + static_cast<std::size_t>(z) * plane_size(); }
  const double* plane(int z) const { return data.data() + static_cast<std::size_t>(z) * plane_size(); }

  bool same_shape(const Volume& o) const noexcept {
    return width == o.width && height == o.height && depth == o.depth;
  }
};

/// out(z, r, c) = v((z - h) mod D, (r - h) mod H, (c - h) mod W)
Volume cyclic_shift(const Volume& v, int h);

}  // namespace gbm3d
