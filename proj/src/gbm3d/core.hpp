#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gbm3d {

enum class ErrorCode {
  InvalidInput,
  Io,
  Format,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::InvalidInput, what);
}

/// Top-left pixel coordinate of a block.
struct Position {
  int row = 0;
  int col = 0;

  friend bool operator==(const Position&, const Position&) = default;
  friend auto operator<=>(const Position&, const Position&) = default;
};

/// Grayscale image of real intensities, row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> data;
  double peak = 255.0;

  Image() = default;
  Image(int w, int h, double fill = 0.0, double peak_value = 255.0);
  Image(int w, int h, std::vector<double> values, double peak_value = 255.0);

  std::size_t size() const noexcept { return data.size(); }
  bool empty() const noexcept { return data.empty(); }

  double& at(int row, int col) { return data[static_cast<std::size_t>(row) * width + col]; }
  double at(int row, int col) const { return data[static_cast<std::size_t>(row) * width + col]; }

  const double* row_ptr(int row) const { return data.data() + static_cast<std::size_t>(row) * width; }
  double* row_ptr(int row) { return data.data() + static_cast<std::size_t>(row) * width; }
};

/// Every tunable of the two-stage denoiser. Defaults are the published settings.
struct DenoiseParams {
  int n1 = 16;         // stage-1 block side
  int n2 = 8;          // stage-2 block side
  int k = 16;          // matched blocks per reference, reference included
  int window = 32;     // side of the local search window, in candidate positions
  int levels = 3;      // wavelet decomposition depth
  int spins = 2;       // cycle-spin shifts of the volume (h = 0 .. spins-1)
  int trials = 3;      // translation trials of the image (h = 0, N/4, N/2, ...)
  double sigma = 0.0;  // noise standard deviation, intensity units
  std::optional<double> tau_match;  // carried, unused while K is fixed
  double eps_tv = 1e-3;

  void validate() const;
};

/// Non-overlapping tiling of a padded image by square reference blocks.
struct TileGrid {
  int tile = 0;
  int cols = 0;
  int rows = 0;
  int padded_width = 0;
  int padded_height = 0;

  int count() const noexcept { return cols * rows; }
  /// Raster order: index = p * cols + q where p is the tile row.
  Position origin(int index) const noexcept { return {(index / cols) * tile, (index % cols) * tile}; }
};

/// Replicates edges until both sides are multiples of lcm(n, 2^levels).
Image pad_image(const Image& img, int n, int levels);

Image crop_image(const Image& img, int width, int height);

TileGrid tile_grid(int width, int height, int n);

/// Cyclic shift: out(r, c) = img((r - dr) mod H, (c - dc) mod W).
Image cyclic_shift(const Image& img, int dr, int dc);

/// Translation offsets 0, N/4, N/2, 3N/4, ... used for the reference re-tiling trials.
std::vector<int> trial_shifts(int n, int trials);

}  // namespace gbm3d
