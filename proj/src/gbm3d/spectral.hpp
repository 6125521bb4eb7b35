#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace gbm3d {

/// Real-valued 2D array, row-major.
struct RealPlane {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  RealPlane() = default;
  RealPlane(int w, int h, double fill = 0.0) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}
  RealPlane(int w, int h, std::vector<double> values);

  double& at(int row, int col) { return data[static_cast<std::size_t>(row) * width + col]; }
  double at(int row, int col) const { return data[static_cast<std::size_t>(row) * width + col]; }
};

namespace detail {

struct FftwFree {
  void operator()(void* p) const noexcept;
};

}  // namespace detail

/// Cyclic 2D cross-correlation of fixed size through FFTW.
///
/// out[i, j] = sum_{k,l} g[k, l] * f[(i + k) mod H, (j + l) mod W]
///
/// Plans are created once per size behind a lock and shared; each Correlator
/// owns its scratch buffers, so one instance per worker is safe.
class Correlator {
 public:
  Correlator(int height, int width);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }

  /// Forward transform of a real height*width array into an internal spectrum slot.
  void transform_kernel(std::span<const double> g);
  void transform_signal(std::span<const double> f);
  /// Combines the two stored spectra and writes the real correlation.
  void correlate_stored(std::span<double> out);

  void correlate(std::span<const double> g, std::span<const double> f, std::span<double> out);

 private:
  struct Plans;

  int height_;
  int width_;
  std::size_t spectrum_len_;
  const Plans* plans_;
  std::unique_ptr<double, detail::FftwFree> real_;
  std::unique_ptr<std::complex<double>, detail::FftwFree> spec_g_;
  std::unique_ptr<std::complex<double>, detail::FftwFree> spec_f_;
};

RealPlane cross_correlate(const RealPlane& g, const RealPlane& f);

/// Orthonormal DCT-II basis of side n: basis[k * n + i] = a_k cos(pi (2i + 1) k / 2n).
class DctBasis {
 public:
  explicit DctBasis(int n);

  int size() const noexcept { return n_; }

  /// Separable forward transform of one n*n block (row-major), in -> out. in and out may alias.
  void forward(const double* in, double* out) const;
  void inverse(const double* in, double* out) const;

 private:
  int n_;
  std::vector<double> basis_;
};

/// Returns a shared basis for side n; safe to call concurrently.
const DctBasis& dct_basis(int n);

RealPlane dct2_forward(const RealPlane& block);
RealPlane dct2_inverse(const RealPlane& coeffs);

}  // namespace gbm3d
