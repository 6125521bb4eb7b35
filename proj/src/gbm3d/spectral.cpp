#include "gbm3d/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include "gbm3d/core.hpp"

namespace gbm3d {

RealPlane::RealPlane(int w, int h, std::vector<double> values) : width(w), height(h), data(std::move(values)) {
  require(w >= 0 && h >= 0, "plane dimensions must be non-negative");
  require(data.size() == static_cast<std::size_t>(w) * h, "plane data length must equal width*height");
}

void detail::FftwFree::operator()(void* p) const noexcept { fftw_free(p); }

struct Correlator::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

namespace {

// The FFTW planner is not thread-safe; executing an existing plan on new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <class T>
std::unique_ptr<T, detail::FftwFree> fftw_alloc(std::size_t count) {
  void* p = fftw_malloc(sizeof(T) * std::max<std::size_t>(count, 1));
  if (p == nullptr) fail(ErrorCode::Internal, "fftw_malloc failed");
  return std::unique_ptr<T, detail::FftwFree>(static_cast<T*>(p));
}

}  // namespace

Correlator::Correlator(int height, int width)
    : height_(height), width_(width), spectrum_len_(static_cast<std::size_t>(height) * (width / 2 + 1)) {
  require(height > 0 && width > 0, "correlator size must be positive");
  const std::size_t n = static_cast<std::size_t>(height) * width;
  real_ = fftw_alloc<double>(n);
  spec_g_ = fftw_alloc<std::complex<double>>(spectrum_len_);
  spec_f_ = fftw_alloc<std::complex<double>>(spectrum_len_);

  static std::map<std::pair<int, int>, Plans> cache;
  std::lock_guard lock(planner_mutex());
  auto [it, inserted] = cache.try_emplace({height, width});
  if (inserted) {
    auto* spec = reinterpret_cast<fftw_complex*>(spec_g_.get());
    it->second.forward = fftw_plan_dft_r2c_2d(height, width, real_.get(), spec, FFTW_ESTIMATE);
    it->second.backward = fftw_plan_dft_c2r_2d(height, width, spec, real_.get(), FFTW_ESTIMATE);
    if (it->second.forward == nullptr || it->second.backward == nullptr) {
      cache.erase(it);
      fail(ErrorCode::Internal, "FFTW planning failed");
    }
  }
  plans_ = &it->second;
}

void Correlator::transform_kernel(std::span<const double> g) {
  require(g.size() == static_cast<std::size_t>(height_) * width_, "correlate: kernel size mismatch");
  std::copy(g.begin(), g.end(), real_.get());
  fftw_execute_dft_r2c(plans_->forward, real_.get(), reinterpret_cast<fftw_complex*>(spec_g_.get()));
}

void Correlator::transform_signal(std::span<const double> f) {
  require(f.size() == static_cast<std::size_t>(height_) * width_, "correlate: signal size mismatch");
  std::copy(f.begin(), f.end(), real_.get());
  fftw_execute_dft_r2c(plans_->forward, real_.get(), reinterpret_cast<fftw_complex*>(spec_f_.get()));
}

void Correlator::correlate_stored(std::span<double> out) {
  require(out.size() == static_cast<std::size_t>(height_) * width_, "correlate: output size mismatch");
  std::complex<double>* g = spec_g_.get();
  const std::complex<double>* f = spec_f_.get();
  const double scale = 1.0 / (static_cast<double>(height_) * width_);
  // F(g * f) = conj(F(g)) . F(f); result goes into the kernel slot, which c2r then destroys.
  for (std::size_t i = 0; i < spectrum_len_; ++i) g[i] = std::conj(g[i]) * f[i] * scale;
  fftw_execute_dft_c2r(plans_->backward, reinterpret_cast<fftw_complex*>(g), real_.get());
  std::copy(real_.get(), real_.get() + out.size(), out.begin());
}

void Correlator::correlate(std::span<const double> g, std::span<const double> f, std::span<double> out) {
  transform_kernel(g);
  transform_signal(f);
  correlate_stored(out);
}

RealPlane cross_correlate(const RealPlane& g, const RealPlane& f) {
  require(g.width == f.width && g.height == f.height, "cross_correlate: dimension mismatch");
  require(g.width > 0 && g.height > 0, "cross_correlate: empty input");
  Correlator corr(g.height, g.width);
  RealPlane out(g.width, g.height);
  corr.correlate(g.data, f.data, out.data);
  return out;
}

DctBasis::DctBasis(int n) : n_(n), basis_(static_cast<std::size_t>(n) * n) {
  require(n > 0, "DCT size must be positive");
  const double a0 = std::sqrt(1.0 / n);
  const double ak = std::sqrt(2.0 / n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      basis_[static_cast<std::size_t>(k) * n + i] =
          (k == 0 ? a0 : ak) * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
    }
  }
}

// Y = C X C^T
void DctBasis::forward(const double* in, double* out) const {
  const int n = n_;
  const double* c = basis_.data();
  double tmp[64 * 64];
  std::vector<double> heap;
  double* t = tmp;
  if (n > 64) {
    heap.resize(static_cast<std::size_t>(n) * n);
    t = heap.data();
  }
  // t = X C^T  (transform along columns index within each row)
  for (int r = 0; r < n; ++r) {
    const double* x = in + static_cast<std::size_t>(r) * n;
    for (int k = 0; k < n; ++k) {
      const double* ck = c + static_cast<std::size_t>(k) * n;
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += ck[i] * x[i];
      t[r * n + k] = s;
    }
  }
  // out = C t
  for (int k = 0; k < n; ++k) {
    const double* ck = c + static_cast<std::size_t>(k) * n;
    for (int col = 0; col < n; ++col) {
      double s = 0.0;
      for (int r = 0; r < n; ++r) s += ck[r] * t[r * n + col];
      out[static_cast<std::size_t>(k) * n + col] = s;
    }
  }
}

// X = C^T Y C
void DctBasis::inverse(const double* in, double* out) const {
  const int n = n_;
  const double* c = basis_.data();
  double tmp[64 * 64];
  std::vector<double> heap;
  double* t = tmp;
  if (n > 64) {
    heap.resize(static_cast<std::size_t>(n) * n);
    t = heap.data();
  }
  // t = Y C
  for (int r = 0; r < n; ++r) {
    const double* y = in + static_cast<std::size_t>(r) * n;
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += y[k] * c[static_cast<std::size_t>(k) * n + i];
      t[r * n + i] = s;
    }
  }
  // out = C^T t
  for (int i = 0; i < n; ++i) {
    for (int col = 0; col < n; ++col) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += c[static_cast<std::size_t>(k) * n + i] * t[k * n + col];
      out[static_cast<std::size_t>(i) * n + col] = s;
    }
  }
}

const DctBasis& dct_basis(int n) {
  static std::mutex m;
  static std::map<int, std::unique_ptr<DctBasis>> cache;
  std::lock_guard lock(m);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<DctBasis>(n);
  return *slot;
}

RealPlane dct2_forward(const RealPlane& block) {
  require(block.width == block.height && block.width > 0, "dct2_forward: block must be square");
  RealPlane out(block.width, block.height);
  dct_basis(block.width).forward(block.data.data(), out.data.data());
  return out;
}

RealPlane dct2_inverse(const RealPlane& coeffs) {
  require(coeffs.width == coeffs.height && coeffs.width > 0, "dct2_inverse: block must be square");
  RealPlane out(coeffs.width, coeffs.height);
  dct_basis(coeffs.width).inverse(coeffs.data.data(), out.data.data());
  return out;
}

}  // namespace gbm3d
