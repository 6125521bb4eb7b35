#include "gbm3d/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gbm3d/core.hpp"

namespace gbm3d {

Volume cyclic_shift(const Volume& v, int h) {
  if (v.data.empty()) return v;
  const int sz = ((h % v.depth) + v.depth) % v.depth;
  const int sr = ((h % v.height) + v.height) % v.height;
  const int sc = ((h % v.width) + v.width) % v.width;
  if (sz == 0 && sr == 0 && sc == 0) return v;
  Volume out(v.width, v.height, v.depth);
  const int w = v.width;
  for (int z = 0; z < v.depth; ++z) {
    const int zs = (z - sz + v.depth) % v.depth;
    for (int r = 0; r < v.height; ++r) {
      const double* src = &v.data[v.index(zs, (r - sr + v.height) % v.height, 0)];
      double* dst = &out.data[out.index(z, r, 0)];
      std::copy(src + (w - sc), src + w, dst);
      std::copy(src, src + (w - sc), dst + sc);
    }
  }
  return out;
}

const FilterBank& bior15_bank() {
  static const FilterBank bank = [] {
    const double s = std::numbers::sqrt2 / 2.0;
    FilterBank b;
    b.name = "bior1.5";
    b.offset = 4;
    for (double c : {3.0, -3.0, -22.0, 22.0, 128.0, 128.0, 22.0, -22.0, -3.0, 3.0}) b.analysis_lo.push_back(s * c / 128.0);
    b.analysis_hi = {0, 0, 0, 0, -s, s, 0, 0, 0, 0};
    b.synthesis_lo = {0, 0, 0, 0, s, s, 0, 0, 0, 0};
    for (double c : {-3.0, -3.0, 22.0, 22.0, -128.0, 128.0, -22.0, -22.0, 3.0, 3.0})
      b.synthesis_hi.push_back(s * c / 128.0);
    return b;
  }();
  return bank;
}

const FilterBank& haar_bank() {
  static const FilterBank bank = [] {
    const double s = std::numbers::sqrt2 / 2.0;
    FilterBank b;
    b.name = "haar";
    b.offset = 0;
    b.analysis_lo = {s, s};
    b.analysis_hi = {-s, s};
    b.synthesis_lo = {s, s};
    b.synthesis_hi = {-s, s};
    return b;
  }();
  return bank;
}

namespace {

struct Tap {
  int k;
  double w;
};

std::vector<Tap> nonzero_taps(const std::vector<double>& f) {
  std::vector<Tap> taps;
  for (int k = 0; k < static_cast<int>(f.size()); ++k)
    if (f[k] != 0.0) taps.push_back({k, f[k]});
  return taps;
}

struct SparseBank {
  std::vector<Tap> alo, ahi, slo, shi;
  int offset;

  explicit SparseBank(const FilterBank& b)
      : alo(nonzero_taps(b.analysis_lo)),
        ahi(nonzero_taps(b.analysis_hi)),
        slo(nonzero_taps(b.synthesis_lo)),
        shi(nonzero_taps(b.synthesis_hi)),
        offset(b.offset) {}
};

inline int wrap(int i, int len) {
  i %= len;
  return i < 0 ? i + len : i;
}

// A batch of `seg` adjacent lines of length `len`; element i of line s lives at base[i * stride + s].
void analyze_batch(double* base, int len, std::size_t stride, int seg, const SparseBank& b, std::vector<double>& scratch) {
  const int half = len / 2;
  scratch.assign(static_cast<std::size_t>(len) * seg, 0.0);
  for (int n = 0; n < half; ++n) {
    double* lo = scratch.data() + static_cast<std::size_t>(n) * seg;
    double* hi = scratch.data() + static_cast<std::size_t>(half + n) * seg;
    for (const Tap& t : b.alo) {
      const double* src = base + static_cast<std::size_t>(wrap(2 * n + t.k - b.offset, len)) * stride;
      for (int s = 0; s < seg; ++s) lo[s] += t.w * src[s];
    }
    for (const Tap& t : b.ahi) {
      const double* src = base + static_cast<std::size_t>(wrap(2 * n + t.k - b.offset, len)) * stride;
      for (int s = 0; s < seg; ++s) hi[s] += t.w * src[s];
    }
  }
  for (int i = 0; i < len; ++i)
    std::copy_n(scratch.data() + static_cast<std::size_t>(i) * seg, seg, base + static_cast<std::size_t>(i) * stride);
}

void synthesize_batch(double* base, int len, std::size_t stride, int seg, const SparseBank& b, std::vector<double>& scratch) {
  const int half = len / 2;
  scratch.assign(static_cast<std::size_t>(len) * seg, 0.0);
  for (int n = 0; n < half; ++n) {
    const double* lo = base + static_cast<std::size_t>(n) * stride;
    const double* hi = base + static_cast<std::size_t>(half + n) * stride;
    for (const Tap& t : b.slo) {
      double* dst = scratch.data() + static_cast<std::size_t>(wrap(2 * n + t.k - b.offset, len)) * seg;
      for (int s = 0; s < seg; ++s) dst[s] += t.w * lo[s];
    }
    for (const Tap& t : b.shi) {
      double* dst = scratch.data() + static_cast<std::size_t>(wrap(2 * n + t.k - b.offset, len)) * seg;
      for (int s = 0; s < seg; ++s) dst[s] += t.w * hi[s];
    }
  }
  for (int i = 0; i < len; ++i)
    std::copy_n(scratch.data() + static_cast<std::size_t>(i) * seg, seg, base + static_cast<std::size_t>(i) * stride);
}

void analyze_line_inplace(double* line, int len, const SparseBank& b, std::vector<double>& scratch) {
  const int half = len / 2;
  scratch.assign(len, 0.0);
  for (int n = 0; n < half; ++n) {
    double lo = 0.0;
    double hi = 0.0;
    for (const Tap& t : b.alo) lo += t.w * line[wrap(2 * n + t.k - b.offset, len)];
    for (const Tap& t : b.ahi) hi += t.w * line[wrap(2 * n + t.k - b.offset, len)];
    scratch[n] = lo;
    scratch[half + n] = hi;
  }
  std::copy(scratch.begin(), scratch.end(), line);
}

void synthesize_line_inplace(double* line, int len, const SparseBank& b, std::vector<double>& scratch) {
  const int half = len / 2;
  scratch.assign(len, 0.0);
  for (int n = 0; n < half; ++n) {
    const double lo = line[n];
    const double hi = line[half + n];
    for (const Tap& t : b.slo) scratch[wrap(2 * n + t.k - b.offset, len)] += t.w * lo;
    for (const Tap& t : b.shi) scratch[wrap(2 * n + t.k - b.offset, len)] += t.w * hi;
  }
  std::copy(scratch.begin(), scratch.end(), line);
}

// Transforms the low corner [0, d) x [0, h) x [0, w) of vol along all three axes.
void analyze_level(Volume& vol, int w, int h, int d, const SparseBank& xy, const SparseBank& zb,
                   std::vector<double>& scratch) {
  for (int z = 0; z < d; ++z)
    for (int r = 0; r < h; ++r) analyze_line_inplace(&vol.data[vol.index(z, r, 0)], w, xy, scratch);
  for (int z = 0; z < d; ++z) analyze_batch(vol.plane(z), h, vol.width, w, xy, scratch);
  if (d > 1)
    for (int r = 0; r < h; ++r) analyze_batch(&vol.data[vol.index(0, r, 0)], d, vol.plane_size(), w, zb, scratch);
}

void synthesize_level(Volume& vol, int w, int h, int d, const SparseBank& xy, const SparseBank& zb,
                      std::vector<double>& scratch) {
  if (d > 1)
    for (int r = 0; r < h; ++r) synthesize_batch(&vol.data[vol.index(0, r, 0)], d, vol.plane_size(), w, zb, scratch);
  for (int z = 0; z < d; ++z) synthesize_batch(vol.plane(z), h, vol.width, w, xy, scratch);
  for (int z = 0; z < d; ++z)
    for (int r = 0; r < h; ++r) synthesize_line_inplace(&vol.data[vol.index(z, r, 0)], w, xy, scratch);
}

void check_shape(const Volume& vol, int levels) {
  require(levels >= 0, "wavelet: levels must be non-negative");
  require(vol.width > 0 && vol.height > 0 && vol.depth > 0, "wavelet: empty volume");
  const int unit = 1 << levels;
  require(vol.width % unit == 0 && vol.height % unit == 0 && vol.depth % unit == 0,
          "wavelet: every dimension must be divisible by 2^levels");
  require(vol.data.size() == static_cast<std::size_t>(vol.width) * vol.height * vol.depth, "wavelet: malformed volume");
}

}  // namespace

void analyze_line(const FilterBank& bank, const std::vector<double>& in, std::vector<double>& out) {
  require(!in.empty() && in.size() % 2 == 0, "analyze_line: length must be even and positive");
  out = in;
  std::vector<double> scratch;
  analyze_line_inplace(out.data(), static_cast<int>(out.size()), SparseBank(bank), scratch);
}

void synthesize_line(const FilterBank& bank, const std::vector<double>& in, std::vector<double>& out) {
  require(!in.empty() && in.size() % 2 == 0, "synthesize_line: length must be even and positive");
  out = in;
  std::vector<double> scratch;
  synthesize_line_inplace(out.data(), static_cast<int>(out.size()), SparseBank(bank), scratch);
}

void analyze_strided(double* base, int len, std::size_t stride, int seg, const FilterBank& bank, int levels) {
  require(levels >= 0 && len > 0 && len % (1 << levels) == 0, "analyze_strided: length must be divisible by 2^levels");
  const SparseBank b(bank);
  std::vector<double> scratch;
  for (int l = 0; l < levels; ++l) analyze_batch(base, len >> l, stride, seg, b, scratch);
}

void synthesize_strided(double* base, int len, std::size_t stride, int seg, const FilterBank& bank, int levels) {
  require(levels >= 0 && len > 0 && len % (1 << levels) == 0, "synthesize_strided: length must be divisible by 2^levels");
  const SparseBank b(bank);
  std::vector<double> scratch;
  for (int l = levels - 1; l >= 0; --l) synthesize_batch(base, len >> l, stride, seg, b, scratch);
}

Box WaveletPyramid::level_box(int level) const {
  const int shift = level - 1;
  return Box{0, coeffs.depth >> shift, 0, coeffs.height >> shift, 0, coeffs.width >> shift};
}

int WaveletPyramid::level_of(int z, int row, int col) const {
  if (approximation_box().contains(z, row, col)) return 0;
  for (int l = levels; l >= 1; --l)
    if (level_box(l).contains(z, row, col)) return l;
  return 0;
}

WaveletPyramid analyze3d(Volume&& vol, const FilterBank& bank_xy, const FilterBank& bank_z, int levels) {
  check_shape(vol, levels);
  const SparseBank xy(bank_xy);
  const SparseBank zb(bank_z);
  std::vector<double> scratch;
  int w = vol.width, h = vol.height, d = vol.depth;
  for (int l = 0; l < levels; ++l) {
    analyze_level(vol, w, h, d, xy, zb, scratch);
    w /= 2;
    h /= 2;
    d /= 2;
  }
  return WaveletPyramid{levels, &bank_xy, &bank_z, std::move(vol)};
}

WaveletPyramid analyze3d(const Volume& vol, const FilterBank& bank_xy, const FilterBank& bank_z, int levels) {
  return analyze3d(Volume(vol), bank_xy, bank_z, levels);
}

Volume synthesize3d(WaveletPyramid&& pyr) {
  require(pyr.bank_xy != nullptr && pyr.bank_z != nullptr, "synthesize3d: pyramid has no filter banks");
  check_shape(pyr.coeffs, pyr.levels);
  const SparseBank xy(*pyr.bank_xy);
  const SparseBank zb(*pyr.bank_z);
  std::vector<double> scratch;
  Volume vol = std::move(pyr.coeffs);
  for (int l = pyr.levels; l >= 1; --l) {
    const int shift = l - 1;
    synthesize_level(vol, vol.width >> shift, vol.height >> shift, vol.depth >> shift, xy, zb, scratch);
  }
  return vol;
}

Volume synthesize3d(const WaveletPyramid& pyr) { return synthesize3d(WaveletPyramid(pyr)); }

double level_threshold(double sigma, int level) { return sigma * (3.6 - 0.3 * level); }

void hard_threshold_in_place(WaveletPyramid& pyr, double sigma) {
  require(sigma >= 0.0, "hard_threshold: sigma must be non-negative");
  Volume& v = pyr.coeffs;
  for (int l = 1; l <= pyr.levels; ++l) {
    const double tau = level_threshold(sigma, l);
    if (tau <= 0.0) continue;
    const Box outer = pyr.level_box(l);
    const Box inner = pyr.level_box(l + 1);
    auto cut = [tau](double* p, double* end) {
      for (; p != end; ++p)
        if (std::abs(*p) < tau) *p = 0.0;
    };
    for (int z = outer.z0; z < outer.z1; ++z) {
      for (int r = outer.r0; r < outer.r1; ++r) {
        double* row = &v.data[v.index(z, r, 0)];
        if (z < inner.z1 && r < inner.r1) {
          cut(row + inner.c1, row + outer.c1);
        } else {
          cut(row + outer.c0, row + outer.c1);
        }
      }
    }
  }
}

WaveletPyramid hard_threshold(WaveletPyramid pyr, double sigma) {
  hard_threshold_in_place(pyr, sigma);
  return pyr;
}

}  // namespace gbm3d
