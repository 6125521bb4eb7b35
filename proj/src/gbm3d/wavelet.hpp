#pragma once

#include <string>
#include <vector>

#include "gbm3d/volume.hpp"

namespace gbm3d {

/// Two-channel periodic filter bank. Coefficient k of every filter touches
/// sample (2n + k - offset) mod L of a line of length L.
struct FilterBank {
  std::string name;
  std::vector<double> analysis_lo;
  std::vector<double> analysis_hi;
  std::vector<double> synthesis_lo;
  std::vector<double> synthesis_hi;
  int offset = 0;
};

/// CDF biorthogonal 1.5: Haar-like synthesis low-pass, 10-tap analysis low-pass.
const FilterBank& bior15_bank();
const FilterBank& haar_bank();

/// One level on a single line: out = [approximation | detail]. Length must be even.
void analyze_line(const FilterBank& bank, const std::vector<double>& in, std::vector<double>& out);
void synthesize_line(const FilterBank& bank, const std::vector<double>& in, std::vector<double>& out);

/// Multi-level transform of `seg` adjacent lines of length `len`; sample i of
/// line s lives at base[i * stride + s]. Coefficients stay in Mallat order.
void analyze_strided(double* base, int len, std::size_t stride, int seg, const FilterBank& bank, int levels);
void synthesize_strided(double* base, int len, std::size_t stride, int seg, const FilterBank& bank, int levels);

/// Axis-aligned region [z0, z1) x [r0, r1) x [c0, c1).
struct Box {
  int z0 = 0, z1 = 0;
  int r0 = 0, r1 = 0;
  int c0 = 0, c1 = 0;

  bool contains(int z, int r, int c) const noexcept {
    return z >= z0 && z < z1 && r >= r0 && r < r1 && c >= c0 && c < c1;
  }
};

/// Multi-level separable 3D decomposition stored in place (Mallat layout):
/// after level l the approximation occupies the low corner of extent
/// dims / 2^l, and the seven detail subbands of level l fill the rest of the
/// level-l box.
struct WaveletPyramid {
  int levels = 0;
  const FilterBank* bank_xy = nullptr;
  const FilterBank* bank_z = nullptr;
  Volume coeffs;

  /// Region holding level-l subbands (l = 1 .. levels); level_box(levels + 1) is the approximation.
  Box level_box(int level) const;
  Box approximation_box() const { return level_box(levels + 1); }
  /// Decomposition level of a coefficient, or 0 when it lies in the final approximation.
  int level_of(int z, int row, int col) const;
};

WaveletPyramid analyze3d(const Volume& vol, const FilterBank& bank_xy, const FilterBank& bank_z, int levels);
WaveletPyramid analyze3d(Volume&& vol, const FilterBank& bank_xy, const FilterBank& bank_z, int levels);
Volume synthesize3d(const WaveletPyramid& pyr);
Volume synthesize3d(WaveletPyramid&& pyr);

/// Threshold applied to level-l detail coefficients: sigma * (3.6 - 0.3 l).
double level_threshold(double sigma, int level);

/// Zeroes detail coefficients with |a| < level_threshold(sigma, l); the approximation is untouched.
WaveletPyramid hard_threshold(WaveletPyramid pyr, double sigma);
void hard_threshold_in_place(WaveletPyramid& pyr, double sigma);

}  // namespace gbm3d
