#include <doctest.h>

#include <cmath>
#include <numeric>

#include "gbm3d/wavelet.hpp"
#include "oracles.hpp"

using namespace gbm3d;

namespace {

Volume random_volume(int w, int h, int d, unsigned seed) {
  Volume v(w, h, d);
  v.data = oracle::random_vector(v.data.size(), seed, -100.0, 100.0);
  return v;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

double l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double scale = 0.0;
  for (double x : b) scale = std::max(scale, std::fabs(x));
  return oracle::max_abs_diff(a, b) / std::max(scale, 1e-300);
}

}  // namespace

TEST_CASE("filter bank properties") {
  const FilterBank& h = haar_bank();
  CHECK(l2(h.analysis_lo) == doctest::Approx(1.0));
  CHECK(l2(h.analysis_hi) == doctest::Approx(1.0));
  CHECK(h.analysis_lo == h.synthesis_lo);
  CHECK(h.analysis_hi == h.synthesis_hi);

  for (const FilterBank* b : {&haar_bank(), &bior15_bank()}) {
    CHECK(sum(b->analysis_lo) == doctest::Approx(std::sqrt(2.0)));
    CHECK(sum(b->synthesis_lo) == doctest::Approx(std::sqrt(2.0)));
    CHECK(std::fabs(sum(b->analysis_hi)) < 1e-15);  // vanishing moment
    CHECK(std::fabs(sum(b->synthesis_hi)) < 1e-15);
  }
}

TEST_CASE("one-level perfect reconstruction on random lines") {
  for (const FilterBank* b : {&haar_bank(), &bior15_bank()})
    for (int len : {2, 4, 10, 16, 34, 64}) {
      const std::vector<double> x = oracle::random_vector(len, static_cast<unsigned>(len));
      std::vector<double> c, y;
      analyze_line(*b, x, c);
      synthesize_line(*b, c, y);
      CHECK(oracle::max_abs_diff(x, y) < 1e-10);
    }
}

TEST_CASE("Haar on [1, 1]") {
  std::vector<double> out;
  analyze_line(haar_bank(), {1.0, 1.0}, out);
  CHECK(out[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(std::fabs(out[1]) < 1e-15);
}

TEST_CASE("odd line length is rejected") {
  std::vector<double> out;
  CHECK_THROWS_AS(analyze_line(haar_bank(), {1.0, 2.0, 3.0}, out), Error);
}

TEST_CASE("constant volume has no detail energy") {
  const Volume v(16, 16, 8, 3.0);
  const WaveletPyramid pyr = analyze3d(v, bior15_bank(), haar_bank(), 3);
  double detail = 0.0, approx = 0.0;
  for (int z = 0; z < 8; ++z)
    for (int r = 0; r < 16; ++r)
      for (int c = 0; c < 16; ++c) {
        const double a = pyr.coeffs.at(z, r, c);
        (pyr.level_of(z, r, c) == 0 ? approx : detail) += a * a;
      }
  CHECK(detail < 1e-18);
  CHECK(approx == doctest::Approx(9.0 * 16 * 16 * 8));
}

TEST_CASE("3D round trip over admissible shapes") {
  unsigned seed = 0;
  for (int w : {8, 16, 32})
    for (int h : {8, 16, 32})
      for (int d : {8, 16, 32}) {
        const Volume v = random_volume(w, h, d, ++seed);
        const WaveletPyramid pyr = analyze3d(v, bior15_bank(), haar_bank(), 3);
        CHECK(pyr.coeffs.data.size() == v.data.size());
        CHECK(max_rel(synthesize3d(pyr).data, v.data) < 1e-8);
      }
}

TEST_CASE("rvalue overloads agree with the copying ones") {
  const Volume v = random_volume(16, 8, 8, 99);
  const WaveletPyramid a = analyze3d(v, bior15_bank(), haar_bank(), 2);
  WaveletPyramid b = analyze3d(Volume(v), bior15_bank(), haar_bank(), 2);
  CHECK(a.coeffs.data == b.coeffs.data);
  CHECK(synthesize3d(a).data == synthesize3d(std::move(b)).data);
}

TEST_CASE("all-zero pyramid synthesizes to zero") {
  const WaveletPyramid pyr = analyze3d(Volume(8, 8, 8), bior15_bank(), haar_bank(), 3);
  for (double v : synthesize3d(pyr).data) CHECK(v == 0.0);
}

TEST_CASE("Haar synthesis atoms have unit norm and are orthogonal") {
  WaveletPyramid pyr = analyze3d(Volume(8, 8, 8), haar_bank(), haar_bank(), 3);
  std::vector<std::vector<double>> atoms;
  for (std::size_t i = 0; i < pyr.coeffs.data.size(); i += 37) {
    std::fill(pyr.coeffs.data.begin(), pyr.coeffs.data.end(), 0.0);
    pyr.coeffs.data[i] = 1.0;
    atoms.push_back(synthesize3d(pyr).data);
    CHECK(l2(atoms.back()) == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (std::size_t a = 0; a < atoms.size(); ++a)
    for (std::size_t b = a + 1; b < atoms.size(); ++b)
      CHECK(std::fabs(std::inner_product(atoms[a].begin(), atoms[a].end(), atoms[b].begin(), 0.0)) < 1e-12);
}

TEST_CASE("indivisible shapes are rejected") {
  CHECK_THROWS_AS(analyze3d(Volume(12, 16, 8), bior15_bank(), haar_bank(), 3), Error);
  CHECK_THROWS_AS(analyze3d(Volume(16, 16, 4), bior15_bank(), haar_bank(), 3), Error);
}

TEST_CASE("threshold schedule") {
  CHECK(level_threshold(10.0, 1) == doctest::Approx(33.0));
  CHECK(level_threshold(10.0, 3) == doctest::Approx(27.0));
}

TEST_CASE("hard threshold on level-1 coefficients") {
  WaveletPyramid pyr = analyze3d(Volume(8, 8, 8), bior15_bank(), haar_bank(), 3);
  const Box cells[] = {{0, 1, 0, 1, 4, 5}, {0, 1, 4, 5, 0, 1}, {4, 5, 0, 1, 0, 1}, {7, 8, 7, 8, 7, 8}, {2, 3, 5, 6, 1, 2}};
  const double values[] = {-40.0, -33.0, 20.0, 33.0, 40.0};
  const double expected[] = {-40.0, -33.0, 0.0, 33.0, 40.0};
  for (int i = 0; i < 5; ++i) {
    REQUIRE(pyr.level_of(cells[i].z0, cells[i].r0, cells[i].c0) == 1);
    pyr.coeffs.at(cells[i].z0, cells[i].r0, cells[i].c0) = values[i];
  }
  pyr.coeffs.at(0, 0, 0) = 1.0;  // approximation, never cut
  const WaveletPyramid out = hard_threshold(pyr, 10.0);
  for (int i = 0; i < 5; ++i) CHECK(out.coeffs.at(cells[i].z0, cells[i].r0, cells[i].c0) == expected[i]);
  CHECK(out.coeffs.at(0, 0, 0) == 1.0);
}

TEST_CASE("level-3 boundary and approximation exemption") {
  WaveletPyramid pyr = analyze3d(Volume(16, 16, 16), bior15_bank(), haar_bank(), 3);
  REQUIRE(pyr.level_of(0, 0, 3) == 3);
  REQUIRE(pyr.level_of(1, 1, 1) == 0);
  pyr.coeffs.at(0, 0, 3) = 27.0;
  pyr.coeffs.at(0, 1, 3) = 26.99;
  pyr.coeffs.at(1, 1, 1) = 0.5;
  const WaveletPyramid out = hard_threshold(pyr, 10.0);
  CHECK(out.coeffs.at(0, 0, 3) == 27.0);
  CHECK(out.coeffs.at(0, 1, 3) == 0.0);
  CHECK(out.coeffs.at(1, 1, 1) == 0.5);
}

TEST_CASE("hard threshold properties") {
  const WaveletPyramid pyr = analyze3d(random_volume(16, 16, 8, 5), bior15_bank(), haar_bank(), 3);
  CHECK(hard_threshold(pyr, 0.0).coeffs.data == pyr.coeffs.data);

  const WaveletPyramid once = hard_threshold(pyr, 15.0);
  CHECK(hard_threshold(once, 15.0).coeffs.data == once.coeffs.data);

  WaveletPyramid neg = pyr;
  for (double& v : neg.coeffs.data) v = -v;
  const WaveletPyramid neg_out = hard_threshold(neg, 15.0);
  for (std::size_t i = 0; i < once.coeffs.data.size(); ++i) {
    CHECK(neg_out.coeffs.data[i] == -once.coeffs.data[i]);
    CHECK(std::fabs(once.coeffs.data[i]) <= std::fabs(pyr.coeffs.data[i]));
  }
  CHECK(l2(once.coeffs.data) <= l2(pyr.coeffs.data));

  WaveletPyramid inplace = pyr;
  hard_threshold_in_place(inplace, 15.0);
  CHECK(inplace.coeffs.data == once.coeffs.data);
  CHECK_THROWS_AS(hard_threshold(pyr, -1.0), Error);
}

TEST_CASE("volume cyclic shift") {
  const Volume v = random_volume(8, 4, 2, 3);
  const Volume s = cyclic_shift(v, 1);
  for (int z = 0; z < 2; ++z)
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 8; ++c) CHECK(s.at(z, r, c) == v.at(oracle::mod(z - 1, 2), oracle::mod(r - 1, 4), oracle::mod(c - 1, 8)));
  CHECK(cyclic_shift(s, -1).data == v.data);
}
