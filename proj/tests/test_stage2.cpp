#include <doctest.h>

#include <cmath>

#include "gbm3d/metrics.hpp"
#include "gbm3d/stage1.hpp"
#include "gbm3d/stage2.hpp"
#include "oracles.hpp"

using namespace gbm3d;

namespace {

DenoiseParams with_sigma(double sigma) {
  DenoiseParams p;
  p.sigma = sigma;
  return p;
}

std::vector<double> group_of(const std::vector<double>& data, const GroupStack& s, int t) {
  return {data.begin() + static_cast<std::ptrdiff_t>(s.offset(t, 0)),
          data.begin() + static_cast<std::ptrdiff_t>(s.offset(t, 0) + s.group_size())};
}

GroupStack hand_stack(int groups, unsigned seed) {
  GroupStack s;
  s.n = 8;
  s.k = 16;
  s.table.grid = tile_grid(8 * groups, 8, 8);
  s.table.k = 16;
  s.noisy = oracle::random_vector(s.group_size() * groups, seed, 0.0, 255.0);
  s.basic = s.noisy;
  for (double& v : s.basic) v = 0.8 * v + 20.0;
  return s;
}

double l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("group haar depth") {
  CHECK(group_haar_levels(16) == 4);
  CHECK(group_haar_levels(1) == 0);
  CHECK_THROWS_AS(group_haar_levels(12), Error);
}

TEST_CASE("group stack gathers blocks at the positions matched on the basic estimate") {
  const Image noisy = oracle::random_image(48, 40, 201);
  const Image basic = oracle::random_image(48, 40, 202);
  const DenoiseParams p = with_sigma(10.0);
  const GroupStack s = build_group_stack(noisy, basic, p);
  CHECK(s.n == 8);
  CHECK(s.k == 16);
  CHECK(s.groups() == 6 * 5);
  for (int t = 0; t < s.groups(); ++t) {
    const Position ref = s.table.grid.origin(t);
    const oracle::TileMatches expected = oracle::exhaustive_top_k(basic, ref, 8, 32, 16);
    const auto got = s.table.tile(t);
    for (int z = 0; z < 16; ++z) {
      REQUIRE(got[z].pos == expected.list[z].pos);
      const Position q = got[z].pos;
      for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) {
          CHECK(s.noisy[s.offset(t, z) + r * 8 + c] == noisy.at(q.row + r, q.col + c));
          CHECK(s.basic[s.offset(t, z) + r * 8 + c] == basic.at(q.row + r, q.col + c));
        }
    }
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) CHECK(s.basic[s.offset(t, 0) + r * 8 + c] == basic.at(ref.row + r, ref.col + c));
  }
  CHECK_THROWS_AS(build_group_stack(noisy, Image(40, 40), p), Error);
}

TEST_CASE("group stack degenerate inputs") {
  const Image img = oracle::random_image(32, 32, 203);
  const GroupStack same = build_group_stack(img, img, with_sigma(0.0));
  CHECK(same.noisy == same.basic);
  const GroupStack flat = build_group_stack(Image(32, 32, 5.0), Image(32, 32, 5.0), with_sigma(1.0));
  for (double v : flat.noisy) CHECK(v == 5.0);
}

TEST_CASE("wiener filtering with sigma 0 is the identity") {
  GroupStack s = hand_stack(3, 204);
  s.basic = s.noisy;
  const WienerResult r = wiener_filter_groups(s, 0.0);
  CHECK(oracle::max_abs_diff(r.filtered, s.noisy) < 1e-9);
  for (double w : r.weights) CHECK(w == 1.0);
}

TEST_CASE("a coefficient equal to sigma is halved") {
  // a constant group of value c has a single nonzero coefficient: 8c (DCT) times 4 (Haar over 16 slots)
  GroupStack s = hand_stack(1, 205);
  const double sigma = 64.0;
  std::fill(s.basic.begin(), s.basic.end(), sigma / 32.0);
  s.noisy = s.basic;
  const WienerResult r = wiener_filter_groups(s, sigma);
  for (std::size_t i = 0; i < r.filtered.size(); ++i) CHECK(r.filtered[i] == doctest::Approx(s.noisy[i] / 2.0).epsilon(1e-12));
  // ||W||^2 = 1/4 < 1, so the weight is 1 / sigma^2
  CHECK(r.weights[0] == doctest::Approx(1.0 / (sigma * sigma)));
}

TEST_CASE("batched filtering equals the per-group loop") {
  const GroupStack s = hand_stack(5, 206);
  for (double sigma : {0.0, 5.0, 30.0}) {
    const WienerResult r = wiener_filter_groups(s, sigma);
    for (int t = 0; t < s.groups(); ++t) {
      const oracle::WienerGroup g = oracle::wiener_group(group_of(s.noisy, s, t), group_of(s.basic, s, t), 8, 16, sigma);
      CHECK(oracle::max_abs_diff(group_of(r.filtered, s, t), g.filtered) <= 1e-10 * 255.0);
      CHECK(r.weights[t] == doctest::Approx(g.weight).epsilon(1e-12));
    }
  }
}

TEST_CASE("wiener shrinkage contracts energy per group") {
  const GroupStack s = hand_stack(4, 207);
  const WienerResult r = wiener_filter_groups(s, 25.0);
  for (int t = 0; t < s.groups(); ++t) {
    CHECK(l2(group_of(r.filtered, s, t)) <= l2(group_of(s.noisy, s, t)) + 1e-9);
    CHECK(r.weights[t] > 0.0);
    CHECK(std::isfinite(r.weights[t]));
  }
  CHECK_THROWS_AS(wiener_filter_groups(s, -1.0), Error);
}

TEST_CASE("group aggregation equals a direct scatter") {
  const Image noisy = oracle::random_image(32, 24, 208);
  const Image basic = oracle::random_image(32, 24, 209);
  const GroupStack s = build_group_stack(noisy, basic, with_sigma(15.0));
  const WienerResult r = wiener_filter_groups(s, 15.0);
  const Image out = aggregate_groups(s, r);
  std::vector<double> num(32 * 24, 0.0), den(32 * 24, 0.0);
  for (int t = 0; t < s.groups(); ++t)
    for (int z = 0; z < s.table.valid[t]; ++z) {
      const Position d = s.table.tile(t)[z].pos;
      for (int i = 0; i < 64; ++i) {
        const int px = (d.row + i / 8) * 32 + d.col + i % 8;
        num[px] += r.weights[t] * r.filtered[s.offset(t, z) + i];
        den[px] += r.weights[t];
      }
    }
  for (int i = 0; i < 32 * 24; ++i) CHECK(out.data[i] == doctest::Approx(num[i] / den[i]).epsilon(1e-12));
}

TEST_CASE("stage 2 fixed points") {
  const Image img = oracle::random_image(40, 40, 210);
  CHECK(oracle::max_abs_diff(stage2_denoise(img, img, with_sigma(0.0)).data, img.data) < 1e-8);
  const Image flat(48, 32, 90.0);
  // only the DC survives: 8x8 DCT scales it by 8, the 16-deep Haar by 4
  const double dc = 90.0 * 8.0 * 4.0;
  const double expected = 90.0 * dc * dc / (dc * dc + 20.0 * 20.0);
  for (double v : stage2_denoise(flat, flat, with_sigma(20.0)).data) CHECK(std::fabs(v - expected) < 1e-8);
}

TEST_CASE("stage 2 refines the stage-1 estimate") {
  Image clean(96, 96);
  for (int r = 0; r < 96; ++r)
    for (int c = 0; c < 96; ++c) clean.at(r, c) = 120.0 + 50.0 * std::sin(0.13 * c + 0.05 * r) + ((r / 12) % 2) * 25.0;
  const Image noisy = add_gaussian_noise(clean, 20.0, 77);
  const DenoiseParams p = with_sigma(20.0);
  const Image basic = stage1_denoise(noisy, p);
  const Image final_est = stage2_denoise(noisy, basic, p);
  CHECK(final_est.data != basic.data);
  CHECK(psnr(clean, final_est) > psnr(clean, noisy) + 5.0);
  const Image trial = stage2_trial(noisy, basic, p, 2);
  const Image direct = cyclic_shift(stage2_estimate(cyclic_shift(noisy, 2, 2), cyclic_shift(basic, 2, 2), p), -2, -2);
  CHECK(trial.data == direct.data);
  CHECK(stage2_denoise(noisy, basic, p, 3).data == final_est.data);
}
