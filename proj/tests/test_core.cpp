#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "gbm3d/core.hpp"
#include "oracles.hpp"

using namespace gbm3d;

TEST_CASE("image construction validates shape and finiteness") {
  CHECK_NOTHROW(Image(3, 2, std::vector<double>(6, 1.0)));
  CHECK_THROWS_AS(Image(3, 2, std::vector<double>(5, 1.0)), Error);
  std::vector<double> bad(4, 0.0);
  bad[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Image(2, 2, bad), Error);
  bad[2] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Image(2, 2, bad), Error);
}

TEST_CASE("default parameters") {
  const DenoiseParams p;
  CHECK(p.n1 == 16);
  CHECK(p.n2 == 8);
  CHECK(p.k == 16);
  CHECK(p.window == 32);
  CHECK(p.levels == 3);
  CHECK(p.spins == 2);
  CHECK(p.trials == 3);
  CHECK_FALSE(p.tau_match.has_value());
  CHECK(p.eps_tv > 0.0);
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("parameter validation") {
  auto rejects = [](auto mutate) {
    DenoiseParams p;
    mutate(p);
    CHECK_THROWS_AS(p.validate(), Error);
  };
  rejects([](DenoiseParams& p) { p.k = 12; });
  rejects([](DenoiseParams& p) { p.k = 4; });  // below 2^levels
  rejects([](DenoiseParams& p) { p.window = 8; });
  rejects([](DenoiseParams& p) { p.n1 = 0; });
  rejects([](DenoiseParams& p) { p.sigma = -1.0; });
  rejects([](DenoiseParams& p) { p.eps_tv = 0.0; });
  rejects([](DenoiseParams& p) { p.spins = 0; });
  rejects([](DenoiseParams& p) { p.trials = 0; });
}

TEST_CASE("pad_image") {
  SUBCASE("already aligned") {
    const Image img = oracle::random_image(512, 512, 1);
    const Image out = pad_image(img, 16, 3);
    CHECK(out.width == 512);
    CHECK(out.height == 512);
    CHECK(out.data == img.data);
  }
  SUBCASE("500 to 512 with edge replication") {
    const Image img = oracle::random_image(500, 500, 2);
    const Image out = pad_image(img, 16, 3);
    REQUIRE(out.width == 512);
    REQUIRE(out.height == 512);
    for (int r = 0; r < 512; ++r)
      for (int c = 0; c < 512; ++c) CHECK(out.at(r, c) == img.at(std::min(r, 499), std::min(c, 499)));
  }
  SUBCASE("single pixel") {
    const Image img(1, 1, 7.0);
    const Image out = pad_image(img, 2, 0);
    CHECK(out.width == 2);
    CHECK(out.height == 2);
    for (double v : out.data) CHECK(v == 7.0);
  }
  SUBCASE("non-square, unit is lcm of n and 2^levels") {
    const Image out = pad_image(Image(13, 30), 12, 3);  // lcm(12, 8) = 24
    CHECK(out.width == 24);
    CHECK(out.height == 48);
  }
  CHECK_THROWS_AS(pad_image(Image(), 16, 3), Error);
  CHECK_THROWS_AS(pad_image(Image(4, 4), 0, 3), Error);
}

TEST_CASE("crop_image") {
  Image img(4, 4);
  for (int i = 0; i < 16; ++i) img.data[i] = i;
  const Image q = crop_image(img, 2, 2);
  CHECK(q.data == std::vector<double>{0, 1, 4, 5});
  CHECK(crop_image(img, 4, 4).data == img.data);
  CHECK_THROWS_AS(crop_image(img, 5, 4), Error);
}

TEST_CASE("pad then crop is the identity for sizes 1..64") {
  const std::pair<int, int> configs[] = {{16, 3}, {8, 0}, {3, 2}};
  for (auto [n, levels] : configs)
    for (int h = 1; h <= 64; h += 3)
      for (int w = 1; w <= 64; ++w) {
        const Image img = oracle::random_image(w, h, static_cast<unsigned>(w * 131 + h));
        const Image padded = pad_image(img, n, levels);
        const int unit = std::lcm(n, 1 << levels);
        CHECK(padded.width % unit == 0);
        CHECK(padded.height % unit == 0);
        CHECK(padded.width - w < unit);
        CHECK(padded.height - h < unit);
        CHECK(crop_image(padded, w, h).data == img.data);
      }
}

TEST_CASE("tile_grid") {
  const TileGrid g = tile_grid(512, 512, 16);
  CHECK(g.cols == 32);
  CHECK(g.rows == 32);
  const TileGrid one = tile_grid(16, 16, 16);
  CHECK(one.count() == 1);
  CHECK(one.origin(0) == Position{0, 0});
  const TileGrid wide = tile_grid(64, 32, 16);
  CHECK(wide.cols == 4);
  CHECK(wide.rows == 2);
  CHECK(wide.origin(5) == Position{16, 16});
  CHECK_THROWS_AS(tile_grid(60, 32, 16), Error);
}

TEST_CASE("tile_grid tiles are disjoint and cover the domain") {
  const TileGrid g = tile_grid(96, 48, 16);
  std::vector<int> hits(96 * 48, 0);
  for (int t = 0; t < g.count(); ++t) {
    const Position o = g.origin(t);
    for (int r = 0; r < g.tile; ++r)
      for (int c = 0; c < g.tile; ++c) ++hits[(o.row + r) * 96 + o.col + c];
  }
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("cyclic_shift") {
  Image img(3, 2);
  for (int i = 0; i < 6; ++i) img.data[i] = i;
  const Image s = cyclic_shift(img, 1, 1);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) CHECK(s.at(r, c) == img.at(oracle::mod(r - 1, 2), oracle::mod(c - 1, 3)));
  CHECK(cyclic_shift(s, -1, -1).data == img.data);
  CHECK(cyclic_shift(img, 4, -6).data == img.data);
}

TEST_CASE("trial shifts") {
  CHECK(trial_shifts(16, 3) == std::vector<int>{0, 4, 8});
  CHECK(trial_shifts(8, 3) == std::vector<int>{0, 2, 4});
  CHECK(trial_shifts(16, 1) == std::vector<int>{0});
}
