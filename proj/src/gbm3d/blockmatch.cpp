#include "gbm3d/blockmatch.hpp"

#include <algorithm>
#include <memory>

#include "gbm3d/parallel.hpp"

namespace gbm3d {

namespace {

// Expanded-form distances below this fraction of ||f||^2 + ||g||^2 are FFT rounding.
constexpr double kRelativeZero = 1e-11;

}  // namespace

SearchWindow search_window(int width, int height, Position ref, int n, int window) {
  const int before = window / 2;
  const int after = window - before - 1;
  return SearchWindow{
      std::max(0, ref.row - before),
      std::min(height - n, ref.row + after),
      std::max(0, ref.col - before),
      std::min(width - n, ref.col + after),
  };
}

BlockNormImage block_norms(const Image& img, int n) {
  require(n >= 1, "block_norms: block side must be positive");
  require(n <= img.width && n <= img.height, "block_norms: block larger than image");

  std::vector<double> ones(img.size(), 0.0);
  for (int r = 0; r < n; ++r) std::fill_n(ones.begin() + static_cast<std::ptrdiff_t>(r) * img.width, n, 1.0);
  std::vector<double> squared(img.size());
  std::transform(img.data.begin(), img.data.end(), squared.begin(), [](double v) { return v * v; });

  BlockNormImage out{img.width, img.height, n, std::vector<double>(img.size())};
  Correlator corr(img.height, img.width);
  corr.correlate(ones, squared, out.data);
  for (double& v : out.data) v = std::max(v, 0.0);
  return out;
}

BlockMatcher::BlockMatcher(const Image& img, const BlockNormImage& norms, int n, int window)
    : img_(img),
      norms_(norms),
      n_(n),
      window_(window),
      fft_side_(window + n),
      corr_(fft_side_, fft_side_),
      kernel_(static_cast<std::size_t>(fft_side_) * fft_side_),
      region_(static_cast<std::size_t>(fft_side_) * fft_side_),
      inner_(static_cast<std::size_t>(fft_side_) * fft_side_) {
  require(n >= 1 && window >= 1, "BlockMatcher: block side and window must be positive");
  require(n <= img.width && n <= img.height, "BlockMatcher: block larger than image");
  require(norms.width == img.width && norms.height == img.height && norms.block == n,
          "BlockMatcher: norm image does not match");
}

SearchWindow BlockMatcher::distances(Position ref, RealPlane& dmap, MatchMethod method) {
  require(ref.row >= 0 && ref.col >= 0 && ref.row + n_ <= img_.height && ref.col + n_ <= img_.width,
          "distance_map: reference block outside the image");
  const SearchWindow win = search_window(img_.width, img_.height, ref, n_, window_);
  if (dmap.width != win.cols() || dmap.height != win.rows()) dmap = RealPlane(win.cols(), win.rows());

  const int n = n_;
  if (method == MatchMethod::Naive) {
    for (int i = 0; i < win.rows(); ++i) {
      for (int j = 0; j < win.cols(); ++j) {
        double d = 0.0;
        for (int r = 0; r < n; ++r) {
          const double* f = img_.row_ptr(ref.row + r) + ref.col;
          const double* g = img_.row_ptr(win.row0 + i + r) + win.col0 + j;
          for (int c = 0; c < n; ++c) {
            const double diff = f[c] - g[c];
            d += diff * diff;
          }
        }
        dmap.at(i, j) = d;
      }
    }
    return win;
  }

  const int side = fft_side_;
  std::fill(kernel_.begin(), kernel_.end(), 0.0);
  for (int r = 0; r < n; ++r) {
    const double* src = img_.row_ptr(ref.row + r) + ref.col;
    std::copy(src, src + n, kernel_.begin() + static_cast<std::ptrdiff_t>(r) * side);
  }
  std::fill(region_.begin(), region_.end(), 0.0);
  const int region_rows = win.rows() + n - 1;
  const int region_cols = win.cols() + n - 1;
  for (int r = 0; r < region_rows; ++r) {
    const double* src = img_.row_ptr(win.row0 + r) + win.col0;
    std::copy(src, src + region_cols, region_.begin() + static_cast<std::ptrdiff_t>(r) * side);
  }
  corr_.correlate(kernel_, region_, inner_);

  // ||f - g||^2 = ||f||^2 + ||g||^2 - 2<f, g>
  const double ref_norm = norms_.at(ref.row, ref.col);
  for (int i = 0; i < win.rows(); ++i) {
    for (int j = 0; j < win.cols(); ++j) {
      const double cand_norm = norms_.at(win.row0 + i, win.col0 + j);
      double d = ref_norm + cand_norm - 2.0 * inner_[static_cast<std::size_t>(i) * side + j];
      if (d <= kRelativeZero * (ref_norm + cand_norm)) d = 0.0;
      dmap.at(i, j) = d;
    }
  }
  return win;
}

RealPlane distance_map(const Image& img, const BlockNormImage& norms, Position ref, int n, int window) {
  BlockMatcher matcher(img, norms, n, window);
  RealPlane dmap;
  matcher.distances(ref, dmap);
  return dmap;
}

TopK top_k(const RealPlane& dmap, const SearchWindow& win, Position ref, int k) {
  require(k >= 1, "top_k: k must be at least 1");
  require(win.contains(ref), "top_k: reference must be a candidate");
  require(dmap.width == win.cols() && dmap.height == win.rows(), "top_k: distance map does not match window");

  TopK out;
  out.matches.reserve(k);
  out.matches.push_back({ref, 0.0});

  std::vector<Match> others;
  others.reserve(dmap.data.size());
  for (int i = 0; i < win.rows(); ++i) {
    for (int j = 0; j < win.cols(); ++j) {
      const Position p{win.row0 + i, win.col0 + j};
      if (p != ref) others.push_back({p, dmap.at(i, j)});
    }
  }
  const auto less = [](const Match& a, const Match& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.pos < b.pos;
  };
  const std::size_t take = std::min<std::size_t>(others.size(), static_cast<std::size_t>(k - 1));
  std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(take), others.end(), less);
  out.matches.insert(out.matches.end(), others.begin(), others.begin() + static_cast<std::ptrdiff_t>(take));
  out.valid = static_cast<int>(out.matches.size());
  while (static_cast<int>(out.matches.size()) < k) out.matches.push_back({ref, 0.0});
  return out;
}

MatchTable build_match_table(const Image& img, const DenoiseParams& params, int n, MatchMethod method, int workers) {
  require(n >= 1, "build_match_table: block side must be positive");
  require(params.k >= 1 && params.window >= 1, "build_match_table: k and window must be positive");
  MatchTable table;
  table.grid = tile_grid(img.width, img.height, n);
  table.k = params.k;
  const int tiles = table.grid.count();
  table.entries.resize(static_cast<std::size_t>(tiles) * params.k);
  table.valid.resize(tiles);

  const BlockNormImage norms = method == MatchMethod::Fft ? block_norms(img, n) : BlockNormImage{img.width, img.height, n, std::vector<double>(img.size())};

  if (workers <= 0) workers = default_workers();
  std::vector<std::unique_ptr<BlockMatcher>> matchers(std::max(1, workers));
  std::vector<RealPlane> dmaps(matchers.size());

  parallel_for(static_cast<std::size_t>(tiles), workers, [&](std::size_t t, int worker) {
    auto& matcher = matchers[worker];
    if (!matcher) matcher = std::make_unique<BlockMatcher>(img, norms, n, params.window);
    const Position ref = table.grid.origin(static_cast<int>(t));
    const SearchWindow win = matcher->distances(ref, dmaps[worker], method);
    TopK best = top_k(dmaps[worker], win, ref, params.k);
    std::copy(best.matches.begin(), best.matches.end(), table.entries.begin() + static_cast<std::ptrdiff_t>(t) * params.k);
    table.valid[t] = best.valid;
  });
  return table;
}

}  // namespace gbm3d
