#pragma once

#include <span>
#include <vector>

#include "gbm3d/core.hpp"
#include "gbm3d/spectral.hpp"

namespace gbm3d {

/// Squared l2 norm of the n*n block whose top-left pixel is at each position
/// (blocks are indexed cyclically, so every position has a value).
struct BlockNormImage {
  int width = 0;
  int height = 0;
  int block = 0;
  std::vector<double> data;

  double at(int row, int col) const { return data[static_cast<std::size_t>(row) * width + col]; }
};

struct Match {
  Position pos;
  double distance = 0.0;

  friend bool operator==(const Match&, const Match&) = default;
};

/// K matches per reference tile, raster order over tiles.
struct MatchTable {
  TileGrid grid;
  int k = 0;
  std::vector<Match> entries;  // grid.count() * k
  std::vector<int> valid;      // genuine matches per tile; slots [valid, k) repeat the reference

  std::span<const Match> tile(int index) const {
    return {entries.data() + static_cast<std::size_t>(index) * k, static_cast<std::size_t>(k)};
  }

  friend bool operator==(const MatchTable& a, const MatchTable& b) {
    return a.k == b.k && a.grid.tile == b.grid.tile && a.grid.cols == b.grid.cols && a.grid.rows == b.grid.rows &&
           a.entries == b.entries && a.valid == b.valid;
  }
};

/// Inclusive range of candidate top-left positions searched for one reference.
struct SearchWindow {
  int row0 = 0;
  int row1 = 0;
  int col0 = 0;
  int col1 = 0;

  int rows() const noexcept { return row1 - row0 + 1; }
  int cols() const noexcept { return col1 - col0 + 1; }
  bool contains(Position p) const noexcept { return p.row >= row0 && p.row <= row1 && p.col >= col0 && p.col <= col1; }
};

/// Offsets [-window/2, window - window/2) around the reference top-left,
/// intersected with the positions whose block lies inside the image.
SearchWindow search_window(int width, int height, Position ref, int n, int window);

enum class MatchMethod {
  Fft,    // inner products by one cross-correlation per reference
  Naive,  // explicit per-candidate sum of squared differences
};

BlockNormImage block_norms(const Image& img, int n);

/// Distances from the reference block to every candidate of its search window.
/// Element (i, j) belongs to candidate (win.row0 + i, win.col0 + j).
RealPlane distance_map(const Image& img, const BlockNormImage& norms, Position ref, int n, int window);

struct TopK {
  std::vector<Match> matches;
  int valid = 0;
};

/// Reference first (d = 0), then the k-1 nearest other candidates ordered by
/// (distance, row, col). Short lists are completed by repeating the reference.
TopK top_k(const RealPlane& dmap, const SearchWindow& win, Position ref, int k);

/// Reusable per-worker state for matching many references in one image.
class BlockMatcher {
 public:
  BlockMatcher(const Image& img, const BlockNormImage& norms, int n, int window);

  /// Fills dmap (resized to the window shape) and returns the window used.
  SearchWindow distances(Position ref, RealPlane& dmap, MatchMethod method = MatchMethod::Fft);

 private:
  const Image& img_;
  const BlockNormImage& norms_;
  int n_;
  int window_;
  int fft_side_;
  Correlator corr_;
  std::vector<double> kernel_;
  std::vector<double> region_;
  std::vector<double> inner_;
};

MatchTable build_match_table(const Image& img, const DenoiseParams& params, int n,
                             MatchMethod method = MatchMethod::Fft, int workers = 1);

}  // namespace gbm3d
