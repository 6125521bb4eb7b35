#include "gbm3d/metrics.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace gbm3d {

double mean_intensity(const Image& img) {
  require(!img.empty(), "mean_intensity: empty image");
  return std::accumulate(img.data.begin(), img.data.end(), 0.0) / static_cast<double>(img.size());
}

double sigma_for_snr(const Image& img, double snr) {
  require(std::isfinite(snr) && snr > 0.0, "sigma_for_snr: snr must be positive");
  return mean_intensity(img) / snr;
}

NoiseSpec noise_for_snr(const Image& img, double snr, std::uint64_t seed) {
  return NoiseSpec{snr, sigma_for_snr(img, snr), seed};
}

Image add_gaussian_noise(const Image& img, double sigma, std::uint64_t seed) {
  require(std::isfinite(sigma) && sigma >= 0.0, "add_gaussian_noise: sigma must be non-negative");
  Image out = img;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& v : out.data) v += noise(rng);
  return out;
}

double mse(const Image& a, const Image& b) {
  require(a.width == b.width && a.height == b.height, "mse: dimension mismatch");
  require(!a.empty(), "mse: empty images");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

double psnr(const Image& reference, const Image& test) {
  const double e = mse(reference, test);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(kPsnrPeak * kPsnrPeak / e);
}

}  // namespace gbm3d
