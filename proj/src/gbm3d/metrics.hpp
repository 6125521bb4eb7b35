#pragma once

#include <cstdint>

#include "gbm3d/core.hpp"

namespace gbm3d {

struct NoiseSpec {
  double snr = 0.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr double kPsnrPeak = 255.0;

double mean_intensity(const Image& img);

/// sigma such that mean(img) / sigma == snr.
double sigma_for_snr(const Image& img, double snr);

NoiseSpec noise_for_snr(const Image& img, double snr, std::uint64_t seed);

/// img + N(0, sigma^2) per pixel, unclipped. Same seed, same output.
Image add_gaussian_noise(const Image& img, double sigma, std::uint64_t seed);

double mse(const Image& a, const Image& b);

/// 10 log10(255^2 / MSE); +infinity for identical images.
double psnr(const Image& reference, const Image& test);

}  // namespace gbm3d
