#pragma once

#include <iosfwd>
#include <string>

#include "gbm3d/core.hpp"

namespace gbm3d {

enum class ImageFormat {
  Pgm,     // binary P5, maxval <= 255
  RawF64,  // "RAWF64 <width> <height>\n" then little-endian float64 samples
};

/// Detects the format from the file's magic bytes.
Image read_image(const std::string& path);
Image read_pgm(std::istream& in);
Image read_rawf64(std::istream& in);

/// Rounds half away from zero and clamps to [0, 255].
void write_pgm(std::ostream& out, const Image& img);
void write_rawf64(std::ostream& out, const Image& img);
void write_image(const std::string& path, const Image& img, ImageFormat format);

/// .pgm -> Pgm; .raw, .f64, .rawf64 -> RawF64; anything else is an error.
ImageFormat format_from_extension(const std::string& path);

unsigned char quantize_8bit(double v);

}  // namespace gbm3d
