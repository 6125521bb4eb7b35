#include "gbm3d/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace gbm3d {

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

int parse_dim(const std::string& tok, const char* what) {
  int v = 0;
  try {
    std::size_t used = 0;
    v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
  } catch (const std::exception&) {
    fail(ErrorCode::Format, std::string("malformed ") + what + " in image header: '" + tok + "'");
  }
  if (v <= 0) fail(ErrorCode::Format, std::string(what) + " must be positive");
  return v;
}

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
  return v;
}

}  // namespace

unsigned char quantize_8bit(double v) {
  const double r = std::round(v);  // half away from zero
  return static_cast<unsigned char>(std::clamp(r, 0.0, 255.0));
}

Image read_pgm(std::istream& in) {
  if (header_token(in) != "P5") fail(ErrorCode::Format, "not a binary PGM (P5) stream");
  const int w = parse_dim(header_token(in), "width");
  const int h = parse_dim(header_token(in), "height");
  const int maxval = parse_dim(header_token(in), "maxval");
  if (maxval > 255) fail(ErrorCode::Format, "only 8-bit PGM is supported");
  std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) fail(ErrorCode::Format, "truncated PGM pixel data");
  std::vector<double> data(raw.begin(), raw.end());
  return Image(w, h, std::move(data), static_cast<double>(maxval));
}

Image read_rawf64(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Format, "missing RAWF64 header");
  std::istringstream hs(line);
  std::string magic, ws, hstr;
  hs >> magic >> ws >> hstr;
  if (magic != "RAWF64") fail(ErrorCode::Format, "not a RAWF64 stream");
  const int w = parse_dim(ws, "width");
  const int h = parse_dim(hstr, "height");
  std::vector<double> data(static_cast<std::size_t>(w) * h);
  for (double& v : data) {
    std::uint64_t bits = 0;
    in.read(reinterpret_cast<char*>(&bits), sizeof bits);
    if (!in) fail(ErrorCode::Format, "truncated RAWF64 sample data");
    v = std::bit_cast<double>(to_little_endian(bits));
    if (!std::isfinite(v)) fail(ErrorCode::Format, "RAWF64 contains a non-finite sample");
  }
  return Image(w, h, std::move(data));
}

Image read_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "' for reading");
  char magic[6] = {};
  in.read(magic, sizeof magic);
  const std::size_t got = static_cast<std::size_t>(in.gcount());
  in.clear();
  in.seekg(0);
  if (got >= 2 && magic[0] == 'P' && magic[1] == '5') return read_pgm(in);
  if (got == 6 && std::memcmp(magic, "RAWF64", 6) == 0) return read_rawf64(in);
  fail(ErrorCode::Format, "unsupported image format in '" + path + "' (expected P5 PGM or RAWF64)");
}

void write_pgm(std::ostream& out, const Image& img) {
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  std::vector<unsigned char> raw(img.size());
  std::transform(img.data.begin(), img.data.end(), raw.begin(), quantize_8bit);
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

void write_rawf64(std::ostream& out, const Image& img) {
  out << "RAWF64 " << img.width << ' ' << img.height << '\n';
  for (double v : img.data) {
    const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
}

ImageFormat format_from_extension(const std::string& path) {
  const auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == "pgm") return ImageFormat::Pgm;
  if (ext == "raw" || ext == "f64" || ext == "rawf64") return ImageFormat::RawF64;
  fail(ErrorCode::Format, "cannot infer image format from '" + path + "' (use .pgm or .rawf64)");
}

void write_image(const std::string& path, const Image& img, ImageFormat format) {
  require(!img.empty(), "write_image: empty image");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  if (format == ImageFormat::Pgm) {
    write_pgm(out, img);
  } else {
    write_rawf64(out, img);
  }
  if (!out) fail(ErrorCode::Io, "write to '" + path + "' failed");
}

}  // namespace gbm3d
