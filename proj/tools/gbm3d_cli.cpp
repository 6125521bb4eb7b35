#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gbm3d/gbm3d.h"

namespace fs = std::filesystem;

namespace {

struct ImageDeleter {
  void operator()(gbm3d_image* p) const { gbm3d_image_destroy(p); }
};
struct ParamsDeleter {
  void operator()(gbm3d_params* p) const { gbm3d_params_destroy(p); }
};
using ImagePtr = std::unique_ptr<gbm3d_image, ImageDeleter>;
using ParamsPtr = std::unique_ptr<gbm3d_params, ParamsDeleter>;

void check(gbm3d_status s, const std::string& context) {
  if (s != GBM3D_OK) throw std::runtime_error(context + ": " + gbm3d_last_error());
}

ImagePtr load(const std::string& path) {
  gbm3d_image* img = nullptr;
  check(gbm3d_image_read(path.c_str(), &img), "reading " + path);
  return ImagePtr(img);
}

ParamsPtr make_params(const std::string& json_path) {
  gbm3d_params* p = nullptr;
  check(gbm3d_params_create(&p), "params");
  ParamsPtr out(p);
  if (!json_path.empty()) check(gbm3d_params_load_json(p, json_path.c_str()), "loading " + json_path);
  return out;
}

double psnr(const gbm3d_image* ref, const gbm3d_image* test) {
  double db = 0.0;
  check(gbm3d_psnr(ref, test, &db), "psnr");
  return db;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

struct DenoiseArgs {
  std::string input, output, reference, params;
  std::optional<double> sigma, snr;
  bool add_noise = false;
  int stage = 2;
  std::uint64_t seed = 0;
  int threads = 0;
  bool no_patches = false;
};

int run_denoise(const DenoiseArgs& a) {
  if (a.add_noise && !a.snr) throw CLI::ValidationError("--add-noise", "requires --snr");
  ImagePtr input = load(a.input);
  ParamsPtr params = make_params(a.params);

  double sigma = 0.0;
  if (a.sigma) {
    sigma = *a.sigma;
  } else {
    check(gbm3d_sigma_for_snr(input.get(), *a.snr, &sigma), "--snr");
  }

  ImagePtr reference;
  if (!a.reference.empty()) reference = load(a.reference);

  ImagePtr noisy;
  const gbm3d_image* work = input.get();
  if (a.add_noise) {
    gbm3d_image* n = nullptr;
    check(gbm3d_add_noise(input.get(), sigma, a.seed, &n), "adding noise");
    noisy.reset(n);
    work = noisy.get();
    if (!reference) reference.reset([&] {
      gbm3d_image* copy = nullptr;
      check(gbm3d_image_create(gbm3d_image_width(input.get()), gbm3d_image_height(input.get()),
                               gbm3d_image_data(input.get()), &copy),
            "copying reference");
      return copy;
    }());
  }

  gbm3d_denoise_options opts = gbm3d_denoise_options_default();
  opts.stage = a.stage;
  opts.threads = a.threads;
  opts.patched = a.no_patches ? 0 : 1;
  gbm3d_image* basic = nullptr;
  gbm3d_image* final_estimate = nullptr;
  check(gbm3d_denoise(work, sigma, params.get(), &opts, &basic, &final_estimate), "denoising");
  ImagePtr basic_ptr(basic), final_ptr(final_estimate);

  check(gbm3d_image_write(final_ptr.get(), a.output.c_str()), "writing " + a.output);

  std::cout << "sigma: " << fmt("%.4f", sigma) << '\n';
  if (reference) {
    std::cout << "PSNR noisy: " << fmt("%.4f", psnr(reference.get(), work)) << " dB\n";
    std::cout << "PSNR stage 1: " << fmt("%.4f", psnr(reference.get(), basic_ptr.get())) << " dB\n";
    if (a.stage == 2) std::cout << "PSNR stage 2: " << fmt("%.4f", psnr(reference.get(), final_ptr.get())) << " dB\n";
  }
  return 0;
}

struct BenchArgs {
  std::string images, output, params;
  std::vector<double> snrs{1, 2, 4, 6, 8, 10};
  std::vector<int> stages{1, 2};
  std::uint64_t seed = 0;
  int threads = 0;
  bool no_timing = false;
};

std::vector<fs::path> corpus(const std::string& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".pgm" || ext == ".rawf64" || ext == ".f64" || ext == ".raw") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no images (.pgm, .rawf64) found in " + dir);
  return files;
}

int run_bench(const BenchArgs& a) {
  const std::vector<fs::path> files = corpus(a.images);
  ParamsPtr params = make_params(a.params);

  std::ofstream file;
  if (!a.output.empty()) {
    file.open(a.output);
    if (!file) throw std::runtime_error("cannot open " + a.output + " for writing");
  }
  std::ostream& out = a.output.empty() ? std::cout : file;
  out << "image,size,snr,sigma,stage,psnr_noisy,psnr_denoised,seconds,seed\n";

  std::vector<std::pair<int, int>> sizes;
  std::vector<ImagePtr> size_samples;
  for (const fs::path& path : files) {
    ImagePtr clean = load(path.string());
    const int w = gbm3d_image_width(clean.get()), h = gbm3d_image_height(clean.get());
    const std::string name = path.stem().string();
    const std::string size = std::to_string(w) + "x" + std::to_string(h);

    for (double snr : a.snrs) {
      double sigma = 0.0;
      check(gbm3d_sigma_for_snr(clean.get(), snr, &sigma), "sigma");
      gbm3d_image* n = nullptr;
      check(gbm3d_add_noise(clean.get(), sigma, a.seed, &n), "noise");
      ImagePtr noisy(n);
      const double p_noisy = psnr(clean.get(), noisy.get());

      const int top = *std::max_element(a.stages.begin(), a.stages.end());
      gbm3d_denoise_options opts = gbm3d_denoise_options_default();
      opts.stage = top;
      opts.threads = a.threads;
      const auto t0 = std::chrono::steady_clock::now();
      gbm3d_image* basic = nullptr;
      gbm3d_image* final_estimate = nullptr;
      check(gbm3d_denoise(noisy.get(), sigma, params.get(), &opts, &basic, &final_estimate), "denoise " + name);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      ImagePtr b(basic), f(final_estimate);

      for (int stage : a.stages) {
        const double p_out = psnr(clean.get(), stage == 1 ? b.get() : f.get());
        out << name << ',' << size << ',' << fmt("%g", snr) << ',' << fmt("%.6f", sigma) << ',' << stage << ','
            << fmt("%.4f", p_noisy) << ',' << fmt("%.4f", p_out) << ',' << (a.no_timing ? "" : fmt("%.3f", secs))
            << ',' << a.seed << '\n';
      }
    }

    if (std::find(sizes.begin(), sizes.end(), std::make_pair(w, h)) == sizes.end()) {
      sizes.emplace_back(w, h);
      size_samples.push_back(std::move(clean));
    }
  }

  if (!a.no_timing) {
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      double naive = 0.0, fast = 0.0;
      check(gbm3d_match_benchmark(size_samples[i].get(), params.get(), GBM3D_MATCH_NAIVE, &naive), "match bench");
      check(gbm3d_match_benchmark(size_samples[i].get(), params.get(), GBM3D_MATCH_FFT, &fast), "match bench");
      const std::string size = std::to_string(sizes[i].first) + "x" + std::to_string(sizes[i].second);
      out << "match_naive," << size << ",,,,,," << fmt("%.4f", naive) << ",\n";
      out << "match_fft," << size << ",,,,,," << fmt("%.4f", fast) << ",\n";
      out << "match_speedup," << size << ",,,,,," << fmt("%.3f", naive / fast) << ",\n";
    }
  }
  out.flush();
  if (!out) throw std::runtime_error("failed writing CSV");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gbm3d: two-stage block-matching wavelet denoiser"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gbm3d_version()));

  DenoiseArgs d;
  CLI::App* den = app.add_subcommand("denoise", "Denoise one image");
  den->add_option("--input", d.input, "Input image (PGM P5 or RAWF64)")->required();
  den->add_option("--output", d.output, "Output image (.pgm or .rawf64)")->required();
  auto* sig = den->add_option("--sigma", d.sigma, "Noise standard deviation")->check(CLI::NonNegativeNumber);
  auto* snr = den->add_option("--snr", d.snr, "Signal-to-noise ratio; sigma = mean(input) / snr")
                  ->check(CLI::PositiveNumber);
  sig->excludes(snr);
  snr->excludes(sig);
  den->add_flag("--add-noise", d.add_noise, "Treat the input as clean and add seeded Gaussian noise (needs --snr)");
  den->add_option("--stage", d.stage, "1 = wavelet stage only, 2 = add the Wiener stage")->check(CLI::Range(1, 2));
  den->add_option("--seed", d.seed, "Noise seed");
  den->add_option("--threads", d.threads, "Worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
  den->add_option("--params", d.params, "JSON file overriding denoiser parameters")->check(CLI::ExistingFile);
  den->add_option("--reference", d.reference, "Clean image for PSNR reporting")->check(CLI::ExistingFile);
  den->add_flag("--no-patches", d.no_patches, "Process the image as one patch");

  BenchArgs b;
  CLI::App* bench = app.add_subcommand("bench", "PSNR and timing table over an image directory");
  bench->add_option("--images", b.images, "Directory of test images")->required();
  bench->add_option("--output", b.output, "CSV path (default: stdout)");
  bench->add_option("--snr", b.snrs, "SNR values")->delimiter(',')->check(CLI::PositiveNumber);
  bench->add_option("--stages", b.stages, "Stages to report")->delimiter(',')->check(CLI::Range(1, 2));
  bench->add_option("--seed", b.seed, "Noise seed");
  bench->add_option("--threads", b.threads, "Worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
  bench->add_option("--params", b.params, "JSON file overriding denoiser parameters")->check(CLI::ExistingFile);
  bench->add_flag("--no-timing", b.no_timing, "Leave timing columns empty and skip the matching micro-benchmark");

  try {
    app.parse(argc, argv);
    if (den->parsed()) {
      if (!d.sigma && !d.snr) throw CLI::RequiredError("--sigma or --snr");
      return run_denoise(d);
    }
    return run_bench(b);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
