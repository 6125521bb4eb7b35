#include "gbm3d/gbm3d.h"

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>
#include <memory>

#include "gbm3d/blockmatch.hpp"
#include "gbm3d/image_io.hpp"
#include "gbm3d/metrics.hpp"
#include "gbm3d/parallel.hpp"
#include "gbm3d/pipeline.hpp"

struct gbm3d_image {
  gbm3d::Image img;
};

struct gbm3d_params {
  gbm3d::DenoiseParams p;
};

namespace {

thread_local std::string g_last_error;

gbm3d_status to_status(gbm3d::ErrorCode code) {
  switch (code) {
    case gbm3d::ErrorCode::InvalidInput: return GBM3D_ERR_INVALID_ARGUMENT;
    case gbm3d::ErrorCode::Io: return GBM3D_ERR_IO;
    case gbm3d::ErrorCode::Format: return GBM3D_ERR_FORMAT;
    case gbm3d::ErrorCode::Internal: return GBM3D_ERR_INTERNAL;
  }
  return GBM3D_ERR_INTERNAL;
}

template <class F>
gbm3d_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return GBM3D_OK;
  } catch (const gbm3d::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("params: ") + e.what();
    return GBM3D_ERR_FORMAT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return GBM3D_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GBM3D_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return GBM3D_ERR_INTERNAL;
  }
}

void need(const void* ptr, const char* name) {
  if (!ptr) gbm3d::fail(gbm3d::ErrorCode::InvalidInput, std::string(name) + " is NULL");
}

int as_int(const char* key, double v) {
  if (!std::isfinite(v) || v != std::floor(v) || std::fabs(v) > 1e9)
    gbm3d::fail(gbm3d::ErrorCode::InvalidInput, std::string("parameter '") + key + "' must be an integer");
  return static_cast<int>(v);
}

void set_param(gbm3d::DenoiseParams& p, const std::string& key, double v) {
  if (key == "n1") p.n1 = as_int("n1", v);
  else if (key == "n2") p.n2 = as_int("n2", v);
  else if (key == "k") p.k = as_int("k", v);
  else if (key == "window") p.window = as_int("window", v);
  else if (key == "levels") p.levels = as_int("levels", v);
  else if (key == "spins") p.spins = as_int("spins", v);
  else if (key == "trials") p.trials = as_int("trials", v);
  else if (key == "eps_tv") p.eps_tv = v;
  else if (key == "tau_match") p.tau_match = v;
  else gbm3d::fail(gbm3d::ErrorCode::InvalidInput, "unknown parameter '" + key + "'");
}

double get_param(const gbm3d::DenoiseParams& p, const std::string& key) {
  if (key == "n1") return p.n1;
  if (key == "n2") return p.n2;
  if (key == "k") return p.k;
  if (key == "window") return p.window;
  if (key == "levels") return p.levels;
  if (key == "spins") return p.spins;
  if (key == "trials") return p.trials;
  if (key == "eps_tv") return p.eps_tv;
  if (key == "tau_match") return p.tau_match.value_or(NAN);
  gbm3d::fail(gbm3d::ErrorCode::InvalidInput, "unknown parameter '" + key + "'");
}

void apply_json(gbm3d::DenoiseParams& p, const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object()) gbm3d::fail(gbm3d::ErrorCode::Format, "params: top-level JSON value must be an object");
  gbm3d::DenoiseParams next = p;
  for (const auto& [key, value] : j.items()) {
    if (key == "tau_match" && value.is_null()) {
      next.tau_match.reset();
      continue;
    }
    if (!value.is_number()) gbm3d::fail(gbm3d::ErrorCode::Format, "params: '" + key + "' must be a number");
    set_param(next, key, value.get<double>());
  }
  next.validate();
  p = next;
}

gbm3d_image* wrap(gbm3d::Image img) { return new gbm3d_image{std::move(img)}; }

}  // namespace

extern "C" {

const char* gbm3d_last_error(void) { return g_last_error.c_str(); }

const char* gbm3d_version(void) { return "1.0.0"; }

const char* gbm3d_status_string(gbm3d_status status) {
  switch (status) {
    case GBM3D_OK: return "ok";
    case GBM3D_ERR_INVALID_ARGUMENT: return "invalid argument";
    case GBM3D_ERR_IO: return "i/o error";
    case GBM3D_ERR_FORMAT: return "format error";
    case GBM3D_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

gbm3d_status gbm3d_image_create(int width, int height, const double* values, gbm3d_image** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    gbm3d::require(width > 0 && height > 0, "image dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(width) * height;
    std::vector<double> data = values ? std::vector<double>(values, values + n) : std::vector<double>(n, 0.0);
    *out = wrap(gbm3d::Image(width, height, std::move(data)));
  });
}

void gbm3d_image_destroy(gbm3d_image* img) { delete img; }

int gbm3d_image_width(const gbm3d_image* img) { return img ? img->img.width : 0; }

int gbm3d_image_height(const gbm3d_image* img) { return img ? img->img.height : 0; }

double gbm3d_image_peak(const gbm3d_image* img) { return img ? img->img.peak : 0.0; }

const double* gbm3d_image_data(const gbm3d_image* img) { return img ? img->img.data.data() : nullptr; }

gbm3d_status gbm3d_image_copy_data(const gbm3d_image* img, double* dst, size_t count) {
  return guarded([&] {
    need(img, "img");
    need(dst, "dst");
    gbm3d::require(count == img->img.size(), "copy_data: count does not match width*height");
    std::memcpy(dst, img->img.data.data(), count * sizeof(double));
  });
}

gbm3d_status gbm3d_image_read(const char* path, gbm3d_image** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = wrap(gbm3d::read_image(path));
  });
}

gbm3d_status gbm3d_image_write_pgm(const gbm3d_image* img, const char* path) {
  return guarded([&] {
    need(img, "img");
    need(path, "path");
    gbm3d::write_image(path, img->img, gbm3d::ImageFormat::Pgm);
  });
}

gbm3d_status gbm3d_image_write_rawf64(const gbm3d_image* img, const char* path) {
  return guarded([&] {
    need(img, "img");
    need(path, "path");
    gbm3d::write_image(path, img->img, gbm3d::ImageFormat::RawF64);
  });
}

gbm3d_status gbm3d_image_write(const gbm3d_image* img, const char* path) {
  return guarded([&] {
    need(img, "img");
    need(path, "path");
    gbm3d::write_image(path, img->img, gbm3d::format_from_extension(path));
  });
}

gbm3d_status gbm3d_params_create(gbm3d_params** out) {
  return guarded([&] {
    need(out, "out");
    *out = new gbm3d_params{};
  });
}

void gbm3d_params_destroy(gbm3d_params* params) { delete params; }

gbm3d_status gbm3d_params_set(gbm3d_params* params, const char* key, double value) {
  return guarded([&] {
    need(params, "params");
    need(key, "key");
    gbm3d::DenoiseParams next = params->p;
    set_param(next, key, value);
    next.validate();
    params->p = next;
  });
}

gbm3d_status gbm3d_params_get(const gbm3d_params* params, const char* key, double* value) {
  return guarded([&] {
    need(params, "params");
    need(key, "key");
    need(value, "value");
    *value = get_param(params->p, key);
  });
}

gbm3d_status gbm3d_params_load_json(gbm3d_params* params, const char* path) {
  return guarded([&] {
    need(params, "params");
    need(path, "path");
    std::ifstream in(path);
    if (!in) gbm3d::fail(gbm3d::ErrorCode::Io, std::string("cannot open '") + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    apply_json(params->p, ss.str());
  });
}

gbm3d_status gbm3d_params_parse_json(gbm3d_params* params, const char* text) {
  return guarded([&] {
    need(params, "params");
    need(text, "text");
    apply_json(params->p, text);
  });
}

gbm3d_status gbm3d_sigma_for_snr(const gbm3d_image* img, double snr, double* sigma) {
  return guarded([&] {
    need(img, "img");
    need(sigma, "sigma");
    *sigma = gbm3d::sigma_for_snr(img->img, snr);
  });
}

gbm3d_status gbm3d_add_noise(const gbm3d_image* img, double sigma, uint64_t seed, gbm3d_image** out) {
  return guarded([&] {
    need(img, "img");
    need(out, "out");
    *out = nullptr;
    *out = wrap(gbm3d::add_gaussian_noise(img->img, sigma, seed));
  });
}

gbm3d_status gbm3d_psnr(const gbm3d_image* reference, const gbm3d_image* test, double* db) {
  return guarded([&] {
    need(reference, "reference");
    need(test, "test");
    need(db, "db");
    *db = gbm3d::psnr(reference->img, test->img);
  });
}

gbm3d_denoise_options gbm3d_denoise_options_default(void) { return gbm3d_denoise_options{2, 1, 1}; }

gbm3d_status gbm3d_denoise(const gbm3d_image* noisy, double sigma, const gbm3d_params* params,
                           const gbm3d_denoise_options* options, gbm3d_image** basic, gbm3d_image** final_estimate) {
  return guarded([&] {
    need(noisy, "noisy");
    need(final_estimate, "final_estimate");
    *final_estimate = nullptr;
    if (basic) *basic = nullptr;
    const gbm3d_denoise_options opts = options ? *options : gbm3d_denoise_options_default();
    gbm3d::PipelineOptions po;
    po.workers = opts.threads > 0 ? opts.threads : gbm3d::default_workers();
    po.patched = opts.patched != 0;
    const gbm3d::DenoiseParams p = params ? params->p : gbm3d::DenoiseParams{};
    gbm3d::DenoiseStages r = gbm3d::denoise_stages(noisy->img, sigma, opts.stage, p, po);
    std::unique_ptr<gbm3d_image> b(basic ? wrap(std::move(r.basic)) : nullptr);
    *final_estimate = wrap(std::move(r.final));
    if (basic) *basic = b.release();
  });
}

gbm3d_status gbm3d_match_benchmark(const gbm3d_image* img, const gbm3d_params* params, gbm3d_match_method method,
                                   double* seconds) {
  return guarded([&] {
    need(img, "img");
    need(seconds, "seconds");
    gbm3d::require(method == GBM3D_MATCH_FFT || method == GBM3D_MATCH_NAIVE, "unknown match method");
    const gbm3d::DenoiseParams p = params ? params->p : gbm3d::DenoiseParams{};
    const gbm3d::Image padded = gbm3d::pad_image(img->img, p.n1, p.levels);
    const auto t0 = std::chrono::steady_clock::now();
    const gbm3d::MatchTable table = gbm3d::build_match_table(
        padded, p, p.n1, method == GBM3D_MATCH_FFT ? gbm3d::MatchMethod::Fft : gbm3d::MatchMethod::Naive, 1);
    *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    gbm3d::require(!table.entries.empty(), "match benchmark produced no entries");
  });
}

}  // extern "C"
