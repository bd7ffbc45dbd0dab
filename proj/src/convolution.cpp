#include "convolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>

#include "wustat/simd.hpp"

namespace wustat::detail {

namespace {

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
using RealBuf = std::unique_ptr<double[], FftwFree>;
using ComplexBuf = std::unique_ptr<fftw_complex[], FftwFree>;

RealBuf real_buf(std::size_t n) {
  return RealBuf(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
}
ComplexBuf complex_buf(std::size_t n) {
  return ComplexBuf(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

struct Plans {
  fftw_plan forward;
  fftw_plan backward;
};

// The FFTW planner is not thread-safe; plan execution on fresh arrays is.
std::mutex g_plan_mutex;

const Plans& plans_for(std::size_t n) {
  static std::map<std::size_t, Plans> cache;
  std::lock_guard lock(g_plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  RealBuf r = real_buf(n);
  ComplexBuf c = complex_buf(n / 2 + 1);
  const int len = static_cast<int>(n);
  Plans p{fftw_plan_dft_r2c_1d(len, r.get(), c.get(), FFTW_ESTIMATE),
          fftw_plan_dft_c2r_1d(len, c.get(), r.get(), FFTW_ESTIMATE)};
  return cache.emplace(n, p).first->second;
}

std::size_t fft_size(std::size_t min_len) {
  std::size_t n = 1;
  while (n < min_len) n <<= 1;
  return n;
}

bool prefer_direct(std::size_t terms, std::size_t outputs, std::size_t fft_len) {
  const double direct = static_cast<double>(terms) * static_cast<double>(outputs);
  const double fft = 40.0 * static_cast<double>(fft_len) * std::log2(static_cast<double>(fft_len));
  return direct <= fft || terms <= 64;
}

// Spectrum of the most recent coefficient vector, per thread. Experiments
// reuse one spec across many paths, so this saves one transform per path.
struct SpectrumCache {
  std::vector<double> coeffs;
  std::size_t n = 0;
  ComplexBuf spectrum;
};

const fftw_complex* coefficient_spectrum(std::span<const double> a, std::size_t n) {
  thread_local SpectrumCache cache;
  if (cache.spectrum && cache.n == n && cache.coeffs.size() == a.size() &&
      std::memcmp(cache.coeffs.data(), a.data(), a.size() * sizeof(double)) == 0) {
    return cache.spectrum.get();
  }
  const Plans& p = plans_for(n);
  RealBuf in = real_buf(n);
  std::fill(in.get(), in.get() + n, 0.0);
  std::copy(a.begin(), a.end(), in.get());
  cache.spectrum = complex_buf(n / 2 + 1);
  fftw_execute_dft_r2c(p.forward, in.get(), cache.spectrum.get());
  cache.coeffs.assign(a.begin(), a.end());
  cache.n = n;
  return cache.spectrum.get();
}

}  // namespace

std::vector<double> convolve_valid(std::span<const double> a, std::span<const double> e,
                                   std::size_t n) {
  const std::size_t m = a.size() - 1;
  std::vector<double> out(n);
  const std::size_t len = fft_size(n + m);
  if (prefer_direct(m + 1, n, len)) {
    std::vector<double> rev(a.rbegin(), a.rend());
    const auto& ops = simd::active();
    for (std::size_t t = 0; t < n; ++t) out[t] = ops.dot(rev.data(), e.data() + t, m + 1);
    return out;
  }
  const Plans& p = plans_for(len);
  const fftw_complex* spec_a = coefficient_spectrum(a, len);
  RealBuf in = real_buf(len);
  std::fill(in.get(), in.get() + len, 0.0);
  std::copy(e.begin(), e.end(), in.get());
  ComplexBuf spec = complex_buf(len / 2 + 1);
  fftw_execute_dft_r2c(p.forward, in.get(), spec.get());
  for (std::size_t k = 0; k < len / 2 + 1; ++k) {
    const double re = spec[k][0] * spec_a[k][0] - spec[k][1] * spec_a[k][1];
    const double im = spec[k][0] * spec_a[k][1] + spec[k][1] * spec_a[k][0];
    spec[k][0] = re;
    spec[k][1] = im;
  }
  fftw_execute_dft_c2r(p.backward, spec.get(), in.get());
  const double scale = 1.0 / static_cast<double>(len);
  for (std::size_t t = 0; t < n; ++t) out[t] = in[t + m] * scale;
  return out;
}

std::vector<double> autocorrelate(std::span<const double> a, std::size_t max_lag) {
  const std::size_t m = a.size();
  std::vector<double> out(max_lag + 1, 0.0);
  const std::size_t lags = std::min(max_lag + 1, m);
  const std::size_t len = fft_size(m + lags);
  if (prefer_direct(m, lags, len)) {
    const auto& ops = simd::active();
    for (std::size_t h = 0; h < lags; ++h) out[h] = ops.dot(a.data(), a.data() + h, m - h);
    return out;
  }
  const Plans& p = plans_for(len);
  RealBuf in = real_buf(len);
  std::fill(in.get(), in.get() + len, 0.0);
  std::copy(a.begin(), a.end(), in.get());
  ComplexBuf spec = complex_buf(len / 2 + 1);
  fftw_execute_dft_r2c(p.forward, in.get(), spec.get());
  for (std::size_t k = 0; k < len / 2 + 1; ++k) {
    spec[k][0] = spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
    spec[k][1] = 0.0;
  }
  fftw_execute_dft_c2r(p.backward, spec.get(), in.get());
  const double scale = 1.0 / static_cast<double>(len);
  for (std::size_t h = 0; h < lags; ++h) out[h] = in[h] * scale;
  return out;
}

}  // namespace wustat::detail
