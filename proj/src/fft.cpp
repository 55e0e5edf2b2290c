#include "bbq/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>

namespace bbq {

namespace {
// fftw_plan_* is not thread safe; fftw_execute on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft::Fft(int n) : n_(n) {
  const std::size_t count = std::size_t(n) * n;
  buf_ = static_cast<Complex*>(fftw_malloc(sizeof(fftw_complex) * count));
  auto* raw = reinterpret_cast<fftw_complex*>(buf_);
  std::lock_guard<std::mutex> lock(planner_mutex());
  // FFTW_ESTIMATE keeps plan selection deterministic run to run.
  plan_fwd_ = fftw_plan_dft_2d(n, n, raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft_2d(n, n, raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  fftw_free(buf_);
}

void Fft::forward(std::span<const Complex> in, std::span<Complex> out) {
  const std::size_t count = std::size_t(n_) * n_;
  std::memcpy(buf_, in.data(), count * sizeof(Complex));
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  const double norm = 1.0 / double(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = buf_[i] * norm;
}

void Fft::backward(std::span<const Complex> in, std::span<Complex> out) {
  const std::size_t count = std::size_t(n_) * n_;
  std::memcpy(buf_, in.data(), count * sizeof(Complex));
  fftw_execute(static_cast<fftw_plan>(plan_bwd_));
  std::memcpy(out.data(), buf_, count * sizeof(Complex));
}

Fft& Fft::thread_local_for(int n) {
  thread_local std::map<int, std::unique_ptr<Fft>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<Fft>(n)).first;
  return *it->second;
}

}  // namespace bbq
