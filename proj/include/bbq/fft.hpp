#pragma once

#include <complex>
#include <span>

#include "bbq/field.hpp"

namespace bbq {

// Cached 2D complex-to-complex FFT plans for one grid size. Instances are
// not thread safe; use thread_local_for() to get a per-thread instance.
// Forward applies the 1/n² normalization; backward applies none, so the two
// compose to the identity.
class Fft {
 public:
  explicit Fft(int n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  void forward(std::span<const Complex> in, std::span<Complex> out);
  void backward(std::span<const Complex> in, std::span<Complex> out);

  int n() const { return n_; }

  static Fft& thread_local_for(int n);

 private:
  int n_;
  void* plan_fwd_;
  void* plan_bwd_;
  Complex* buf_;
};

}  // namespace bbq
