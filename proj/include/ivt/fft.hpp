#ifndef IVT_FFT_HPP
#define IVT_FFT_HPP

#include <span>

#include "ivt/specfun.hpp"

namespace ivt {

// In-place radix-2 Cooley-Tukey, X_k = sum_i x_i e^{-2 pi i k i / n}.
// n must be a power of two.
void fft(std::span<Complex> data);

}  // namespace ivt

#endif
