#ifndef SKYLISTEN_FEATURES_FFT_H_
#define SKYLISTEN_FEATURES_FFT_H_

#include <complex>
#include <span>
#include <vector>

namespace skylisten::features {

// In-place iterative radix-2 transform; size must be a power of two.
// Forward uses exp(-2*pi*i*k*n/N), no scaling.
void Fft(std::span<std::complex<double>> data);

bool IsPowerOfTwo(std::size_t n);

}  // namespace skylisten::features

#endif  // SKYLISTEN_FEATURES_FFT_H_
