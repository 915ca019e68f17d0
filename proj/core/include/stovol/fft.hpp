#ifndef STOVOL_FFT_HPP
#define STOVOL_FFT_HPP

#include <complex>
#include <vector>

namespace stovol::fft {

/// In-place iterative radix-2 transform; size must be a power of two.
void transform(std::vector<std::complex<double>>& a, bool inverse);

std::size_t next_pow2(std::size_t n);

/// Linear convolution c[j] = sum_{i} a[i] b[j-i], truncated to n_out terms.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b, std::size_t n_out);

} // namespace stovol::fft

#endif
