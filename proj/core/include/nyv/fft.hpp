#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace nyv::fft {

// Thin wrapper over FFTW3 double-precision c2c transforms.  Plans are cached
// per size in a mutex-protected table; execution uses fftw_execute_dft on
// caller-owned buffers, so concurrent transforms from different threads are
// safe.  Plans use FFTW_ESTIMATE, which keeps results reproducible run to run.

// out[k] = sum_j in[j] e^{-2 pi i jk/n}  (unnormalized forward DFT)
void forward(const std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out);

// out[j] = sum_k in[k] e^{+2 pi i jk/n}  (unnormalized inverse DFT)
void inverse(const std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out);

}  // namespace nyv::fft
