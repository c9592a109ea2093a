#pragma once

#include "vmma/kernels.hpp"
#include "vmma/matrix.hpp"

namespace vmma {

// Linear convolution of a (2p+1)^2 kernel with an (N+2p) x (M+2p) signal,
// returning the N x M block that needs no padding:
//   out(i, j) = sum_{a,b} K(a, b) * signal(i + 2p - a, j + 2p - b).
// Computed with zero-padded real FFTs of size (N+4p) x (M+4p).
Matrix convolve_fft(const KernelMatrix& k, const Matrix& signal);

// Same result by explicit summation.
Matrix convolve_direct(const KernelMatrix& k, const Matrix& signal);

}  // namespace vmma
