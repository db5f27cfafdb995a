#pragma once

#include <complex>
#include <vector>

namespace imlab {

// c2c DFT over a d-dimensional n^d row-major array.
// backward: out[m] = sum_j in[j] e^{+2pi i j.m/n}   (unnormalized synthesis)
// forward:  out[j] = (1/n^d) sum_m in[m] e^{-2pi i j.m/n}
void dft_backward(int d, int n, const std::vector<std::complex<double>>& in,
                  std::vector<std::complex<double>>& out);
void dft_forward(int d, int n, const std::vector<std::complex<double>>& in,
                 std::vector<std::complex<double>>& out);

}  // namespace imlab
