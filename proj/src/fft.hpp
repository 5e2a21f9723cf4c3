#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cryfl::detail {

// Real-to-complex DFT of `x` zero-padded to n points; returns n/2 + 1 bins.
std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t n);

// Inverse of rfft for an n-point signal (scaled by 1/n).
std::vector<double> irfft(std::span<const std::complex<double>> bins, std::size_t n);

std::size_t next_pow2(std::size_t n);

}  // namespace cryfl::detail
