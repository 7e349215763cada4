// SPDX-License-Identifier: Apache-2.0
#include "lorasim/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace lorasim {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t integer_log2(std::size_t n) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

}  // namespace

FftPlan::FftPlan(std::size_t size) : size_(size), log2_size_(integer_log2(size)) {
  if (!is_power_of_two(size)) {
    throw std::invalid_argument("FftPlan: size must be a power of two");
  }
  twiddles_.resize(size_ / 2);
  for (std::size_t k = 0; k < size_ / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(size_);
    twiddles_[k] = {std::cos(angle), std::sin(angle)};
  }
  bit_reversal_.resize(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    std::size_t rev = 0;
    for (std::size_t b = 0; b < log2_size_; ++b) {
      rev = (rev << 1) | ((i >> b) & 1u);
    }
    bit_reversal_[i] = static_cast<std::uint32_t>(rev);
  }
}

void FftPlan::transform(std::complex<double>* data) const {
  for (std::size_t i = 0; i < size_; ++i) {
    const std::size_t j = bit_reversal_[i];
    if (i < j) std::swap(data[i], data[j]);
  }
  // Butterflies in explicit real arithmetic; the operands are always finite,
  // so the C99 complex-multiply NaN recovery would only cost time here.
  auto* d = reinterpret_cast<double*>(data);
  for (std::size_t len = 2; len <= size_; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t stride = size_ / len;  // twiddle index step
    for (std::size_t block = 0; block < size_; block += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const std::complex<double> w = twiddles_[k * stride];
        const std::size_t ia = 2 * (block + k);
        const std::size_t ib = 2 * (block + k + half);
        const double br = d[ib];
        const double bi = d[ib + 1];
        const double tr = w.real() * br - w.imag() * bi;
        const double ti = w.real() * bi + w.imag() * br;
        d[ib] = d[ia] - tr;
        d[ib + 1] = d[ia + 1] - ti;
        d[ia] += tr;
        d[ia + 1] += ti;
      }
    }
  }
}

void FftPlan::transform(std::vector<std::complex<double>>& data) const {
  if (data.size() != size_) {
    throw std::invalid_argument("FftPlan: buffer length does not match plan size");
  }
  transform(data.data());
}

}  // namespace lorasim
