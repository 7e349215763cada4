// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace lorasim {

// Radix-2 decimation-in-time FFT for power-of-two sizes. The twiddle and
// bit-reversal tables are computed once at construction; transform() is
// const and safe to call from many threads on separate buffers.
//
// Forward convention: X[k] = sum_n x[n] exp(-j 2 pi n k / N), no scaling.
class FftPlan {
 public:
  explicit FftPlan(std::size_t size);

  std::size_t size() const { return size_; }

  // In-place forward transform. `data` must hold exactly size() elements.
  void transform(std::complex<double>* data) const;
  void transform(std::vector<std::complex<double>>& data) const;

 private:
  std::size_t size_;
  std::size_t log2_size_;
  std::vector<std::complex<double>> twiddles_;  // exp(-j 2 pi k / N), k < N/2
  std::vector<std::uint32_t> bit_reversal_;
};

}  // namespace lorasim
