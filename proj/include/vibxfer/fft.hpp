#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "vibxfer/error.hpp"

namespace vibxfer {

// In-place iterative radix-2 complex FFT with precomputed twiddles and
// bit-reversal table. Tables are built once; transforms do not allocate.
class Fft {
public:
  explicit Fft (std::size_t size) : size_ {size}
  {
    if (size < 2 || (size & (size - 1)) != 0) {
      throw ParameterError ("fft size must be a power of two >= 2");
    }
    twiddle_.resize (size / 2);
    for (std::size_t k = 0; k < size / 2; ++k) {
      const double a = -2.0 * std::numbers::pi * static_cast<double> (k)
        / static_cast<double> (size);
      twiddle_[k] = {std::cos (a), std::sin (a)};
    }
    bitrev_.resize (size);
    std::size_t bits = 0;
    while ((std::size_t {1} << bits) < size) {
      ++bits;
    }
    for (std::size_t i = 0; i < size; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) {
        r |= ((i >> b) & 1u) << (bits - 1 - b);
      }
      bitrev_[i] = r;
    }
  }

  std::size_t size() const { return size_; }

  void forward (std::span<std::complex<double>> data) const { transform (data, false); }

  // Unscaled; divide by size() for the true inverse.
  void inverse (std::span<std::complex<double>> data) const { transform (data, true); }

private:
  void transform (std::span<std::complex<double>> x, bool inverse) const
  {
    for (std::size_t i = 0; i < size_; ++i) {
      if (i < bitrev_[i]) {
        std::swap (x[i], x[bitrev_[i]]);
      }
    }
    for (std::size_t len = 2; len <= size_; len <<= 1) {
      const std::size_t half   = len / 2;
      const std::size_t stride = size_ / len;
      for (std::size_t start = 0; start < size_; start += len) {
        for (std::size_t j = 0; j < half; ++j) {
          auto w = twiddle_[j * stride];
          if (inverse) {
            w = std::conj (w);
          }
          const auto u = x[start + j];
          const auto v = x[start + j + half] * w;
          x[start + j]        = u + v;
          x[start + j + half] = u - v;
        }
      }
    }
  }

  std::size_t                       size_;
  std::vector<std::complex<double>> twiddle_;
  std::vector<std::size_t>          bitrev_;
};

} // namespace vibxfer
