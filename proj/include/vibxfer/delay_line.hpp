#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "vibxfer/error.hpp"

namespace vibxfer {

enum class Interpolation : std::uint8_t {
  cubic,     // 4-point Catmull-Rom
  lagrange8, // 8-point Lagrange; falls back to cubic within 3 samples of the floor
};

//------------------------------------------------------------------------------
// Ring buffer read at a real-valued delay. Delay d addresses the sample
// written d writes before the most recent one (delay 0 would be the newest).
// Reads are clamped to [1, capacity - 1] so every kernel has at least one
// newer neighbour; taps past the oldest stored sample replicate it.
//
// The 8-point kernel keeps the interpolation error below -60 dB up to fs/8;
// Catmull-Rom reaches only about -41 dB there.
template <std::floating_point T>
class DelayLine {
public:
  static constexpr std::size_t default_capacity = 4096;

  explicit DelayLine (std::size_t capacity = default_capacity, Interpolation interp = Interpolation::lagrange8)
    : buf_ (capacity, T {}), mask_ {capacity - 1}, interp_ {interp}
  {
    if (capacity < 8 || (capacity & (capacity - 1)) != 0) {
      throw ParameterError ("delay line capacity must be a power of two >= 8");
    }
    last_valid_delay_ = min_delay();
  }

  std::size_t   capacity() const { return buf_.size(); }
  double        min_delay() const { return 1.0; }
  double        max_delay() const { return static_cast<double> (buf_.size() - 1); }
  Interpolation interpolation() const { return interp_; }

  // Slot that the next write() fills.
  std::size_t write_index() const { return write_idx_; }

  // Reads that hit a non-finite delay and reused the previous one.
  std::uint64_t non_finite_delays() const { return non_finite_delays_; }
  // Reads whose delay was outside [min_delay, max_delay].
  std::uint64_t clamped_delays() const { return clamped_delays_; }

  void write (T x)
  {
    newest_          = write_idx_;
    buf_[write_idx_] = x;
    write_idx_       = (write_idx_ + 1) & mask_;
  }

  T at (std::size_t ago) const
  {
    ago = std::min (ago, buf_.size() - 1);
    return buf_[(newest_ - ago) & mask_];
  }

  T read_fractional (double delay)
  {
    if (!std::isfinite (delay)) {
      ++non_finite_delays_;
      delay = last_valid_delay_;
    }
    if (delay < min_delay() || delay > max_delay()) {
      ++clamped_delays_;
      delay = std::clamp (delay, min_delay(), max_delay());
    }
    last_valid_delay_ = delay;

    const double      whole = std::floor (delay);
    const T           frac  = static_cast<T> (delay - whole);
    const std::size_t d     = static_cast<std::size_t> (whole);
    if (frac == T {}) {
      return at (d);
    }
    if (interp_ == Interpolation::lagrange8 && d >= 3) {
      const auto w = lagrange8_weights (frac);
      T          y {};
      for (std::size_t k = 0; k < 8; ++k) {
        y += w[k] * at (d + k - 3);
      }
      return y;
    }
    // Taps ordered newest to oldest: y0 sits one sample newer than y1.
    return catmull_rom (at (d - 1), at (d), at (d + 1), at (d + 2), frac);
  }

  void reset()
  {
    std::fill (buf_.begin(), buf_.end(), T {});
    write_idx_        = 0;
    newest_           = mask_;
    last_valid_delay_ = min_delay();
  }

  // p(t) through p1 (t=0) and p2 (t=1), tangents from p0 and p3.
  static T catmull_rom (T p0, T p1, T p2, T p3, T t)
  {
    const T c0 = p1;
    const T c1 = T (0.5) * (p2 - p0);
    const T c2 = p0 - T (2.5) * p1 + T (2) * p2 - T (0.5) * p3;
    const T c3 = T (0.5) * (p3 - p0) + T (1.5) * (p1 - p2);
    return ((c3 * t + c2) * t + c1) * t + c0;
  }

  // Basis for nodes at offsets -3..4 evaluated at t in [0, 1).
  static std::array<T, 8> lagrange8_weights (T t)
  {
    // prod_{j != k} (k - j) for nodes k = -3..4
    static constexpr std::array<double, 8> denom {-5040.0, 720.0, -240.0, 144.0, -144.0, 240.0, -720.0, 5040.0};
    std::array<T, 8> diff {};
    for (std::size_t k = 0; k < 8; ++k) {
      diff[k] = t - static_cast<T> (static_cast<int> (k) - 3);
    }
    std::array<T, 8> prefix {}, suffix {};
    prefix[0] = T (1);
    for (std::size_t k = 1; k < 8; ++k) {
      prefix[k] = prefix[k - 1] * diff[k - 1];
    }
    suffix[7] = T (1);
    for (std::size_t k = 7; k-- > 0;) {
      suffix[k] = suffix[k + 1] * diff[k + 1];
    }
    std::array<T, 8> w {};
    for (std::size_t k = 0; k < 8; ++k) {
      w[k] = prefix[k] * suffix[k] / static_cast<T> (denom[k]);
    }
    return w;
  }

private:
  std::vector<T> buf_;
  std::size_t    mask_;
  Interpolation  interp_;
  std::size_t    write_idx_ = 0;
  std::size_t    newest_    = mask_;
  double         last_valid_delay_ {};
  std::uint64_t  non_finite_delays_ = 0;
  std::uint64_t  clamped_delays_    = 0;
};

} // namespace vibxfer
