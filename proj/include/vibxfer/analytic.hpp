#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <concepts>
#include <numbers>

namespace vibxfer {

struct AnalyticSample {
  double re = 0.0;
  double im = 0.0;
};

inline double instantaneous_amplitude (const AnalyticSample& s)
{
  return std::hypot (s.re, s.im);
}

// Phase advance between consecutive analytic samples, in Hz. When both
// samples are below `floor` in magnitude the phase is meaningless and `held`
// is returned instead.
inline double instantaneous_frequency (
  const AnalyticSample& prev,
  const AnalyticSample& cur,
  double                fs,
  double                held  = 0.0,
  double                floor = 1e-6)
{
  if (instantaneous_amplitude (prev) < floor && instantaneous_amplitude (cur) < floor) {
    return held;
  }
  // cur * conj(prev)
  const double x = cur.re * prev.re + cur.im * prev.im;
  const double y = cur.im * prev.re - cur.re * prev.im;
  return fs / (2.0 * std::numbers::pi) * std::atan2 (y, x);
}

//------------------------------------------------------------------------------
// y(n) = c (x(n) + y(n-2)) - x(n-2): allpass in z^-2, pole radius sqrt(c).
template <std::floating_point T>
struct AllpassZ2 {
  T c {};
  T x1 {}, x2 {}, y1 {}, y2 {};

  T process (T x)
  {
    const T y = c * (x + y2) - x2;
    x2 = x1;
    x1 = x;
    y2 = y1;
    y1 = y;
    return y;
  }

  void reset() { x1 = x2 = y1 = y2 = T {}; }
};

//------------------------------------------------------------------------------
// Polyphase IIR Hilbert pair (Niemitalo's half-band allpass design, four
// sections per path). The quadrature path carries a one-sample delay; its
// output lags the in-phase path by 90 deg +/- 0.71 deg from 40 Hz to 0.4 fs at
// 44.1 kHz, so re + j im has positive-frequency content only.
template <std::floating_point T>
class HilbertEstimator {
public:
  // Published coefficients a; sections use a^2.
  static constexpr std::array<double, 4> in_phase_a {
    0.4021921162426, 0.8561710882420, 0.9722909545651, 0.9952884791278};
  static constexpr std::array<double, 4> quadrature_a {
    0.6923878, 0.9360654322959, 0.9882295226860, 0.9987488452737};

  HilbertEstimator()
  {
    for (std::size_t i = 0; i < 4; ++i) {
      in_phase_[i].c   = static_cast<T> (in_phase_a[i] * in_phase_a[i]);
      quadrature_[i].c = static_cast<T> (quadrature_a[i] * quadrature_a[i]);
    }
  }

  AnalyticSample process (T x)
  {
    T re = x;
    for (auto& s : in_phase_) {
      re = s.process (re);
    }
    T q = x;
    for (auto& s : quadrature_) {
      q = s.process (q);
    }
    const T im = latch_;
    latch_     = q;
    return {static_cast<double> (re), static_cast<double> (im)};
  }

  void reset()
  {
    for (auto& s : in_phase_) {
      s.reset();
    }
    for (auto& s : quadrature_) {
      s.reset();
    }
    latch_ = T {};
  }

  // Path responses at normalized angular frequency omega (rad/sample).
  static std::complex<double> in_phase_response (double omega)
  {
    return path_response (in_phase_a, omega);
  }
  static std::complex<double> quadrature_response (double omega)
  {
    return path_response (quadrature_a, omega) * std::polar (1.0, -omega);
  }

private:
  static std::complex<double> path_response (const std::array<double, 4>& a, double omega)
  {
    const std::complex<double> z2 = std::polar (1.0, -2.0 * omega);
    std::complex<double>       h {1.0, 0.0};
    for (double v : a) {
      const double c = v * v;
      h *= (c - z2) / (1.0 - c * z2);
    }
    return h;
  }

  std::array<AllpassZ2<T>, 4> in_phase_ {};
  std::array<AllpassZ2<T>, 4> quadrature_ {};
  T                           latch_ {};
};

} // namespace vibxfer
