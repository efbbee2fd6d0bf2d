#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>

#include "vibxfer/error.hpp"

namespace vibxfer {

//------------------------------------------------------------------------------
// Second-order section, a0 normalized to 1:
//   H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)
struct BiquadCoeffs {
  double b0 = 1.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;

  static constexpr BiquadCoeffs identity() { return {}; }

  // Triangle test on the denominator.
  bool is_stable() const
  {
    return std::abs (a2) < 1.0 && std::abs (a1) < 1.0 + a2;
  }

  std::complex<double> response (double omega) const
  {
    const std::complex<double> z1 = std::polar (1.0, -omega);
    const std::complex<double> z2 = z1 * z1;
    return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
  }
};

//------------------------------------------------------------------------------
// Transposed direct form II state.
template <std::floating_point T>
struct BiquadState {
  T s1 {};
  T s2 {};

  void reset()
  {
    s1 = T {};
    s2 = T {};
  }
};

template <std::floating_point T>
inline T process_sample (BiquadState<T>& st, const BiquadCoeffs& c, T x)
{
  const T y = static_cast<T> (c.b0) * x + st.s1;
  st.s1     = static_cast<T> (c.b1) * x - static_cast<T> (c.a1) * y + st.s2;
  st.s2     = static_cast<T> (c.b2) * x - static_cast<T> (c.a2) * y;
  return y;
}

template <std::floating_point T>
inline void reset (BiquadState<T>& st)
{
  st.reset();
}

//------------------------------------------------------------------------------
struct BandpassSpec {
  double f_lo  = 0.0;
  double f_hi  = 0.0;
  int    order = 4;
  double fs    = 0.0;

  void validate() const
  {
    if (!(fs > 0.0) || !std::isfinite (fs)) {
      throw ParameterError ("bandpass: sample rate must be positive");
    }
    if (!(f_lo > 0.0 && f_lo < f_hi && f_hi < 0.5 * fs)) {
      throw ParameterError (
        "bandpass: need 0 < f_lo < f_hi < fs/2 (got f_lo=" + std::to_string (f_lo)
        + ", f_hi=" + std::to_string (f_hi) + ", fs=" + std::to_string (fs) + ")");
    }
    if (order != 2 && order != 4) {
      throw ParameterError (
        "bandpass: order must be 2 or 4 (got " + std::to_string (order) + ")");
    }
  }
};

// Fixed-capacity section list so redesigns never touch the heap.
struct SectionList {
  static constexpr std::size_t max_sections = 2;

  std::array<BiquadCoeffs, max_sections> sections {};
  std::size_t                            count = 0;

  std::span<const BiquadCoeffs> view() const { return {sections.data(), count}; }

  std::complex<double> response (double omega) const
  {
    std::complex<double> h {1.0, 0.0};
    for (const auto& s : view()) {
      h *= s.response (omega);
    }
    return h;
  }
};

//------------------------------------------------------------------------------
// Butterworth bandpass: lowpass prototype of order/2, analog LP->BP mapping
// around prewarped edges, then bilinear transform. Each section carries one
// zero at DC and one at Nyquist and is scaled to unit gain at the digital
// image of the analog center frequency.
inline SectionList design_butterworth_bandpass (const BandpassSpec& spec)
{
  spec.validate();
  using cplx = std::complex<double>;
  constexpr double pi = std::numbers::pi;

  const double k  = 2.0 * spec.fs;
  const double w1 = k * std::tan (pi * spec.f_lo / spec.fs);
  const double w2 = k * std::tan (pi * spec.f_hi / spec.fs);
  const double bw = w2 - w1;
  const double w0 = std::sqrt (w1 * w2);
  const double center_omega = 2.0 * std::atan (w0 / k);

  auto to_z = [k] (cplx s) { return (k + s) / (k - s); };

  auto make_section = [&] (cplx z_a, cplx z_b) {
    BiquadCoeffs c;
    c.b0 = 1.0;
    c.b1 = 0.0;
    c.b2 = -1.0;
    c.a1 = -(z_a + z_b).real();
    c.a2 = (z_a * z_b).real();
    const double g = 1.0 / std::abs (c.response (center_omega));
    c.b0 *= g;
    c.b2 *= g;
    return c;
  };

  // BP poles generated by one prototype pole p: roots of s^2 - p*bw*s + w0^2.
  auto bp_poles = [&] (cplx p) {
    const cplx pb   = p * bw;
    const cplx disc = std::sqrt (pb * pb - 4.0 * w0 * w0);
    return std::array<cplx, 2> {(pb + disc) * 0.5, (pb - disc) * 0.5};
  };

  SectionList out;
  if (spec.order == 2) {
    const auto s = bp_poles (cplx {-1.0, 0.0});
    out.sections[0] = make_section (to_z (s[0]), to_z (s[1]));
    out.count       = 1;
  }
  else {
    // Second-order prototype, upper-half-plane pole; its conjugate yields the
    // conjugate BP poles, so each section pairs a BP pole with its conjugate.
    const auto s = bp_poles (std::polar (1.0, 0.75 * pi));
    out.sections[0] = make_section (to_z (s[0]), std::conj (to_z (s[0])));
    out.sections[1] = make_section (to_z (s[1]), std::conj (to_z (s[1])));
    out.count       = 2;
  }
  return out;
}

//------------------------------------------------------------------------------
// Cascade of up to SectionList::max_sections biquads with owned state.
template <std::floating_point T>
class BiquadCascade {
public:
  BiquadCascade() = default;
  explicit BiquadCascade (const SectionList& design) : design_ {design} {}

  // States are carried over; only the coefficients change.
  void set_design (const SectionList& design) { design_ = design; }

  const SectionList& design() const { return design_; }

  T process (T x)
  {
    for (std::size_t i = 0; i < design_.count; ++i) {
      x = process_sample (state_[i], design_.sections[i], x);
    }
    return x;
  }

  void process (std::span<T> io)
  {
    for (auto& v : io) {
      v = process (v);
    }
  }

  void reset()
  {
    for (auto& s : state_) {
      s.reset();
    }
  }

  // Loads the steady state for a constant input `level`, so a held level
  // passes without a start-up transient.
  void prime (T level)
  {
    reset();
    T x = level;
    for (std::size_t i = 0; i < design_.count; ++i) {
      const auto& c = design_.sections[i];
      const double dc_gain = (c.b0 + c.b1 + c.b2) / (1.0 + c.a1 + c.a2);
      const T y = static_cast<T> (dc_gain) * x;
      state_[i].s2 = static_cast<T> (c.b2) * x - static_cast<T> (c.a2) * y;
      state_[i].s1 = static_cast<T> (c.b1) * x - static_cast<T> (c.a1) * y + state_[i].s2;
      x = y;
    }
  }

  std::span<const BiquadState<T>> state() const { return {state_.data(), design_.count}; }

private:
  SectionList                                        design_ {};
  std::array<BiquadState<T>, SectionList::max_sections> state_ {};
};

} // namespace vibxfer
