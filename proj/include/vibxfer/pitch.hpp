#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vibxfer/error.hpp"
#include "vibxfer/fft.hpp"

namespace vibxfer {

struct PitchEstimate {
  double f0         = 0.0; // Hz
  double peak_value = 0.0; // unbiased normalized correlation at the chosen lag
  bool   valid      = false;
};

// Frame length for a sample rate: 2048 up to 48 kHz, doubled per octave of
// sample rate above that so the analysis window keeps its duration.
inline std::size_t default_snac_frame_size (double fs)
{
  std::size_t n = 2048;
  for (double limit = 48000.0; fs > limit; limit *= 2.0) {
    n *= 2;
  }
  return n;
}

struct SnacConfig {
  double      fs         = 44100.0;
  std::size_t frame_size = 2048;
  std::size_t hop        = 2048;
  double      bias_slope = -0.2;  // over the full lag range
  double      silence_db = -80.0; // frame RMS floor, dBFS

  static SnacConfig for_sample_rate (double fs)
  {
    SnacConfig c;
    c.fs         = fs;
    c.frame_size = default_snac_frame_size (fs);
    c.hop        = c.frame_size;
    return c;
  }

  std::size_t max_lag() const { return frame_size / 2; }

  void validate() const
  {
    if (!(fs > 0.0) || !std::isfinite (fs)) {
      throw ParameterError ("snac: sample rate must be positive");
    }
    if (frame_size < 8 || (frame_size & (frame_size - 1)) != 0) {
      throw ParameterError ("snac: frame size must be a power of two >= 8");
    }
    if (hop == 0) {
      throw ParameterError ("snac: hop must be positive");
    }
  }
};

inline double rms_dbfs (std::span<const double> x)
{
  if (x.empty()) {
    return -std::numeric_limits<double>::infinity();
  }
  double e = 0.0;
  for (double v : x) {
    e += v * v;
  }
  const double rms = std::sqrt (e / static_cast<double> (x.size()));
  return rms > 0.0 ? 20.0 * std::log10 (rms) : -std::numeric_limits<double>::infinity();
}

//------------------------------------------------------------------------------
// Specially normalized autocorrelation pitch estimator.
//
// n(tau) = 2 r(tau) / m(tau), r via zero-padded FFT, m accumulated
// incrementally. The bias 1 + slope * tau / tau_max only ranks candidate
// peaks; the parabolic refinement runs on the unbiased n(tau), otherwise the
// bias tilt drags long-period peaks by several samples.
class SnacDetector {
public:
  explicit SnacDetector (const SnacConfig& cfg)
    : cfg_ {cfg},
      fft_ {(cfg.validate(), 2 * cfg.frame_size)},
      spectrum_ (2 * cfg.frame_size),
      r_ (cfg.max_lag() + 1),
      m_ (cfg.max_lag() + 1),
      nsdf_ (cfg.max_lag() + 1)
  {}

  const SnacConfig& config() const { return cfg_; }

  PitchEstimate estimate (std::span<const double> frame)
  {
    if (frame.size() != cfg_.frame_size) {
      throw ParameterError (
        "snac: frame length " + std::to_string (frame.size()) + " != configured "
        + std::to_string (cfg_.frame_size));
    }
    std::fill (nsdf_.begin(), nsdf_.end(), 0.0);
    if (rms_dbfs (frame) < cfg_.silence_db) {
      return {};
    }
    autocorrelation (frame);
    normalization (frame);

    const std::size_t tau_max = cfg_.max_lag();
    for (std::size_t tau = 1; tau <= tau_max; ++tau) {
      nsdf_[tau] = m_[tau] >= min_energy ? 2.0 * r_[tau] / m_[tau] : 0.0;
    }
    nsdf_[0] = m_[0] >= min_energy ? 1.0 : 0.0;
    return pick_peak();
  }

  // n(tau) of the last frame, tau in [0, frame_size / 2].
  std::span<const double> nsdf() const { return nsdf_; }
  // r(tau) and m(tau) of the last non-silent frame.
  std::span<const double> autocorr() const { return r_; }
  std::span<const double> energy() const { return m_; }

  // Fast-path r(tau) for tau in [0, frame_size / 2], for comparison against
  // a direct sum.
  std::span<const double> compute_autocorrelation (std::span<const double> frame)
  {
    autocorrelation (frame);
    normalization (frame);
    return r_;
  }

  static constexpr double min_energy = 1e-12;

private:
  void autocorrelation (std::span<const double> frame)
  {
    const std::size_t n = cfg_.frame_size;
    for (std::size_t i = 0; i < n; ++i) {
      spectrum_[i] = {frame[i], 0.0};
    }
    std::fill (spectrum_.begin() + static_cast<std::ptrdiff_t> (n), spectrum_.end(),
               std::complex<double> {});
    fft_.forward (spectrum_);
    for (auto& v : spectrum_) {
      v = {std::norm (v), 0.0};
    }
    fft_.inverse (spectrum_);
    const double scale = 1.0 / static_cast<double> (fft_.size());
    for (std::size_t tau = 0; tau < r_.size(); ++tau) {
      r_[tau] = spectrum_[tau].real() * scale;
    }
  }

  void normalization (std::span<const double> frame)
  {
    const std::size_t n = cfg_.frame_size;
    double m = 0.0;
    for (double v : frame) {
      m += v * v;
    }
    m *= 2.0;
    m_[0] = m;
    for (std::size_t tau = 1; tau < m_.size(); ++tau) {
      m -= frame[tau - 1] * frame[tau - 1] + frame[n - tau] * frame[n - tau];
      m_[tau] = std::max (m, 0.0);
    }
  }

  struct Vertex {
    double lag;
    double value;
  };

  // Parabola through (tau-1, tau, tau+1) of the unbiased n(tau).
  Vertex refine (std::size_t tau) const
  {
    const double y0    = nsdf_[tau - 1];
    const double y1    = nsdf_[tau];
    const double y2    = nsdf_[tau + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    if (!(denom < 0.0)) {
      return {static_cast<double> (tau), y1};
    }
    const double offset = std::clamp (0.5 * (y0 - y2) / denom, -0.5, 0.5);
    return {static_cast<double> (tau) + offset, y1 - 0.25 * (y0 - y2) * offset};
  }

  PitchEstimate pick_peak() const
  {
    const std::size_t tau_max = cfg_.max_lag();

    std::size_t tau = 1;
    while (tau <= tau_max && nsdf_[tau] >= 0.0) {
      ++tau;
    }
    if (tau > tau_max) {
      return {};
    }

    // Peaks are ranked by their interpolated height under the bias; at short
    // periods the sampled heights alone can favour a multiple of the period.
    Vertex best {0.0, 0.0};
    double best_val = 0.0;
    for (++tau; tau + 1 <= tau_max; ++tau) {
      if (m_[tau] < min_energy || nsdf_[tau] <= 0.0) {
        continue;
      }
      if (nsdf_[tau] > nsdf_[tau - 1] && nsdf_[tau] >= nsdf_[tau + 1]) {
        const Vertex v = refine (tau);
        const double b = v.value * (1.0 + cfg_.bias_slope * v.lag / static_cast<double> (tau_max));
        if (b > best_val) {
          best_val = b;
          best     = v;
        }
      }
    }
    if (best.lag == 0.0) {
      return {};
    }
    return {cfg_.fs / best.lag, best.value, true};
  }

  SnacConfig                        cfg_;
  Fft                               fft_;
  std::vector<std::complex<double>> spectrum_;
  std::vector<double>               r_;
  std::vector<double>               m_;
  std::vector<double>               nsdf_;
};

inline PitchEstimate snac_frame (std::span<const double> frame, const SnacConfig& cfg)
{
  SnacDetector det {cfg};
  return det.estimate (frame);
}

} // namespace vibxfer
