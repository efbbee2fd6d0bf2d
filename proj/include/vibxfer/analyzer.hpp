#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vibxfer/analytic.hpp"
#include "vibxfer/error.hpp"
#include "vibxfer/filters.hpp"
#include "vibxfer/params.hpp"
#include "vibxfer/pitch.hpp"

namespace vibxfer {

//------------------------------------------------------------------------------
// Gate
//------------------------------------------------------------------------------
enum class GateMode : std::uint8_t { inactive, arming, active, releasing };

inline const char* to_string (GateMode m)
{
  switch (m) {
  case GateMode::inactive: return "inactive";
  case GateMode::arming: return "arming";
  case GateMode::active: return "active";
  case GateMode::releasing: return "releasing";
  }
  return "?";
}

struct GateConfig {
  double rms_threshold_db          = -60.0;
  double stability_tolerance       = 0.03; // relative f0 deviation
  int    deviant_frames_to_release = 2;
  double carrier_time_constant_s   = 1.0;
  double frame_seconds             = 2048.0 / 44100.0;
};

struct GateState {
  static constexpr int lock_frames = 4;

  GateMode mode         = GateMode::inactive;
  int      stable_count = 0;
  double   locked_f0    = 0.0; // carrier estimate; arming candidate until active

  // Estimates of the current arming run, oldest first.
  std::array<double, lock_frames> recent {};
  int                             recent_count  = 0;
  int                             deviant_count = 0;

  double recent_median() const
  {
    std::array<double, lock_frames> v = recent;
    const auto n = static_cast<std::size_t> (recent_count);
    std::sort (v.begin(), v.begin() + recent_count);
    if (n == 0) {
      return 0.0;
    }
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  }

  void push_recent (double f0)
  {
    if (recent_count == lock_frames) {
      std::rotate (recent.begin(), recent.begin() + 1, recent.end());
      recent[lock_frames - 1] = f0;
    }
    else {
      recent[static_cast<std::size_t> (recent_count++)] = f0;
    }
  }
};

namespace detail {
inline bool within (double f0, double ref, double tol)
{
  return ref > 0.0 && std::abs (f0 / ref - 1.0) <= tol;
}
} // namespace detail

// Frame-rate transitions. Releasing is left by complete_release() once the
// delay and envelope are back at neutral.
inline GateState update_gate (
  GateState            s,
  const PitchEstimate& est,
  double               rms_db,
  const GateConfig&    cfg = {})
{
  const bool loud  = rms_db > cfg.rms_threshold_db;
  const bool usable = loud && est.valid && est.f0 > 0.0;

  auto start_arming = [&] {
    s               = GateState {};
    s.mode          = GateMode::arming;
    s.stable_count  = 1;
    s.recent[0]     = est.f0;
    s.recent_count  = 1;
    s.locked_f0     = est.f0;
  };

  switch (s.mode) {
  case GateMode::inactive:
    if (usable) {
      start_arming();
    }
    break;

  case GateMode::arming:
    if (!usable) {
      s = GateState {};
      break;
    }
    if (detail::within (est.f0, s.recent_median(), cfg.stability_tolerance)) {
      s.push_recent (est.f0);
      ++s.stable_count;
      s.locked_f0 = s.recent_median();
    }
    else {
      start_arming();
    }
    if (s.stable_count >= GateState::lock_frames) {
      s.mode          = GateMode::active;
      s.locked_f0     = s.recent_median();
      s.deviant_count = 0;
    }
    break;

  case GateMode::active:
    if (!loud) {
      s.mode = GateMode::releasing;
      break;
    }
    if (est.valid && detail::within (est.f0, s.locked_f0, cfg.stability_tolerance)) {
      s.deviant_count = 0;
      const double k  = 1.0 - std::exp (-cfg.frame_seconds / cfg.carrier_time_constant_s);
      s.locked_f0 += k * (est.f0 - s.locked_f0);
    }
    else if (++s.deviant_count >= cfg.deviant_frames_to_release) {
      s.mode = GateMode::releasing;
    }
    break;

  case GateMode::releasing: break;
  }
  return s;
}

inline GateState complete_release (const GateState&)
{
  return GateState {};
}

//------------------------------------------------------------------------------
// Relative frequency shift 1 - w_i / w_c, clamped to +/- limit.
inline double compute_rfs (double w_i, double w_c, double limit = 0.05)
{
  if (!(w_c > 0.0)) {
    throw std::domain_error ("compute_rfs: carrier frequency must be positive");
  }
  return std::clamp (1.0 - w_i / w_c, -limit, limit);
}

//------------------------------------------------------------------------------
// Release: delay offset from the base latency decays with a 200 ms time
// constant under a per-sample slope cap; envelope decays with 50 ms.
struct ReleaseConfig {
  double delay_time_constant_s    = 0.2;
  double envelope_time_constant_s = 0.05;
  double max_delay_slope          = 0.002; // samples per sample
  double envelope_floor           = 1e-4;
};

struct ReleaseState {
  double offset   = 0.0; // samples relative to the base delay
  double envelope = 0.0;
};

struct ReleaseCoeffs {
  double delay_decay = 1.0;
  double env_decay   = 1.0;
  double max_slope   = 0.002;
  double env_floor   = 1e-4;

  static ReleaseCoeffs make (double fs, const ReleaseConfig& cfg = {})
  {
    return {
      std::exp (-1.0 / (cfg.delay_time_constant_s * fs)),
      std::exp (-1.0 / (cfg.envelope_time_constant_s * fs)),
      cfg.max_delay_slope,
      cfg.envelope_floor};
  }
};

struct ReleaseOutput {
  double offset   = 0.0;
  double envelope = 0.0;
  bool   done     = false;
};

inline ReleaseOutput release_step (ReleaseState& st, const ReleaseCoeffs& c)
{
  // Within one capped step of neutral the offset lands exactly on 0.
  if (std::abs (st.offset) <= c.max_slope) {
    st.offset = 0.0;
  }
  else {
    st.offset -= std::clamp (st.offset * (1.0 - c.delay_decay), -c.max_slope, c.max_slope);
  }
  st.envelope *= c.env_decay;
  const bool done = st.offset == 0.0 && std::abs (st.envelope) <= c.env_floor;
  if (done) {
    st.envelope = 0.0;
  }
  return {st.offset, st.envelope, done};
}

//------------------------------------------------------------------------------
// Controls
//------------------------------------------------------------------------------
struct ControlBlock {
  static constexpr std::size_t default_capacity = 2048;

  std::vector<double>   delay;    // samples, in [1, 4095]
  std::vector<double>   envelope; // zero-centred AM
  std::vector<double>   rfs;      // band-passed RFS feeding the integrator
  std::vector<double>   f0;       // latest pitch estimate, 0 when invalid
  std::vector<GateMode> gate;     // gate mode that produced each sample
  GateState             gate_state {}; // snapshot after the last sample

  explicit ControlBlock (std::size_t capacity = default_capacity) : capacity_ {capacity}
  {
    delay.reserve (capacity);
    envelope.reserve (capacity);
    rfs.reserve (capacity);
    f0.reserve (capacity);
    gate.reserve (capacity);
  }

  std::size_t size() const { return delay.size(); }
  std::size_t capacity() const { return capacity_; }

  void resize (std::size_t n)
  {
    if (n > capacity_) {
      throw ParameterError (
        "control block length " + std::to_string (n) + " exceeds capacity "
        + std::to_string (capacity_));
    }
    delay.resize (n);
    envelope.resize (n);
    rfs.resize (n);
    f0.resize (n);
    gate.resize (n);
  }

private:
  std::size_t capacity_;
};

//------------------------------------------------------------------------------
// Analyzer
//------------------------------------------------------------------------------
struct AnalyzerConfig {
  double fs            = 44100.0;
  double base_delay    = 512.0;
  double min_delay     = 1.0;
  double max_delay     = 4095.0;
  double band_lo_hz    = 2.0;  // shared by the RFS and AM paths
  double band_hi_hz    = 10.0;
  int    band_order    = 4;
  double rfs_limit     = 0.05;
  double carrier_scale = 1.0;  // multiplies the locked carrier in the RFS
  double harmonic_half_width_octaves = 0.25;
  int    harmonic_order              = 4;
  double retune_threshold            = 0.01;
  double initial_center_hz           = 440.0;
  double param_ramp_s                = 0.010;
  std::size_t   max_block            = ControlBlock::default_capacity;
  GateConfig    gate {};
  ReleaseConfig release {};

  static AnalyzerConfig for_sample_rate (double fs)
  {
    AnalyzerConfig c;
    c.fs                 = fs;
    c.gate.frame_seconds = static_cast<double> (default_snac_frame_size (fs)) / fs;
    return c;
  }
};

struct AnalyzerDiagnostics {
  std::uint64_t non_finite_inputs = 0;
  std::uint64_t frames_analyzed   = 0;
  std::uint64_t harmonic_retunes  = 0;
};

// Sidechain analysis: SNAC gating, harmonic bandpass, analytic estimator,
// RFS band-pass and integration into a delay, AM envelope extraction.
// All per-sample work is allocation-free; blocks of any size up to max_block
// give identical results.
class Analyzer {
public:
  explicit Analyzer (const AnalyzerConfig& cfg = AnalyzerConfig::for_sample_rate (44100.0))
    : cfg_ {validated (cfg)},
      snac_ {SnacConfig::for_sample_rate (cfg.fs)},
      frame_ (snac_.config().frame_size, 0.0),
      rfs_bp_ {design_butterworth_bandpass ({cfg.band_lo_hz, cfg.band_hi_hz, cfg.band_order, cfg.fs})},
      am_bp_ {rfs_bp_.design()},
      alpha_f_ {1.0, static_cast<std::size_t> (std::lround (cfg.param_ramp_s * cfg.fs))},
      release_coeffs_ {ReleaseCoeffs::make (cfg.fs, cfg.release)}
  {
    cfg_.gate.frame_seconds = static_cast<double> (snac_.config().hop) / cfg_.fs;
    retune (cfg_.initial_center_hz, true);
  }

  const AnalyzerConfig&      config() const { return cfg_; }
  double                     sample_rate() const { return cfg_.fs; }
  const GateState&           gate() const { return gate_; }
  const PitchEstimate&       last_estimate() const { return last_estimate_; }
  double                     last_rms_db() const { return last_rms_db_; }
  const AnalyzerDiagnostics& diagnostics() const { return diag_; }
  double                     harmonic_center() const { return harmonic_center_; }
  std::size_t                frame_size() const { return frame_.size(); }

  // Carrier used in the RFS denominator.
  double carrier() const { return gate_.locked_f0 * cfg_.carrier_scale; }

  void analyze_block (std::span<const double> sidechain, const TransferParams& params, ControlBlock& out)
  {
    params.validate();
    if (sidechain.size() > cfg_.max_block) {
      throw ParameterError (
        "analyzer block of " + std::to_string (sidechain.size()) + " samples exceeds "
        + std::to_string (cfg_.max_block));
    }
    out.resize (sidechain.size());
    alpha_f_.set_target (params.alpha_f);
    for (std::size_t i = 0; i < sidechain.size(); ++i) {
      step (sidechain[i], out, i);
    }
    out.gate_state = gate_;
  }

  ControlBlock analyze_block (std::span<const double> sidechain, const TransferParams& params)
  {
    ControlBlock out {std::max (sidechain.size(), std::size_t {1})};
    analyze_block (sidechain, params, out);
    return out;
  }

private:
  static const AnalyzerConfig& validated (const AnalyzerConfig& c)
  {
    if (!(c.fs > 0.0) || !std::isfinite (c.fs)) {
      throw ConfigError ("analyzer: sample rate must be positive");
    }
    if (!(c.min_delay >= 1.0 && c.min_delay < c.base_delay && c.base_delay < c.max_delay)) {
      throw ConfigError ("analyzer: need 1 <= min_delay < base_delay < max_delay");
    }
    if (!(c.carrier_scale > 0.0)) {
      throw ConfigError ("analyzer: carrier_scale must be positive");
    }
    return c;
  }

  void step (double x, ControlBlock& out, std::size_t i)
  {
    if (!std::isfinite (x)) {
      ++diag_.non_finite_inputs;
      x = 0.0;
    }
    const double alpha_f = alpha_f_.next();

    const double         h = harmonic_.process (x);
    const AnalyticSample a = hilbert_.process (h);
    held_wi_  = instantaneous_frequency (prev_analytic_, a, cfg_.fs, held_wi_);
    prev_analytic_ = a;
    last_amp_ = instantaneous_amplitude (a);

    double delay = cfg_.base_delay;
    double env   = 0.0;
    double rf    = 0.0;
    const GateMode mode = gate_.mode;

    switch (mode) {
    case GateMode::active: {
      rf = rfs_bp_.process (compute_rfs (held_wi_, carrier(), cfg_.rfs_limit));
      deviation_ += rf;
      if (alpha_f > 0.0) {
        deviation_ = std::clamp (
          deviation_,
          (cfg_.min_delay - cfg_.base_delay) / alpha_f,
          (cfg_.max_delay - cfg_.base_delay) / alpha_f);
      }
      delay = std::clamp (cfg_.base_delay + alpha_f * deviation_, cfg_.min_delay, cfg_.max_delay);
      env   = am_bp_.process (last_amp_);
      break;
    }
    case GateMode::releasing: {
      const auto r = release_step (release_, release_coeffs_);
      delay = std::clamp (cfg_.base_delay + r.offset, cfg_.min_delay, cfg_.max_delay);
      env   = r.envelope;
      if (r.done) {
        gate_      = complete_release (gate_);
        deviation_ = 0.0;
      }
      break;
    }
    case GateMode::inactive:
    case GateMode::arming: break;
    }
    last_delay_ = delay;
    last_env_   = env;

    out.delay[i]    = delay;
    out.envelope[i] = env;
    out.rfs[i]      = rf;
    out.f0[i]       = last_estimate_.valid ? last_estimate_.f0 : 0.0;
    out.gate[i]     = mode;

    frame_[frame_fill_++] = x;
    if (frame_fill_ == frame_.size()) {
      frame_fill_ = 0;
      on_frame();
    }
  }

  void on_frame()
  {
    ++diag_.frames_analyzed;
    last_estimate_ = snac_.estimate (frame_);
    last_rms_db_   = rms_dbfs (frame_);

    const GateMode before = gate_.mode;
    gate_ = update_gate (gate_, last_estimate_, last_rms_db_, cfg_.gate);

    if (gate_.mode == GateMode::arming || gate_.mode == GateMode::active) {
      retune (gate_.locked_f0, false);
    }
    if (before != GateMode::active && gate_.mode == GateMode::active) {
      rfs_bp_.reset();
      am_bp_.prime (last_amp_);
      deviation_ = 0.0;
    }
    if (before == GateMode::active && gate_.mode == GateMode::releasing) {
      release_ = {last_delay_ - cfg_.base_delay, last_env_};
      deviation_ = 0.0;
    }
  }

  // Half-octave (by default) Butterworth band around f0; coefficients change
  // only when f0 moves by more than the retune threshold, states carry over.
  void retune (double f0, bool force)
  {
    if (!(f0 > 0.0)) {
      return;
    }
    if (!force && std::abs (f0 / harmonic_center_ - 1.0) <= cfg_.retune_threshold) {
      return;
    }
    const double spread = std::exp2 (cfg_.harmonic_half_width_octaves);
    const double lo     = f0 / spread;
    const double hi     = f0 * spread;
    if (hi >= 0.5 * cfg_.fs) {
      return;
    }
    harmonic_.set_design (design_butterworth_bandpass ({lo, hi, cfg_.harmonic_order, cfg_.fs}));
    harmonic_center_ = f0;
    if (!force) {
      ++diag_.harmonic_retunes;
    }
  }

  AnalyzerConfig              cfg_;
  SnacDetector                snac_;
  std::vector<double>         frame_;
  std::size_t                 frame_fill_ = 0;
  BiquadCascade<double>       harmonic_ {};
  double                      harmonic_center_ = 0.0;
  HilbertEstimator<double>    hilbert_ {};
  AnalyticSample              prev_analytic_ {};
  double                      held_wi_  = 0.0;
  double                      last_amp_ = 0.0;
  BiquadCascade<double>       rfs_bp_;
  BiquadCascade<double>       am_bp_;
  double                      deviation_ = 0.0;
  LinearSmoother              alpha_f_;
  ReleaseCoeffs               release_coeffs_;
  ReleaseState                release_ {};
  GateState                   gate_ {};
  PitchEstimate               last_estimate_ {};
  double                      last_rms_db_ = -std::numeric_limits<double>::infinity();
  double                      last_delay_  = 512.0;
  double                      last_env_    = 0.0;
  AnalyzerDiagnostics         diag_ {};
};

} // namespace vibxfer
