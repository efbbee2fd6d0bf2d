#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "vibxfer/analyzer.hpp"
#include "vibxfer/delay_line.hpp"
#include "vibxfer/error.hpp"
#include "vibxfer/params.hpp"

namespace vibxfer {

struct EngineDiagnostics {
  std::uint64_t non_finite_inputs   = 0;
  std::uint64_t non_finite_controls = 0;
  std::uint64_t clamped_delays      = 0;
  std::uint64_t clamped_gains       = 0;
};

//------------------------------------------------------------------------------
// Modulated delay followed by the envelope shaper
//   y(n) = (0.707 + alpha_a e(n)) x(n - delay(n)).
// The base gain applies even when the envelope is zero (gate closed), so
// opening or closing the gate never changes the level.
class Engine {
public:
  static constexpr double      base_gain     = 0.707;
  static constexpr double      max_gain      = 2.0;
  static constexpr std::size_t latency       = 512;
  static constexpr std::size_t line_capacity = DelayLine<double>::default_capacity;

  explicit Engine (double fs, double param_ramp_s = 0.010)
    : fs_ {fs},
      line_ {line_capacity},
      alpha_a_ {1.0, static_cast<std::size_t> (std::lround (param_ramp_s * fs))}
  {
    if (!(fs > 0.0) || !std::isfinite (fs)) {
      throw ConfigError ("engine: sample rate must be positive");
    }
  }

  double                   sample_rate() const { return fs_; }
  const EngineDiagnostics& diagnostics() const { return diag_; }
  const TransferParams&    params() const { return params_; }
  double                   effective_alpha_a() const { return alpha_a_.current(); }
  static constexpr std::size_t latency_samples() { return latency; }

  // Takes effect from the next processed sample, ramping over param_ramp_s.
  void set_params (const TransferParams& p)
  {
    p.validate();
    params_ = p;
    alpha_a_.set_target (p.alpha_a);
  }

  void process_block (std::span<const double> input, const ControlBlock& controls, std::span<double> output)
  {
    if (input.size() != controls.size() || output.size() != input.size()) {
      throw std::invalid_argument (
        "engine: input (" + std::to_string (input.size()) + "), controls ("
        + std::to_string (controls.size()) + ") and output ("
        + std::to_string (output.size()) + ") lengths differ");
    }
    for (std::size_t n = 0; n < input.size(); ++n) {
      output[n] = process_sample (input[n], controls.delay[n], controls.envelope[n]);
    }
  }

  void process_block (
    std::span<const double> input,
    const ControlBlock&     controls,
    const TransferParams&   params,
    std::span<double>       output)
  {
    set_params (params);
    process_block (input, controls, output);
  }

  double process_sample (double x, double delay, double envelope)
  {
    if (!std::isfinite (x)) {
      ++diag_.non_finite_inputs;
      x = 0.0;
    }
    if (!std::isfinite (delay)) {
      ++diag_.non_finite_controls;
      delay = last_delay_;
    }
    if (!std::isfinite (envelope)) {
      ++diag_.non_finite_controls;
      envelope = last_envelope_;
    }
    if (delay < line_.min_delay() || delay > line_.max_delay()) {
      ++diag_.clamped_delays;
    }
    last_delay_    = delay;
    last_envelope_ = envelope;

    line_.write (x);
    const double delayed = line_.read_fractional (delay);

    double gain = base_gain + alpha_a_.next() * envelope;
    if (gain < 0.0 || gain > max_gain) {
      ++diag_.clamped_gains;
      gain = std::clamp (gain, 0.0, max_gain);
    }
    return gain * delayed;
  }

  void reset()
  {
    line_.reset();
    last_delay_    = static_cast<double> (latency);
    last_envelope_ = 0.0;
  }

private:
  double            fs_;
  DelayLine<double> line_;
  LinearSmoother    alpha_a_;
  TransferParams    params_ {};
  double            last_delay_    = static_cast<double> (latency);
  double            last_envelope_ = 0.0;
  EngineDiagnostics diag_ {};
};

//------------------------------------------------------------------------------
// Analyzer and engine wired together for one mono stream.
class VibratoTransfer {
public:
  VibratoTransfer (double input_fs, double sidechain_fs, std::size_t max_block = ControlBlock::default_capacity)
    : analyzer_ {checked_config (input_fs, sidechain_fs, max_block)},
      engine_ {input_fs},
      controls_ {max_block}
  {}

  void set_params (const TransferParams& p)
  {
    engine_.set_params (p);
    params_ = p;
  }

  const TransferParams& params() const { return params_; }

  // input, sidechain and output share one length <= max_block.
  const ControlBlock& process (std::span<const double> input, std::span<const double> sidechain, std::span<double> output)
  {
    if (input.size() != sidechain.size()) {
      throw std::invalid_argument ("input and sidechain block lengths differ");
    }
    analyzer_.analyze_block (sidechain, params_, controls_);
    engine_.process_block (input, controls_, output);
    return controls_;
  }

  const Analyzer& analyzer() const { return analyzer_; }
  const Engine&   engine() const { return engine_; }

private:
  static AnalyzerConfig checked_config (double input_fs, double sidechain_fs, std::size_t max_block)
  {
    if (input_fs != sidechain_fs) {
      throw ConfigError (
        "sample rate mismatch: input " + std::to_string (input_fs) + " Hz, sidechain "
        + std::to_string (sidechain_fs) + " Hz");
    }
    auto cfg      = AnalyzerConfig::for_sample_rate (input_fs);
    cfg.max_block = max_block;
    return cfg;
  }

  Analyzer       analyzer_;
  Engine         engine_;
  ControlBlock   controls_;
  TransferParams params_ {};
};

} // namespace vibxfer
