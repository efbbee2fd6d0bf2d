#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "vibxfer/engine.hpp"
#include "vibxfer/error.hpp"
#include "vibxfer/wav.hpp"

namespace vibxfer {

struct RunConfig {
  std::string                input_path;
  std::string                sidechain_path;
  std::string                output_path;
  double                     alpha_f    = 1.0;
  double                     alpha_a    = 1.0;
  std::size_t                block_size = 64;
  std::optional<std::string> controls_csv_path;

  void validate() const
  {
    if (block_size < 16 || block_size > 2048 || (block_size & (block_size - 1)) != 0) {
      throw ParameterError (
        "block size must be a power of two in [16, 2048] (got " + std::to_string (block_size) + ")");
    }
    TransferParams {alpha_f, alpha_a}.validate();
  }
};

inline constexpr const char* controls_csv_header = "sample,f0_hz,gate,rfs,delay_samples,envelope";

struct RunResult {
  std::size_t samples  = 0;
  double      sample_rate = 0.0;
};

class ControlsCsvWriter {
public:
  explicit ControlsCsvWriter (const std::string& path) : out_ {path, std::ios::trunc}
  {
    if (!out_) {
      throw std::runtime_error ("cannot open '" + path + "' for writing");
    }
    out_ << controls_csv_header << '\n';
  }

  void append (std::size_t first_sample, const ControlBlock& c)
  {
    for (std::size_t i = 0; i < c.size(); ++i) {
      line_.clear();
      put (first_sample + i);
      put (c.f0[i]);
      line_ += to_string (c.gate[i]);
      line_ += ',';
      put (c.rfs[i]);
      put (c.delay[i]);
      put (c.envelope[i], '\n');
      out_ << line_;
    }
  }

  void close()
  {
    out_.close();
    if (!out_) {
      throw std::runtime_error ("writing controls CSV failed");
    }
  }

private:
  template <class V>
  void put (V v, char sep = ',')
  {
    char buf[64];
    const auto r = std::to_chars (buf, buf + sizeof buf, v);
    line_.append (buf, r.ptr);
    line_ += sep;
  }

  std::ofstream out_;
  std::string   line_;
};

// Streams input and sidechain through the transfer in block_size chunks over
// min(len_input, len_sidechain) samples; the output is float32 at the input rate.
inline RunResult run_transfer (const RunConfig& cfg, std::ostream& log)
{
  cfg.validate();
  const WavAudio input     = read_wav (cfg.input_path);
  const WavAudio sidechain = read_wav (cfg.sidechain_path);
  if (input.channels > 1) {
    log << "warning: input has " << input.channels << " channels, using the first\n";
  }
  if (sidechain.channels > 1) {
    log << "warning: sidechain has " << sidechain.channels << " channels, using the first\n";
  }

  VibratoTransfer fx {input.sample_rate, sidechain.sample_rate, cfg.block_size};
  fx.set_params ({cfg.alpha_f, cfg.alpha_a});

  const std::size_t   total = std::min (input.samples.size(), sidechain.samples.size());
  std::vector<double> output (total);

  std::optional<ControlsCsvWriter> csv;
  if (cfg.controls_csv_path) {
    csv.emplace (*cfg.controls_csv_path);
  }

  for (std::size_t pos = 0; pos < total; pos += cfg.block_size) {
    const std::size_t n = std::min (cfg.block_size, total - pos);
    const auto& controls = fx.process (
      std::span {input.samples}.subspan (pos, n),
      std::span {sidechain.samples}.subspan (pos, n),
      std::span {output}.subspan (pos, n));
    if (csv) {
      csv->append (pos, controls);
    }
  }

  write_wav_float32 (cfg.output_path, output, static_cast<std::uint32_t> (input.sample_rate));
  if (csv) {
    csv->close();
  }
  return {total, input.sample_rate};
}

// Exit status wrapper: 0 on success, 1 on any error (message to `log`).
inline int run (const RunConfig& cfg, std::ostream& log)
{
  try {
    run_transfer (cfg, log);
    return 0;
  }
  catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
}

} // namespace vibxfer
