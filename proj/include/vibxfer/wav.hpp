#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vibxfer {

class WavError : public std::runtime_error {
public:
  explicit WavError (const std::string& what) : std::runtime_error (what) {}
};

enum class WavEncoding : std::uint8_t { pcm16, pcm24, float32 };

struct WavAudio {
  double              sample_rate = 0.0;
  WavEncoding         encoding    = WavEncoding::float32;
  int                 channels    = 1;  // channels in the file
  std::vector<double> samples;          // first channel only
};

namespace wav_detail {

inline std::uint32_t u32 (const unsigned char* p)
{
  return std::uint32_t (p[0]) | std::uint32_t (p[1]) << 8 | std::uint32_t (p[2]) << 16
    | std::uint32_t (p[3]) << 24;
}
inline std::uint16_t u16 (const unsigned char* p)
{
  return static_cast<std::uint16_t> (p[0] | p[1] << 8);
}
inline void put_u32 (std::vector<unsigned char>& o, std::uint32_t v)
{
  for (int i = 0; i < 4; ++i) {
    o.push_back (static_cast<unsigned char> (v >> (8 * i)));
  }
}
inline void put_u16 (std::vector<unsigned char>& o, std::uint16_t v)
{
  o.push_back (static_cast<unsigned char> (v));
  o.push_back (static_cast<unsigned char> (v >> 8));
}

constexpr std::uint16_t format_pcm        = 1;
constexpr std::uint16_t format_float      = 3;
constexpr std::uint16_t format_extensible = 0xFFFE;

} // namespace wav_detail

// Mono or multichannel RIFF/WAVE with 16/24-bit PCM or 32-bit float samples.
// Only the first channel is kept.
inline WavAudio parse_wav (std::span<const unsigned char> bytes)
{
  using namespace wav_detail;
  if (bytes.size() < 12 || std::memcmp (bytes.data(), "RIFF", 4) != 0
      || std::memcmp (bytes.data() + 8, "WAVE", 4) != 0) {
    throw WavError ("not a RIFF/WAVE file");
  }
  bool          have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  const unsigned char* data      = nullptr;
  std::size_t          data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::size_t    size  = u32 (chunk + 4);
    const std::size_t    avail = bytes.size() - pos - 8;
    const std::size_t    body  = size <= avail ? size : avail;
    if (std::memcmp (chunk, "fmt ", 4) == 0) {
      if (body < 16) {
        throw WavError ("truncated fmt chunk");
      }
      format      = u16 (chunk + 8);
      channels    = u16 (chunk + 10);
      rate        = u32 (chunk + 12);
      block_align = u16 (chunk + 20);
      bits        = u16 (chunk + 22);
      if (format == format_extensible) {
        if (body < 40) {
          throw WavError ("truncated extensible fmt chunk");
        }
        format = u16 (chunk + 8 + 24);
      }
      have_fmt = true;
    }
    else if (std::memcmp (chunk, "data", 4) == 0) {
      data      = chunk + 8;
      data_size = body;
    }
    pos += 8 + size + (size & 1u);
  }
  if (!have_fmt) {
    throw WavError ("missing fmt chunk");
  }
  if (data == nullptr) {
    throw WavError ("missing data chunk");
  }
  if (channels == 0 || rate == 0) {
    throw WavError ("invalid channel count or sample rate");
  }

  WavAudio out;
  out.sample_rate = static_cast<double> (rate);
  out.channels    = channels;
  if (format == format_pcm && bits == 16) {
    out.encoding = WavEncoding::pcm16;
  }
  else if (format == format_pcm && bits == 24) {
    out.encoding = WavEncoding::pcm24;
  }
  else if (format == format_float && bits == 32) {
    out.encoding = WavEncoding::float32;
  }
  else {
    throw WavError (
      "unsupported WAV encoding (format " + std::to_string (format) + ", "
      + std::to_string (bits) + " bits); expected 16/24-bit PCM or 32-bit float");
  }
  const std::size_t bytes_per_sample = bits / 8u;
  const std::size_t frame = block_align >= channels * bytes_per_sample
    ? block_align
    : channels * bytes_per_sample;
  const std::size_t frames = data_size / frame;
  out.samples.resize (frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const unsigned char* p = data + i * frame;
    switch (out.encoding) {
    case WavEncoding::pcm16:
      out.samples[i] = static_cast<std::int16_t> (u16 (p)) / 32768.0;
      break;
    case WavEncoding::pcm24: {
      std::int32_t v = std::int32_t (p[0]) | std::int32_t (p[1]) << 8 | std::int32_t (p[2]) << 16;
      if (v & 0x800000) {
        v -= 0x1000000;
      }
      out.samples[i] = v / 8388608.0;
      break;
    }
    case WavEncoding::float32: {
      float f;
      const std::uint32_t bitsv = u32 (p);
      std::memcpy (&f, &bitsv, sizeof f);
      out.samples[i] = f;
      break;
    }
    }
  }
  return out;
}

inline WavAudio read_wav (const std::string& path)
{
  std::ifstream f (path, std::ios::binary);
  if (!f) {
    throw WavError ("cannot open '" + path + "'");
  }
  std::vector<unsigned char> bytes ((std::istreambuf_iterator<char> (f)), std::istreambuf_iterator<char>());
  try {
    return parse_wav (bytes);
  }
  catch (const WavError& e) {
    throw WavError (path + ": " + e.what());
  }
}

// Interleaved samples; PCM is clipped to full scale and rounded.
inline std::vector<unsigned char> encode_wav (
  std::span<const double> interleaved,
  std::uint32_t           rate,
  std::uint16_t           channels = 1,
  WavEncoding             encoding = WavEncoding::float32)
{
  using namespace wav_detail;
  const std::uint16_t bits = encoding == WavEncoding::pcm16 ? 16 : encoding == WavEncoding::pcm24 ? 24 : 32;
  const std::uint16_t block_align = static_cast<std::uint16_t> (channels * bits / 8);
  const std::uint32_t data_bytes  = static_cast<std::uint32_t> (interleaved.size() * (bits / 8u));
  std::vector<unsigned char> o;
  o.reserve (44 + data_bytes);
  o.insert (o.end(), {'R', 'I', 'F', 'F'});
  put_u32 (o, 36 + data_bytes);
  o.insert (o.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32 (o, 16);
  put_u16 (o, encoding == WavEncoding::float32 ? format_float : format_pcm);
  put_u16 (o, channels);
  put_u32 (o, rate);
  put_u32 (o, rate * block_align);
  put_u16 (o, block_align);
  put_u16 (o, bits);
  o.insert (o.end(), {'d', 'a', 't', 'a'});
  put_u32 (o, data_bytes);
  for (double s : interleaved) {
    switch (encoding) {
    case WavEncoding::float32: {
      const float   f = static_cast<float> (s);
      std::uint32_t v;
      std::memcpy (&v, &f, sizeof v);
      put_u32 (o, v);
      break;
    }
    case WavEncoding::pcm16: {
      const double  c = std::clamp (s, -1.0, 32767.0 / 32768.0);
      put_u16 (o, static_cast<std::uint16_t> (static_cast<std::int16_t> (std::lround (c * 32768.0))));
      break;
    }
    case WavEncoding::pcm24: {
      const double c = std::clamp (s, -1.0, 8388607.0 / 8388608.0);
      const auto   v = static_cast<std::uint32_t> (static_cast<std::int32_t> (std::lround (c * 8388608.0)));
      o.push_back (static_cast<unsigned char> (v));
      o.push_back (static_cast<unsigned char> (v >> 8));
      o.push_back (static_cast<unsigned char> (v >> 16));
      break;
    }
    }
  }
  return o;
}

inline void write_wav_float32 (const std::string& path, std::span<const double> samples, std::uint32_t rate)
{
  const auto    bytes = encode_wav (samples, rate);
  std::ofstream f (path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw WavError ("cannot open '" + path + "' for writing");
  }
  f.write (reinterpret_cast<const char*> (bytes.data()), static_cast<std::streamsize> (bytes.size()));
  if (!f) {
    throw WavError ("write to '" + path + "' failed");
  }
}

} // namespace vibxfer
