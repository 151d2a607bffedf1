// Copyright 2026  salign authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "salign/dsp.hpp"
#include "salign/error.hpp"

// RIFF/WAVE ingestion: PCM16 and IEEE float32, any channel count (averaged
// to mono).  Writing is PCM16 mono, used for fixtures and round-trips.

namespace salign {

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline const char* wav_format_name(std::uint16_t tag) {
  switch (tag) {
    case 0x0001: return "PCM";
    case 0x0003: return "IEEE_FLOAT";
    case 0x0006: return "ALAW";
    case 0x0007: return "MULAW";
    case 0xFFFE: return "EXTENSIBLE";
    default: return "unknown";
  }
}

}  // namespace detail

/// Linear-interpolation resampler.  Quality is deliberately basic; feed
/// correctly-rated audio when fidelity matters.
inline Waveform resample_linear(const Waveform& w, int target_rate) {
  if (target_rate <= 0) throw_error("target sample rate must be positive");
  if (w.sample_rate == target_rate) return w;
  if (w.samples.empty()) return Waveform{{}, target_rate};
  Waveform out;
  out.sample_rate = target_rate;
  const double ratio = static_cast<double>(w.sample_rate) / target_rate;
  const auto n_out = static_cast<std::size_t>(
      std::floor(static_cast<double>(w.samples.size() - 1) / ratio)) + 1;
  out.samples.resize(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    const double pos = i * ratio;
    const auto idx = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(idx);
    const double a = w.samples[idx];
    const double b = (idx + 1 < w.samples.size()) ? w.samples[idx + 1] : a;
    out.samples[i] = a + (b - a) * frac;
  }
  return out;
}

/// Reads a RIFF/WAVE file; multichannel input is averaged to mono.  When
/// target_rate > 0 and differs from the header rate, resamples linearly and
/// warns on stderr.
inline Waveform load_wav(const std::string& path, int target_rate = 0) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io_error("cannot open wav file '", path, "'");
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0)
    throw_error("'", path, "' is not a RIFF/WAVE file");

  std::uint16_t format_tag = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  const unsigned char* pcm = nullptr;
  std::size_t pcm_bytes = 0;

  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const char* id = reinterpret_cast<const char*>(data.data() + pos);
    const std::uint32_t chunk_size = detail::read_u32(data.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_size > data.size())
      throw_error("truncated chunk '", std::string(id, 4), "' in '", path, "'");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw_error("fmt chunk too small in '", path, "'");
      format_tag = detail::read_u16(data.data() + body);
      channels = detail::read_u16(data.data() + body + 2);
      rate = detail::read_u32(data.data() + body + 4);
      bits = detail::read_u16(data.data() + body + 14);
      if (format_tag == 0xFFFE && chunk_size >= 40)  // extensible: real tag in the GUID
        format_tag = detail::read_u16(data.data() + body + 24);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      pcm = data.data() + body;
      pcm_bytes = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }
  if (!have_fmt) throw_error("missing fmt chunk in '", path, "'");
  if (pcm == nullptr) throw_error("missing data chunk in '", path, "'");
  if (channels == 0 || rate == 0) throw_error("bad fmt chunk in '", path, "'");

  const bool pcm16 = (format_tag == 0x0001 && bits == 16);
  const bool f32 = (format_tag == 0x0003 && bits == 32);
  if (!pcm16 && !f32)
    throw_error("unsupported codec in '", path, "': format tag ", format_tag, " (",
                detail::wav_format_name(format_tag), "), ", bits, " bits; expected PCM16 or float32");

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t n_frames = pcm_bytes / (bytes_per_sample * channels);
  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  w.samples.resize(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (std::uint16_t c = 0; c < channels; ++c) {
      const unsigned char* p = pcm + (i * channels + c) * bytes_per_sample;
      if (pcm16) {
        const auto v = static_cast<std::int16_t>(detail::read_u16(p));
        acc += static_cast<double>(v) / 32768.0;
      } else {
        float f;
        std::memcpy(&f, p, 4);
        acc += static_cast<double>(f);
      }
    }
    w.samples[i] = acc / channels;
  }

  if (target_rate > 0 && target_rate != w.sample_rate) {
    std::cerr << "salign: resampling '" << path << "' from " << w.sample_rate << " Hz to "
              << target_rate << " Hz (linear)\n";
    w = resample_linear(w, target_rate);
  }
  return w;
}

/// Writes mono PCM16.  Samples are clipped to [-1, 1].
inline void save_wav(const std::string& path, const Waveform& w) {
  if (w.sample_rate <= 0) throw_error("cannot write wav with sample rate ", w.sample_rate);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io_error("cannot create wav file '", path, "'");
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
  auto put_u32 = [&](std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<char*>(b), 4);
  };
  auto put_u16 = [&](std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<char*>(b), 2);
  };
  out.write("RIFF", 4);
  put_u32(36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(1);  // mono
  put_u32(static_cast<std::uint32_t>(w.sample_rate));
  put_u32(static_cast<std::uint32_t>(w.sample_rate) * 2);
  put_u16(2);
  put_u16(16);
  out.write("data", 4);
  put_u32(data_bytes);
  for (double s : w.samples) {
    const double clipped = std::clamp(s, -1.0, 1.0);
    const auto v = static_cast<std::int16_t>(std::lround(clipped * 32767.0));
    put_u16(static_cast<std::uint16_t>(v));
  }
  if (!out) throw_io_error("failed writing wav file '", path, "'");
}

}  // namespace salign
