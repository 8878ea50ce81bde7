// Copyright 2026 The Sightline Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sightline/wav.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sightline/error.hpp"

namespace sightline {

namespace {

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_tag(Bytes& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

std::uint32_t get_u32(std::span<const std::uint8_t> d, std::size_t at) {
  return static_cast<std::uint32_t>(d[at]) | (static_cast<std::uint32_t>(d[at + 1]) << 8) |
         (static_cast<std::uint32_t>(d[at + 2]) << 16) | (static_cast<std::uint32_t>(d[at + 3]) << 24);
}

std::uint16_t get_u16(std::span<const std::uint8_t> d, std::size_t at) {
  return static_cast<std::uint16_t>(d[at] | (d[at + 1] << 8));
}

bool tag_is(std::span<const std::uint8_t> d, std::size_t at, const char* tag) {
  return std::equal(tag, tag + 4, d.begin() + static_cast<std::ptrdiff_t>(at));
}

}  // namespace

Bytes make_sine_wav(int duration_ms, int sample_rate, double frequency_hz) {
  const auto frames = static_cast<std::uint32_t>(
      static_cast<std::int64_t>(std::max(duration_ms, 0)) * sample_rate / 1000);
  const std::uint32_t data_bytes = frames * 2;
  Bytes out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(sample_rate));
  put_u32(out, static_cast<std::uint32_t>(sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (std::uint32_t i = 0; i < frames; ++i) {
    double s = 0.3 * std::sin(2.0 * std::numbers::pi * frequency_hz * i / sample_rate);
    auto v = static_cast<std::int16_t>(std::lround(s * 32767.0));
    put_u16(out, static_cast<std::uint16_t>(v));
  }
  return out;
}

WavInfo parse_wav(std::span<const std::uint8_t> wav) {
  if (wav.size() < 12 || !tag_is(wav, 0, "RIFF") || !tag_is(wav, 8, "WAVE")) {
    throw Error(ErrorCode::kProtocol, "not a RIFF/WAVE payload");
  }
  WavInfo info;
  bool have_fmt = false;
  std::size_t at = 12;
  while (at + 8 <= wav.size()) {
    std::uint32_t size = get_u32(wav, at + 4);
    std::size_t body = at + 8;
    if (body + size > wav.size()) throw Error(ErrorCode::kProtocol, "truncated WAV chunk");
    if (tag_is(wav, at, "fmt ")) {
      if (size < 16 || get_u16(wav, body) != 1) throw Error(ErrorCode::kProtocol, "WAV is not PCM");
      info.channels = get_u16(wav, body + 2);
      info.sample_rate = static_cast<int>(get_u32(wav, body + 4));
      info.bits_per_sample = get_u16(wav, body + 14);
      have_fmt = true;
    } else if (tag_is(wav, at, "data")) {
      if (!have_fmt || info.channels == 0 || info.bits_per_sample == 0) {
        throw Error(ErrorCode::kProtocol, "WAV data chunk precedes fmt chunk");
      }
      info.sample_frames = size / (static_cast<std::size_t>(info.channels) * (info.bits_per_sample / 8));
      return info;
    }
    at = body + size + (size & 1);
  }
  throw Error(ErrorCode::kProtocol, "WAV has no data chunk");
}

std::size_t utf8_length(std::string_view text) {
  return static_cast<std::size_t>(
      std::count_if(text.begin(), text.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xc0) != 0x80; }));
}

}  // namespace sightline
