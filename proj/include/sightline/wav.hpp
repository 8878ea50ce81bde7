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

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sightline/domain.hpp"

namespace sightline {

struct WavInfo {
  int sample_rate = 0;
  int channels = 0;
  int bits_per_sample = 0;
  std::size_t sample_frames = 0;

  double duration_ms() const {
    return sample_rate == 0 ? 0.0 : 1000.0 * static_cast<double>(sample_frames) / sample_rate;
  }
};

/// 16-bit mono PCM WAV holding a sine tone of the given length.
Bytes make_sine_wav(int duration_ms, int sample_rate = 16000, double frequency_hz = 440.0);

/// Parses a canonical RIFF/WAVE header. Throws Error(kProtocol) if the
/// payload is not a PCM WAV file.
WavInfo parse_wav(std::span<const std::uint8_t> wav);

/// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(std::string_view text);

}  // namespace sightline
