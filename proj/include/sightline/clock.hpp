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

#include <chrono>
#include <cstdint>

namespace sightline {

/// Server-monotonic milliseconds since the process clock anchor.
using TimestampMs = std::int64_t;

/// Durations are carried as fractional milliseconds.
using DurationMs = double;

/// Milliseconds elapsed on the steady clock since the first call in this
/// process. Never affected by wall-clock adjustments.
TimestampMs monotonic_now_ms();

/// Stopwatch over the steady clock with sub-millisecond resolution.
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}

  DurationMs elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

  void reset() { start_ = std::chrono::steady_clock::now(); }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Sleeps for a fractional number of milliseconds. Non-positive is a no-op.
void sleep_ms(DurationMs ms);

}  // namespace sightline
