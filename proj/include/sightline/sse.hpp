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

#include <string>
#include <string_view>
#include <vector>

namespace sightline {

/// One server-sent event. `event` is empty for the default "message" type.
struct SseEvent {
  std::string event;
  std::string data;
};

/// Renders one event in SSE framing, terminated by a blank line.
std::string format_sse(std::string_view event, std::string_view data);

/// Incremental SSE decoder. Bytes may arrive split at any position; events
/// are returned once their terminating blank line has been seen.
class SseParser {
 public:
  std::vector<SseEvent> feed(std::string_view bytes);

  /// True when bytes of an unterminated event are still buffered.
  bool has_partial() const { return !buffer_.empty() || !pending_.data.empty() || has_data_; }

 private:
  void handle_line(std::string_view line, std::vector<SseEvent>& out);

  std::string buffer_;
  SseEvent pending_;
  bool has_data_ = false;
};

}  // namespace sightline
