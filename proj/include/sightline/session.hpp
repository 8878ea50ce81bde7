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

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sightline/config.hpp"
#include "sightline/domain.hpp"

namespace sightline {

using FramePtr = std::shared_ptr<const Frame>;

struct QueryRecord {
  UserQuery query;
  FrameId selected_frame;
  TagSet tags;
  PromptBundle prompt;
  AnswerStream answer;
  std::optional<std::string> audio_ref;
  /// Pipeline stage that failed, empty on success.
  std::string failed_stage;
};

void to_json(Json& j, const QueryRecord& v);
void from_json(const Json& j, QueryRecord& v);

/// A user's live interaction context. Mutated only by the gateway, under
/// the owning session's lock.
struct SessionState {
  SessionId session_id;
  GatewayConfig config;
  TimestampMs created_at = 0;
  TimestampMs last_active_at = 0;
  /// Oldest first, captured_at strictly increasing.
  std::deque<FramePtr> frames;
  std::vector<QueryRecord> queries;

  /// Appends a frame stamped max(now, last + 1), evicting the oldest frame
  /// once the buffer holds frame_buffer_capacity entries. Throws
  /// Error(kPrecondition) on an empty payload.
  FramePtr append_frame(std::string content_type, Bytes bytes, TimestampMs now);

  QueryRecord* find_query(const QueryId& id);
  const QueryRecord* find_query(const QueryId& id) const;
};

/// Fresh session with an empty frame buffer and a unique id. Validates the
/// config (Error(kConfig) on violation).
SessionState new_session(const GatewayConfig& config, TimestampMs now = monotonic_now_ms());

/// The frame with the greatest captured_at <= at, or the earliest frame when
/// every frame is newer. Throws Error(kNoFrame) on an empty buffer.
FramePtr select_frame(const SessionState& session, TimestampMs at);

}  // namespace sightline
