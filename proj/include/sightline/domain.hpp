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

// Shared value types for the pipeline, backends and evaluation harness.
// Everything here is a plain value; once built it is not mutated, so
// instances can be shared across threads freely.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sightline/clock.hpp"
#include "sightline/ids.hpp"

namespace sightline {

using Bytes = std::vector<std::uint8_t>;
using Json = nlohmann::ordered_json;

enum class Modality { kText, kAudio };

enum class TaskHint { kSceneUnderstanding, kObjectLocalization, kRiskAssessment, kFreeform };

std::string_view to_string(Modality m);
std::string_view to_string(TaskHint t);
/// Throws Error(kValidation) on unknown names.
Modality parse_modality(std::string_view s);
TaskHint parse_task_hint(std::string_view s);

/// Human-facing row label, e.g. "Risk Assessment".
std::string_view task_label(TaskHint t);

struct Frame {
  FrameId frame_id;
  SessionId session_id;
  TimestampMs captured_at = 0;
  std::string content_type;
  Bytes bytes;

  bool operator==(const Frame&) const = default;
};

struct TranscriptionRecord {
  std::string content_type;
  std::string text;
  DurationMs asr_ms = 0;

  bool operator==(const TranscriptionRecord&) const = default;
};

struct UserQuery {
  QueryId query_id;
  SessionId session_id;
  TimestampMs received_at = 0;
  Modality modality = Modality::kText;
  std::string text;
  std::optional<TaskHint> task_hint;
  // Present iff modality == kAudio.
  std::optional<TranscriptionRecord> transcription;

  bool operator==(const UserQuery&) const = default;

  /// Throws Error(kValidation) if text is empty or the audio/transcription
  /// pairing is broken.
  void validate() const;
};

struct TagSet {
  std::vector<std::string> tags;
  FrameId source_frame;
  DurationMs latency_ms = 0;

  bool operator==(const TagSet&) const = default;
};

/// Lowercases and trims each tag, drops empty ones and later duplicates.
/// First-occurrence order is kept.
std::vector<std::string> normalize_tags(const std::vector<std::string>& raw);

struct PromptBundle {
  std::string tag_sentence;
  std::string template_id;
  std::string user_query;
  std::string final_prompt;

  bool operator==(const PromptBundle&) const = default;
};

struct GenerationParams {
  int min_length = 1;
  int max_length = 200;
  int beam_width = 5;
  double length_penalty = 1.0;
  double repetition_penalty = 3.0;
  double temperature = 1.0;

  bool operator==(const GenerationParams&) const = default;

  /// Throws Error(kConfig) when an invariant is violated.
  void validate() const;
};

struct Chunk {
  int seq_no = 0;
  std::string text;
  TimestampMs at = 0;

  bool operator==(const Chunk&) const = default;
};

enum class StreamStatus { kStreaming, kComplete, kFailed };
std::string_view to_string(StreamStatus s);
StreamStatus parse_stream_status(std::string_view s);

struct StageTimings {
  std::optional<DurationMs> asr_ms;
  std::optional<DurationMs> tagging_ms;
  std::optional<DurationMs> first_token_ms;
  std::optional<DurationMs> total_generation_ms;
  std::optional<DurationMs> tts_ms;

  bool operator==(const StageTimings&) const = default;

  void validate() const;
};

struct AnswerStream {
  QueryId query_id;
  std::vector<Chunk> chunks;
  std::string final_text;
  StageTimings timings;
  StreamStatus status = StreamStatus::kStreaming;
  std::string error;

  bool operator==(const AnswerStream&) const = default;

  /// Concatenation of all chunk texts received so far.
  std::string concatenated() const;
};

struct ManualScore {
  std::string item_id;
  TaskHint task = TaskHint::kFreeform;
  double score = 0;

  bool operator==(const ManualScore&) const = default;

  /// Throws Error(kRange) unless 0 <= score <= 10.
  void validate() const;
};

// JSON forms. Field order is fixed so serialization is canonical and
// serialize(parse(serialize(x))) is byte-identical to serialize(x).
void to_json(Json& j, const Frame& v);
void from_json(const Json& j, Frame& v);
void to_json(Json& j, const TranscriptionRecord& v);
void from_json(const Json& j, TranscriptionRecord& v);
void to_json(Json& j, const UserQuery& v);
void from_json(const Json& j, UserQuery& v);
void to_json(Json& j, const TagSet& v);
void from_json(const Json& j, TagSet& v);
void to_json(Json& j, const PromptBundle& v);
void from_json(const Json& j, PromptBundle& v);
void to_json(Json& j, const GenerationParams& v);
void from_json(const Json& j, GenerationParams& v);
void to_json(Json& j, const Chunk& v);
void from_json(const Json& j, Chunk& v);
void to_json(Json& j, const StageTimings& v);
void from_json(const Json& j, StageTimings& v);
void to_json(Json& j, const AnswerStream& v);
void from_json(const Json& j, AnswerStream& v);
void to_json(Json& j, const ManualScore& v);
void from_json(const Json& j, ManualScore& v);

}  // namespace sightline
