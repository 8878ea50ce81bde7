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

#include "sightline/domain.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "sightline/digest.hpp"
#include "sightline/error.hpp"

namespace sightline {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kProtocol: return "protocol";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kBusy: return "busy";
    case ErrorCode::kNotReady: return "not_ready";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kRange: return "range";
    case ErrorCode::kNoFrame: return "no_frame";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kTranscriptionFailed: return "transcription_failed";
    case ErrorCode::kAnswerFailed: return "answer_failed";
    case ErrorCode::kEmptyReport: return "empty_report";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kUnavailable: return "unavailable";
  }
  return "unknown";
}

std::optional<ErrorCode> parse_error_code(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::kUnavailable); ++i) {
    auto code = static_cast<ErrorCode>(i);
    if (to_string(code) == name) return code;
  }
  return std::nullopt;
}

std::string_view to_string(Modality m) { return m == Modality::kText ? "text" : "audio"; }

Modality parse_modality(std::string_view s) {
  if (s == "text") return Modality::kText;
  if (s == "audio") return Modality::kAudio;
  throw Error(ErrorCode::kValidation, "unknown modality '" + std::string(s) + "'");
}

std::string_view to_string(TaskHint t) {
  switch (t) {
    case TaskHint::kSceneUnderstanding: return "scene_understanding";
    case TaskHint::kObjectLocalization: return "object_localization";
    case TaskHint::kRiskAssessment: return "risk_assessment";
    case TaskHint::kFreeform: return "freeform";
  }
  return "freeform";
}

TaskHint parse_task_hint(std::string_view s) {
  for (auto t : {TaskHint::kSceneUnderstanding, TaskHint::kObjectLocalization,
                 TaskHint::kRiskAssessment, TaskHint::kFreeform}) {
    if (s == to_string(t)) return t;
  }
  throw Error(ErrorCode::kValidation, "unknown task '" + std::string(s) + "'");
}

std::string_view task_label(TaskHint t) {
  switch (t) {
    case TaskHint::kSceneUnderstanding: return "Scene Understanding";
    case TaskHint::kObjectLocalization: return "Object Localization";
    case TaskHint::kRiskAssessment: return "Risk Assessment";
    case TaskHint::kFreeform: return "Freeform";
  }
  return "Freeform";
}

std::string_view to_string(StreamStatus s) {
  switch (s) {
    case StreamStatus::kStreaming: return "streaming";
    case StreamStatus::kComplete: return "complete";
    case StreamStatus::kFailed: return "failed";
  }
  return "failed";
}

StreamStatus parse_stream_status(std::string_view s) {
  if (s == "streaming") return StreamStatus::kStreaming;
  if (s == "complete") return StreamStatus::kComplete;
  if (s == "failed") return StreamStatus::kFailed;
  throw Error(ErrorCode::kValidation, "unknown stream status '" + std::string(s) + "'");
}

void UserQuery::validate() const {
  if (text.empty()) throw Error(ErrorCode::kValidation, "query text is empty");
  if ((modality == Modality::kAudio) != transcription.has_value()) {
    throw Error(ErrorCode::kValidation, "audio queries need a transcription record, text queries none");
  }
}

std::vector<std::string> normalize_tags(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& tag : raw) {
    auto first = std::find_if_not(tag.begin(), tag.end(), [](unsigned char c) { return std::isspace(c); });
    auto last = std::find_if_not(tag.rbegin(), tag.rend(), [](unsigned char c) { return std::isspace(c); }).base();
    if (first >= last) continue;
    std::string t(first, last);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (seen.insert(t).second) out.push_back(std::move(t));
  }
  return out;
}

void GenerationParams::validate() const {
  if (min_length < 1) throw Error(ErrorCode::kConfig, "generation.min_length must be >= 1");
  if (max_length < min_length) throw Error(ErrorCode::kConfig, "generation.max_length must be >= min_length");
  if (beam_width < 1) throw Error(ErrorCode::kConfig, "generation.beam_width must be >= 1");
  if (!(length_penalty > 0)) throw Error(ErrorCode::kConfig, "generation.length_penalty must be > 0");
  if (!(repetition_penalty > 0)) throw Error(ErrorCode::kConfig, "generation.repetition_penalty must be > 0");
  if (!(temperature > 0)) throw Error(ErrorCode::kConfig, "generation.temperature must be > 0");
}

void StageTimings::validate() const {
  for (const auto& v : {asr_ms, tagging_ms, first_token_ms, total_generation_ms, tts_ms}) {
    if (v && *v < 0) throw Error(ErrorCode::kValidation, "stage timing is negative");
  }
  if (first_token_ms && total_generation_ms && *first_token_ms > *total_generation_ms) {
    throw Error(ErrorCode::kValidation, "first_token_ms exceeds total_generation_ms");
  }
}

std::string AnswerStream::concatenated() const {
  std::string out;
  for (const auto& c : chunks) out += c.text;
  return out;
}

void ManualScore::validate() const {
  if (!(score >= 0 && score <= 10)) {
    throw Error(ErrorCode::kRange, "manual score for '" + item_id + "' outside [0,10]: " + std::to_string(score));
  }
}

namespace {

template <typename T>
void put_optional(Json& j, const char* key, const std::optional<T>& v) {
  if (v) {
    j[key] = *v;
  } else {
    j[key] = nullptr;
  }
}

template <typename T>
std::optional<T> get_optional(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->template get<T>();
}

template <typename Id>
Id get_id(const Json& j, const char* key) {
  return Id::parse(j.at(key).get<std::string>());
}

}  // namespace

void to_json(Json& j, const Frame& v) {
  j = Json::object();
  j["frame_id"] = v.frame_id.str();
  j["session_id"] = v.session_id.str();
  j["captured_at"] = v.captured_at;
  j["content_type"] = v.content_type;
  j["bytes"] = base64_encode(v.bytes);
}

void from_json(const Json& j, Frame& v) {
  v.frame_id = get_id<FrameId>(j, "frame_id");
  v.session_id = get_id<SessionId>(j, "session_id");
  v.captured_at = j.at("captured_at").get<TimestampMs>();
  v.content_type = j.at("content_type").get<std::string>();
  v.bytes = base64_decode(j.at("bytes").get<std::string>());
}

void to_json(Json& j, const TranscriptionRecord& v) {
  j = Json::object();
  j["content_type"] = v.content_type;
  j["text"] = v.text;
  j["asr_ms"] = v.asr_ms;
}

void from_json(const Json& j, TranscriptionRecord& v) {
  v.content_type = j.at("content_type").get<std::string>();
  v.text = j.at("text").get<std::string>();
  v.asr_ms = j.at("asr_ms").get<DurationMs>();
}

void to_json(Json& j, const UserQuery& v) {
  j = Json::object();
  j["query_id"] = v.query_id.str();
  j["session_id"] = v.session_id.str();
  j["received_at"] = v.received_at;
  j["modality"] = to_string(v.modality);
  j["text"] = v.text;
  if (v.task_hint) {
    j["task_hint"] = to_string(*v.task_hint);
  } else {
    j["task_hint"] = nullptr;
  }
  put_optional(j, "transcription", v.transcription);
}

void from_json(const Json& j, UserQuery& v) {
  v.query_id = get_id<QueryId>(j, "query_id");
  v.session_id = get_id<SessionId>(j, "session_id");
  v.received_at = j.at("received_at").get<TimestampMs>();
  v.modality = parse_modality(j.at("modality").get<std::string>());
  v.text = j.at("text").get<std::string>();
  auto hint = get_optional<std::string>(j, "task_hint");
  v.task_hint = hint ? std::optional(parse_task_hint(*hint)) : std::nullopt;
  v.transcription = get_optional<TranscriptionRecord>(j, "transcription");
}

void to_json(Json& j, const TagSet& v) {
  j = Json::object();
  j["tags"] = v.tags;
  j["source_frame"] = v.source_frame.str();
  j["latency_ms"] = v.latency_ms;
}

void from_json(const Json& j, TagSet& v) {
  v.tags = j.at("tags").get<std::vector<std::string>>();
  v.source_frame = get_id<FrameId>(j, "source_frame");
  v.latency_ms = j.at("latency_ms").get<DurationMs>();
}

void to_json(Json& j, const PromptBundle& v) {
  j = Json::object();
  j["tag_sentence"] = v.tag_sentence;
  j["template_id"] = v.template_id;
  j["user_query"] = v.user_query;
  j["final_prompt"] = v.final_prompt;
}

void from_json(const Json& j, PromptBundle& v) {
  v.tag_sentence = j.at("tag_sentence").get<std::string>();
  v.template_id = j.at("template_id").get<std::string>();
  v.user_query = j.at("user_query").get<std::string>();
  v.final_prompt = j.at("final_prompt").get<std::string>();
}

void to_json(Json& j, const GenerationParams& v) {
  j = Json::object();
  j["min_length"] = v.min_length;
  j["max_length"] = v.max_length;
  j["beam_width"] = v.beam_width;
  j["length_penalty"] = v.length_penalty;
  j["repetition_penalty"] = v.repetition_penalty;
  j["temperature"] = v.temperature;
}

void from_json(const Json& j, GenerationParams& v) {
  GenerationParams d;
  v.min_length = j.value("min_length", d.min_length);
  v.max_length = j.value("max_length", d.max_length);
  v.beam_width = j.value("beam_width", d.beam_width);
  v.length_penalty = j.value("length_penalty", d.length_penalty);
  v.repetition_penalty = j.value("repetition_penalty", d.repetition_penalty);
  v.temperature = j.value("temperature", d.temperature);
}

void to_json(Json& j, const Chunk& v) {
  j = Json::object();
  j["seq_no"] = v.seq_no;
  j["text"] = v.text;
  j["at"] = v.at;
}

void from_json(const Json& j, Chunk& v) {
  v.seq_no = j.at("seq_no").get<int>();
  v.text = j.at("text").get<std::string>();
  v.at = j.at("at").get<TimestampMs>();
}

void to_json(Json& j, const StageTimings& v) {
  j = Json::object();
  put_optional(j, "asr_ms", v.asr_ms);
  put_optional(j, "tagging_ms", v.tagging_ms);
  put_optional(j, "first_token_ms", v.first_token_ms);
  put_optional(j, "total_generation_ms", v.total_generation_ms);
  put_optional(j, "tts_ms", v.tts_ms);
}

void from_json(const Json& j, StageTimings& v) {
  v.asr_ms = get_optional<DurationMs>(j, "asr_ms");
  v.tagging_ms = get_optional<DurationMs>(j, "tagging_ms");
  v.first_token_ms = get_optional<DurationMs>(j, "first_token_ms");
  v.total_generation_ms = get_optional<DurationMs>(j, "total_generation_ms");
  v.tts_ms = get_optional<DurationMs>(j, "tts_ms");
}

void to_json(Json& j, const AnswerStream& v) {
  j = Json::object();
  j["query_id"] = v.query_id.str();
  j["chunks"] = v.chunks;
  j["final_text"] = v.final_text;
  j["timings"] = v.timings;
  j["status"] = to_string(v.status);
  j["error"] = v.error;
}

void from_json(const Json& j, AnswerStream& v) {
  v.query_id = get_id<QueryId>(j, "query_id");
  v.chunks = j.at("chunks").get<std::vector<Chunk>>();
  v.final_text = j.at("final_text").get<std::string>();
  v.timings = j.at("timings").get<StageTimings>();
  v.status = parse_stream_status(j.at("status").get<std::string>());
  v.error = j.value("error", std::string());
}

void to_json(Json& j, const ManualScore& v) {
  j = Json::object();
  j["item_id"] = v.item_id;
  j["task"] = to_string(v.task);
  j["score"] = v.score;
}

void from_json(const Json& j, ManualScore& v) {
  v.item_id = j.at("item_id").get<std::string>();
  v.task = parse_task_hint(j.at("task").get<std::string>());
  v.score = j.at("score").get<double>();
}

}  // namespace sightline
