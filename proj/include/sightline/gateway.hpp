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

// Session gateway: frame ingestion, the tag -> prompt -> generate pipeline,
// answer relay, audio on demand and per-stage timing reports. Transport
// agnostic; gateway_server.hpp puts it behind HTTP.

#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "sightline/backends.hpp"
#include "sightline/config.hpp"
#include "sightline/error.hpp"
#include "sightline/mock_backends.hpp"
#include "sightline/prompt.hpp"
#include "sightline/session.hpp"

namespace sightline {

struct Backends {
  std::shared_ptr<Tagger> tagger;
  std::shared_ptr<VisionLanguageModel> vlm;
  std::shared_ptr<SpeechToText> asr;
  std::shared_ptr<TextToSpeech> tts;
};

/// HTTP clients for every endpoint, except "mock://" URLs which get the
/// in-process mock bound to `fixtures` (required if any role is mocked).
Backends make_backends(const GatewayConfig& config, FixturePtr fixtures = nullptr);

struct ChunkEvent {
  int seq = 0;
  std::string text;
};

struct DoneEvent {
  QueryId query_id;
  StageTimings timings;
};

struct ErrorEvent {
  std::string stage;
  std::string message;
  ErrorCode code = ErrorCode::kProtocol;
};

using ResponseEvent = std::variant<ChunkEvent, DoneEvent, ErrorEvent>;

/// Receives response events in order. Returning false means the consumer
/// has gone away; the pipeline then cancels generation.
using ResponseSink = std::function<bool(const ResponseEvent&)>;

struct TaskTimingRow {
  TaskHint task = TaskHint::kFreeform;
  std::size_t count = 0;
  StageTimings mean;
};

struct StageReport {
  std::vector<TaskTimingRow> rows;

  const TaskTimingRow* row(TaskHint task) const;
  Json to_json() const;
  /// Table in the shape Scene Understanding / Object Localization / Risk
  /// Assessment x (Image Tagging, Vision-Language Inference) in seconds,
  /// with a "Score of 10" column when manual means are supplied.
  std::string render_text(const std::map<TaskHint, double>& manual_scores = {}) const;
};

/// Means per task over completed queries. Throws Error(kEmptyReport) when
/// there are none.
StageReport build_stage_report(const std::vector<std::pair<TaskHint, StageTimings>>& completed);

class Gateway {
 public:
  Gateway(GatewayConfig config, Backends backends, TemplateRegistry templates);
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  const GatewayConfig& config() const { return config_; }

  SessionId create_session();

  struct IngestResult {
    FrameId frame_id;
    TimestampMs captured_at = 0;
  };
  IngestResult ingest_frame(const SessionId& session, std::string content_type, Bytes bytes);

  class QueryTicket;

  /// Admits a query: checks the session and payload and claims the
  /// session's single in-flight slot. Throws Error(kNotFound),
  /// Error(kBusy) or Error(kPrecondition) before any event is produced.
  QueryTicket open_query(const SessionId& session, Modality modality, Bytes payload,
                         std::string content_type = "", std::optional<TaskHint> task = std::nullopt);

  /// open_query followed by QueryTicket::run.
  QueryRecord handle_query(const SessionId& session, Modality modality, Bytes payload, std::string content_type,
                           std::optional<TaskHint> task, const ResponseSink& sink, std::stop_token stop = {});

  /// Synthesized audio for a completed answer, cached per query.
  SynthesizedAudio get_answer_audio(const SessionId& session, const QueryId& query);

  StageReport stage_report(const SessionId& session) const;
  /// Across every session, including ones already evicted.
  StageReport stage_report() const;

  std::optional<QueryRecord> find_record(const SessionId& session, const QueryId& query) const;
  SessionState session_snapshot(const SessionId& session) const;
  std::size_t session_count() const;

  /// Drops sessions idle longer than the TTL (never one with a query in
  /// flight), appending their records to the session log when configured.
  std::size_t evict_expired(TimestampMs now = monotonic_now_ms());

  /// True when every backend answers its ping.
  bool healthy();

 private:
  struct Session;
  std::shared_ptr<Session> find_session(const SessionId& id) const;
  void append_to_log(const SessionState& state);

  GatewayConfig config_;
  Backends backends_;
  TemplateRegistry templates_;

  mutable std::mutex mu_;
  std::unordered_map<SessionId, std::shared_ptr<Session>> sessions_;

  mutable std::mutex archive_mu_;
  std::vector<std::pair<TaskHint, StageTimings>> completed_;

  std::mutex log_mu_;
};

class Gateway::QueryTicket {
 public:
  QueryTicket(QueryTicket&&) noexcept;
  QueryTicket& operator=(QueryTicket&&) noexcept;
  ~QueryTicket();

  const QueryId& query_id() const { return query_id_; }

  /// Runs transcribe (audio only) -> select frame -> tag -> compose prompt
  /// -> generate, relaying chunks to `sink` as they arrive, then a done or
  /// error event. Returns the persisted record. May be called once.
  QueryRecord run(const ResponseSink& sink, std::stop_token stop = {});

 private:
  friend class Gateway;
  QueryTicket(Gateway* gateway, std::shared_ptr<Session> session, QueryId id, Modality modality, Bytes payload,
              std::string content_type, std::optional<TaskHint> task, TimestampMs received_at);
  void release();

  Gateway* gateway_ = nullptr;
  std::shared_ptr<Session> session_;
  QueryId query_id_;
  Modality modality_ = Modality::kText;
  Bytes payload_;
  std::string content_type_;
  std::optional<TaskHint> task_;
  TimestampMs received_at_ = 0;
};

}  // namespace sightline
