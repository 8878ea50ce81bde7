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

#include "sightline/gateway.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "sightline/error.hpp"
#include "sightline/http_backends.hpp"

namespace sightline {

struct Gateway::Session {
  std::mutex mu;
  SessionState state;
  std::atomic<bool> busy{false};
  std::map<QueryId, SynthesizedAudio> audio;
};

namespace {

bool is_mock(const BackendEndpoint& ep) { return ep.base_url.rfind("mock://", 0) == 0; }

constexpr TaskHint kReportTasks[] = {TaskHint::kSceneUnderstanding, TaskHint::kObjectLocalization,
                                     TaskHint::kRiskAssessment, TaskHint::kFreeform};

struct MeanAccumulator {
  double sum = 0;
  std::size_t n = 0;
  void add(const std::optional<DurationMs>& v) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  std::optional<DurationMs> mean() const {
    return n == 0 ? std::nullopt : std::optional(sum / static_cast<double>(n));
  }
};

struct StageFailure {
  std::string message;
  ErrorCode code;
};

// Runs one pipeline stage, turning any exception into a StageFailure.
template <typename F>
std::optional<StageFailure> guarded(F&& body) {
  try {
    body();
  } catch (const Error& e) {
    return StageFailure{e.what(), e.code()};
  } catch (const std::exception& e) {
    return StageFailure{e.what(), ErrorCode::kProtocol};
  }
  return std::nullopt;
}

std::string seconds(const std::optional<DurationMs>& ms) {
  if (!ms) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *ms / 1000.0);
  return buf;
}

}  // namespace

Backends make_backends(const GatewayConfig& config, FixturePtr fixtures) {
  config.validate();
  auto need_fixtures = [&](const BackendEndpoint& ep) {
    if (!fixtures) {
      throw Error(ErrorCode::kConfig, "role '" + std::string(to_string(ep.role)) + "' is mocked but no fixtures were given");
    }
  };
  Backends b;
  if (const auto& ep = config.endpoint(BackendRole::kTagger); is_mock(ep)) {
    need_fixtures(ep);
    b.tagger = std::make_shared<MockTagger>(fixtures, ep.timeout_ms);
  } else {
    b.tagger = std::make_shared<HttpTagger>(ep);
  }
  if (const auto& ep = config.endpoint(BackendRole::kVlm); is_mock(ep)) {
    need_fixtures(ep);
    b.vlm = std::make_shared<MockVisionLanguageModel>(fixtures, ep.timeout_ms);
  } else {
    b.vlm = std::make_shared<HttpVisionLanguageModel>(ep);
  }
  if (const auto& ep = config.endpoint(BackendRole::kAsr); is_mock(ep)) {
    need_fixtures(ep);
    b.asr = std::make_shared<MockSpeechToText>(fixtures, ep.timeout_ms);
  } else {
    b.asr = std::make_shared<HttpSpeechToText>(ep);
  }
  if (const auto& ep = config.endpoint(BackendRole::kTts); is_mock(ep)) {
    b.tts = std::make_shared<MockTextToSpeech>(fixtures, ep.timeout_ms);
  } else {
    b.tts = std::make_shared<HttpTextToSpeech>(ep);
  }
  return b;
}

const TaskTimingRow* StageReport::row(TaskHint task) const {
  for (const auto& r : rows) {
    if (r.task == task) return &r;
  }
  return nullptr;
}

Json StageReport::to_json() const {
  Json out = Json::array();
  for (const auto& r : rows) {
    Json row = Json::object();
    row["task"] = to_string(r.task);
    row["label"] = task_label(r.task);
    row["count"] = r.count;
    row["mean"] = r.mean;
    out.push_back(std::move(row));
  }
  return Json{{"rows", std::move(out)}};
}

std::string StageReport::render_text(const std::map<TaskHint, double>& manual_scores) const {
  const bool with_scores = !manual_scores.empty();
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-20s | %7s | %17s | %29s", "Tasks", "Queries", "Image Tagging (s)",
                "Vision-Language Inference (s)");
  out += line;
  if (with_scores) out += " | Score of 10";
  out += '\n';
  for (auto task : kReportTasks) {
    const auto* r = row(task);
    if (!r && task == TaskHint::kFreeform) continue;
    std::snprintf(line, sizeof(line), "%-20s | %7zu | %17s | %29s", std::string(task_label(task)).c_str(),
                  r ? r->count : 0, seconds(r ? r->mean.tagging_ms : std::nullopt).c_str(),
                  seconds(r ? r->mean.first_token_ms : std::nullopt).c_str());
    out += line;
    if (with_scores) {
      auto it = manual_scores.find(task);
      if (it == manual_scores.end()) {
        out += " | n/a";
      } else {
        std::snprintf(line, sizeof(line), " | %.2f", it->second);
        out += line;
      }
    }
    out += '\n';
  }
  return out;
}

StageReport build_stage_report(const std::vector<std::pair<TaskHint, StageTimings>>& completed) {
  if (completed.empty()) throw Error(ErrorCode::kEmptyReport, "no completed queries to report");
  StageReport report;
  for (auto task : kReportTasks) {
    MeanAccumulator asr, tag, first, total, tts;
    std::size_t n = 0;
    for (const auto& [t, timings] : completed) {
      if (t != task) continue;
      ++n;
      asr.add(timings.asr_ms);
      tag.add(timings.tagging_ms);
      first.add(timings.first_token_ms);
      total.add(timings.total_generation_ms);
      tts.add(timings.tts_ms);
    }
    if (n == 0) continue;
    report.rows.push_back(TaskTimingRow{task, n, StageTimings{asr.mean(), tag.mean(), first.mean(), total.mean(), tts.mean()}});
  }
  return report;
}

Gateway::Gateway(GatewayConfig config, Backends backends, TemplateRegistry templates)
    : config_(std::move(config)), backends_(std::move(backends)), templates_(std::move(templates)) {
  config_.validate();
  if (!backends_.tagger || !backends_.vlm || !backends_.asr || !backends_.tts) {
    throw Error(ErrorCode::kConfig, "gateway needs all four backends");
  }
  templates_.set_task_mapping(config_.task_templates);
  // Fail at startup, not on the first query, if any task lacks a template.
  for (auto task : kReportTasks) templates_.select_template(task);
}

Gateway::~Gateway() = default;

SessionId Gateway::create_session() {
  evict_expired();
  auto s = std::make_shared<Session>();
  s->state = new_session(config_);
  auto id = s->state.session_id;
  std::lock_guard lock(mu_);
  sessions_.emplace(id, std::move(s));
  return id;
}

std::shared_ptr<Gateway::Session> Gateway::find_session(const SessionId& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::kNotFound, "unknown session " + id.str());
  return it->second;
}

Gateway::IngestResult Gateway::ingest_frame(const SessionId& session, std::string content_type, Bytes bytes) {
  auto s = find_session(session);
  if (bytes.empty()) throw Error(ErrorCode::kPrecondition, "frame payload is empty");
  std::lock_guard lock(s->mu);
  auto now = monotonic_now_ms();
  auto frame = s->state.append_frame(std::move(content_type), std::move(bytes), now);
  s->state.last_active_at = now;
  return IngestResult{frame->frame_id, frame->captured_at};
}

Gateway::QueryTicket Gateway::open_query(const SessionId& session, Modality modality, Bytes payload,
                                         std::string content_type, std::optional<TaskHint> task) {
  auto received_at = monotonic_now_ms();
  auto s = find_session(session);
  if (payload.empty()) throw Error(ErrorCode::kPrecondition, "query payload is empty");
  bool expected = false;
  if (!s->busy.compare_exchange_strong(expected, true)) {
    throw Error(ErrorCode::kBusy, "session " + session.str() + " already has a query in flight");
  }
  {
    std::lock_guard lock(s->mu);
    // A query never predates a frame that was ingested before it arrived.
    if (!s->state.frames.empty()) received_at = std::max(received_at, s->state.frames.back()->captured_at);
    s->state.last_active_at = received_at;
  }
  return QueryTicket(this, std::move(s), QueryId::generate(), modality, std::move(payload), std::move(content_type),
                     task, received_at);
}

QueryRecord Gateway::handle_query(const SessionId& session, Modality modality, Bytes payload, std::string content_type,
                                  std::optional<TaskHint> task, const ResponseSink& sink, std::stop_token stop) {
  auto ticket = open_query(session, modality, std::move(payload), std::move(content_type), task);
  return ticket.run(sink, stop);
}

Gateway::QueryTicket::QueryTicket(Gateway* gateway, std::shared_ptr<Session> session, QueryId id, Modality modality,
                                  Bytes payload, std::string content_type, std::optional<TaskHint> task,
                                  TimestampMs received_at)
    : gateway_(gateway),
      session_(std::move(session)),
      query_id_(id),
      modality_(modality),
      payload_(std::move(payload)),
      content_type_(std::move(content_type)),
      task_(task),
      received_at_(received_at) {}

Gateway::QueryTicket::QueryTicket(QueryTicket&& o) noexcept
    : gateway_(o.gateway_),
      session_(std::move(o.session_)),
      query_id_(o.query_id_),
      modality_(o.modality_),
      payload_(std::move(o.payload_)),
      content_type_(std::move(o.content_type_)),
      task_(o.task_),
      received_at_(o.received_at_) {
  o.session_.reset();
}

Gateway::QueryTicket& Gateway::QueryTicket::operator=(QueryTicket&& o) noexcept {
  if (this != &o) {
    release();
    gateway_ = o.gateway_;
    session_ = std::move(o.session_);
    query_id_ = o.query_id_;
    modality_ = o.modality_;
    payload_ = std::move(o.payload_);
    content_type_ = std::move(o.content_type_);
    task_ = o.task_;
    received_at_ = o.received_at_;
    o.session_.reset();
  }
  return *this;
}

Gateway::QueryTicket::~QueryTicket() { release(); }

void Gateway::QueryTicket::release() {
  if (session_) {
    {
      std::lock_guard lock(session_->mu);
      session_->state.last_active_at = monotonic_now_ms();
    }
    session_->busy.store(false);
    session_.reset();
  }
}

QueryRecord Gateway::QueryTicket::run(const ResponseSink& sink, std::stop_token stop) {
  if (!session_) throw Error(ErrorCode::kPrecondition, "query ticket was already used");
  auto session = session_;
  Gateway& gw = *gateway_;

  QueryRecord rec;
  rec.query.query_id = query_id_;
  rec.query.session_id = session->state.session_id;
  rec.query.received_at = received_at_;
  rec.query.modality = modality_;
  rec.query.task_hint = task_;
  rec.answer.query_id = query_id_;
  rec.answer.status = StreamStatus::kStreaming;
  {
    std::lock_guard lock(session->mu);
    session->state.queries.push_back(rec);
  }

  auto persist = [&] {
    std::lock_guard lock(session->mu);
    if (auto* stored = session->state.find_query(query_id_)) *stored = rec;
  };
  bool consumer_alive = true;
  auto emit = [&](const ResponseEvent& ev) {
    if (consumer_alive && sink) consumer_alive = sink(ev);
    return consumer_alive;
  };
  auto fail = [&](const std::string& stage, const StageFailure& failure) {
    rec.failed_stage = stage;
    rec.answer.status = StreamStatus::kFailed;
    rec.answer.error = failure.message;
    rec.answer.final_text = rec.answer.concatenated();
    persist();
    emit(ErrorEvent{stage, failure.message, failure.code});
    release();
    return rec;
  };

  if (modality_ == Modality::kAudio) {
    if (auto err = guarded([&] {
          auto t = gw.backends_.asr->transcribe(payload_, content_type_);
          if (t.text.empty()) throw Error(ErrorCode::kTranscriptionFailed, "transcript is empty");
          rec.answer.timings.asr_ms = t.asr_ms;
          rec.query.transcription = TranscriptionRecord{content_type_, t.text, t.asr_ms};
          rec.query.text = std::move(t.text);
        })) {
      return fail("asr", *err);
    }
  } else {
    rec.query.text.assign(payload_.begin(), payload_.end());
  }

  FramePtr frame;
  if (auto err = guarded([&] {
        rec.query.validate();
        std::lock_guard lock(session->mu);
        frame = select_frame(session->state, received_at_);
      })) {
    return fail("frame", *err);
  }
  rec.selected_frame = frame->frame_id;

  if (auto err = guarded([&] {
        rec.tags = gw.backends_.tagger->tag_image(*frame);
        rec.answer.timings.tagging_ms = rec.tags.latency_ms;
      })) {
    return fail("tagging", *err);
  }

  if (auto err = guarded([&] {
        const auto& tmpl = gw.templates_.select_template(task_.value_or(TaskHint::kFreeform));
        rec.prompt = compose_prompt(rec.tags, rec.query, tmpl);
      })) {
    return fail("prompt", *err);
  }
  persist();

  std::stop_source cancel;
  std::stop_callback link(stop, [&] { cancel.request_stop(); });
  AnswerStream answer;
  if (auto err = guarded([&] {
        answer = gw.backends_.vlm->generate_stream(
            *frame, rec.prompt.final_prompt, gw.config_.generation,
            [&](const TokenEvent& ev) {
              if (!emit(ChunkEvent{ev.seq_no, ev.text})) cancel.request_stop();
            },
            cancel.get_token());
      })) {
    return fail("generation", *err);
  }

  rec.answer.chunks = std::move(answer.chunks);
  rec.answer.final_text = std::move(answer.final_text);
  rec.answer.status = answer.status;
  rec.answer.timings.first_token_ms = answer.timings.first_token_ms;
  rec.answer.timings.total_generation_ms = answer.timings.total_generation_ms;
  if (answer.status != StreamStatus::kComplete) {
    return fail("generation", StageFailure{answer.error, ErrorCode::kAnswerFailed});
  }

  persist();
  {
    std::lock_guard lock(gw.archive_mu_);
    gw.completed_.emplace_back(task_.value_or(TaskHint::kFreeform), rec.answer.timings);
  }
  emit(DoneEvent{query_id_, rec.answer.timings});
  release();
  return rec;
}

SynthesizedAudio Gateway::get_answer_audio(const SessionId& session, const QueryId& query) {
  auto s = find_session(session);
  std::string text;
  {
    std::lock_guard lock(s->mu);
    const auto* rec = s->state.find_query(query);
    if (!rec) throw Error(ErrorCode::kNotFound, "unknown query " + query.str());
    if (rec->answer.status == StreamStatus::kStreaming) {
      throw Error(ErrorCode::kNotReady, "answer for query " + query.str() + " is still streaming");
    }
    if (rec->answer.status == StreamStatus::kFailed) {
      throw Error(ErrorCode::kAnswerFailed, "query " + query.str() + " failed: " + rec->answer.error);
    }
    if (auto it = s->audio.find(query); it != s->audio.end()) return it->second;
    text = rec->answer.final_text;
  }
  auto audio = backends_.tts->synthesize(text);
  std::lock_guard lock(s->mu);
  auto [it, inserted] = s->audio.emplace(query, std::move(audio));
  if (inserted) {
    if (auto* rec = s->state.find_query(query)) {
      rec->audio_ref = query.str() + "/audio";
      rec->answer.timings.tts_ms = it->second.tts_ms;
    }
  }
  s->state.last_active_at = monotonic_now_ms();
  return it->second;
}

StageReport Gateway::stage_report(const SessionId& session) const {
  auto s = find_session(session);
  std::vector<std::pair<TaskHint, StageTimings>> completed;
  {
    std::lock_guard lock(s->mu);
    for (const auto& q : s->state.queries) {
      if (q.answer.status == StreamStatus::kComplete) {
        completed.emplace_back(q.query.task_hint.value_or(TaskHint::kFreeform), q.answer.timings);
      }
    }
  }
  return build_stage_report(completed);
}

StageReport Gateway::stage_report() const {
  std::lock_guard lock(archive_mu_);
  return build_stage_report(completed_);
}

std::optional<QueryRecord> Gateway::find_record(const SessionId& session, const QueryId& query) const {
  auto s = find_session(session);
  std::lock_guard lock(s->mu);
  const auto* rec = s->state.find_query(query);
  return rec ? std::optional(*rec) : std::nullopt;
}

SessionState Gateway::session_snapshot(const SessionId& session) const {
  auto s = find_session(session);
  std::lock_guard lock(s->mu);
  return s->state;
}

std::size_t Gateway::session_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

std::size_t Gateway::evict_expired(TimestampMs now) {
  std::vector<std::shared_ptr<Session>> evicted;
  {
    std::lock_guard lock(mu_);
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      auto& s = it->second;
      bool expired = false;
      if (!s->busy.load()) {
        std::lock_guard slock(s->mu);
        expired = static_cast<DurationMs>(now - s->state.last_active_at) > config_.session_ttl_ms;
      }
      if (expired) {
        evicted.push_back(s);
        it = sessions_.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (const auto& s : evicted) {
    std::lock_guard slock(s->mu);
    append_to_log(s->state);
  }
  return evicted.size();
}

void Gateway::append_to_log(const SessionState& state) {
  if (!config_.session_log || state.queries.empty()) return;
  std::lock_guard lock(log_mu_);
  std::ofstream out(*config_.session_log, std::ios::app);
  for (const auto& q : state.queries) {
    Json line = Json::object();
    line["session_id"] = state.session_id.str();
    line["record"] = q;
    out << line.dump() << '\n';
  }
}

bool Gateway::healthy() {
  return backends_.tagger->ping() && backends_.vlm->ping() && backends_.asr->ping() && backends_.tts->ping();
}

}  // namespace sightline
