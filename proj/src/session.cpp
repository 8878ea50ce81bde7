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

#include "sightline/session.hpp"

#include <algorithm>

#include "sightline/error.hpp"

namespace sightline {

void to_json(Json& j, const QueryRecord& v) {
  j = Json::object();
  j["query"] = v.query;
  j["selected_frame"] = v.selected_frame.str();
  j["tags"] = v.tags;
  j["prompt"] = v.prompt;
  j["answer"] = v.answer;
  j["audio_ref"] = v.audio_ref ? Json(*v.audio_ref) : Json(nullptr);
  j["failed_stage"] = v.failed_stage;
}

void from_json(const Json& j, QueryRecord& v) {
  v.query = j.at("query").get<UserQuery>();
  v.selected_frame = FrameId::parse(j.at("selected_frame").get<std::string>());
  v.tags = j.at("tags").get<TagSet>();
  v.prompt = j.at("prompt").get<PromptBundle>();
  v.answer = j.at("answer").get<AnswerStream>();
  auto a = j.find("audio_ref");
  v.audio_ref = (a == j.end() || a->is_null()) ? std::nullopt : std::optional(a->get<std::string>());
  v.failed_stage = j.value("failed_stage", std::string());
}

FramePtr SessionState::append_frame(std::string content_type, Bytes bytes, TimestampMs now) {
  if (bytes.empty()) throw Error(ErrorCode::kPrecondition, "frame payload is empty");
  auto frame = std::make_shared<Frame>();
  frame->frame_id = FrameId::generate();
  frame->session_id = session_id;
  frame->captured_at = frames.empty() ? now : std::max(now, frames.back()->captured_at + 1);
  frame->content_type = std::move(content_type);
  frame->bytes = std::move(bytes);
  while (frames.size() >= config.frame_buffer_capacity) frames.pop_front();
  frames.push_back(frame);
  return frame;
}

QueryRecord* SessionState::find_query(const QueryId& id) {
  for (auto& q : queries) {
    if (q.query.query_id == id) return &q;
  }
  return nullptr;
}

const QueryRecord* SessionState::find_query(const QueryId& id) const {
  return const_cast<SessionState*>(this)->find_query(id);
}

SessionState new_session(const GatewayConfig& config, TimestampMs now) {
  config.validate();
  SessionState s;
  s.session_id = SessionId::generate();
  s.config = config;
  s.created_at = now;
  s.last_active_at = now;
  return s;
}

FramePtr select_frame(const SessionState& session, TimestampMs at) {
  const auto& frames = session.frames;
  if (frames.empty()) throw Error(ErrorCode::kNoFrame, "session has no frames");
  auto it = std::upper_bound(frames.begin(), frames.end(), at,
                             [](TimestampMs t, const FramePtr& f) { return t < f->captured_at; });
  return it == frames.begin() ? frames.front() : *std::prev(it);
}

}  // namespace sightline
