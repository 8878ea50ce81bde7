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

#include "sightline/backends.hpp"

#include <array>

#include "sightline/error.hpp"

namespace sightline {

namespace {

// One retry on timeout; every other failure propagates immediately.
template <typename F>
auto call_with_retry(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (!e.retryable()) throw;
  }
  return f();
}

}  // namespace

std::string_view to_string(BackendRole role) {
  switch (role) {
    case BackendRole::kTagger: return "tagger";
    case BackendRole::kVlm: return "vlm";
    case BackendRole::kAsr: return "asr";
    case BackendRole::kTts: return "tts";
  }
  return "tagger";
}

BackendRole parse_backend_role(std::string_view s) {
  for (auto r : {BackendRole::kTagger, BackendRole::kVlm, BackendRole::kAsr, BackendRole::kTts}) {
    if (s == to_string(r)) return r;
  }
  throw Error(ErrorCode::kConfig, "unknown backend role '" + std::string(s) + "'");
}

void BackendEndpoint::validate() const {
  if (base_url.empty()) {
    throw Error(ErrorCode::kConfig, "endpoint '" + std::string(to_string(role)) + "' has no base_url");
  }
  if (!(timeout_ms > 0)) {
    throw Error(ErrorCode::kConfig, "endpoint '" + std::string(to_string(role)) + "' needs timeout_ms > 0");
  }
}

bool is_supported_audio_type(std::string_view content_type) {
  static constexpr std::array<std::string_view, 7> kTypes = {
      "audio/wav", "audio/x-wav", "audio/wave", "audio/webm", "audio/ogg", "audio/mpeg", "audio/flac"};
  auto semi = content_type.find(';');
  auto base = content_type.substr(0, semi);
  while (!base.empty() && base.back() == ' ') base.remove_suffix(1);
  for (auto t : kTypes) {
    if (base == t) return true;
  }
  return false;
}

TagSet Tagger::tag_image(const Frame& frame) {
  if (frame.bytes.empty()) throw Error(ErrorCode::kProtocol, "refusing to tag an empty image payload");
  Stopwatch sw;
  auto raw = call_with_retry([&] { return do_tag(frame); });
  return TagSet{normalize_tags(raw), frame.frame_id, sw.elapsed_ms()};
}

AnswerStream VisionLanguageModel::generate_stream(const Frame& frame, std::string_view prompt,
                                                  const GenerationParams& params, const TokenConsumer& on_event,
                                                  std::stop_token stop) {
  if (prompt.empty()) throw Error(ErrorCode::kPrecondition, "prompt is empty");
  if (frame.bytes.empty()) throw Error(ErrorCode::kPrecondition, "frame payload is empty");

  AnswerStream stream;
  Stopwatch sw;
  int expected = 0;
  bool finished = false;
  bool cancelled = false;

  Emitter emit = [&](const TokenEvent& ev) {
    if (finished) throw Error(ErrorCode::kProtocol, "backend sent an event after the last one");
    if (stop.stop_requested()) {
      cancelled = true;
      return false;
    }
    if (ev.seq_no != expected) {
      throw Error(ErrorCode::kProtocol, "stream sequence gap: expected " + std::to_string(expected) + ", got " +
                                            std::to_string(ev.seq_no));
    }
    if (expected == 0) stream.timings.first_token_ms = sw.elapsed_ms();
    stream.chunks.push_back(Chunk{ev.seq_no, ev.text, monotonic_now_ms()});
    ++expected;
    if (ev.is_last) {
      finished = true;
      stream.timings.total_generation_ms = sw.elapsed_ms();
    }
    if (on_event) on_event(ev);
    return !finished && !stop.stop_requested();
  };

  try {
    do_generate(frame, prompt, params, emit);
  } catch (const Error& e) {
    if (e.retryable() && stream.chunks.empty()) throw;
    stream.status = StreamStatus::kFailed;
    stream.error = e.what();
  }

  stream.final_text = stream.concatenated();
  if (stream.status != StreamStatus::kFailed) {
    if (finished) {
      stream.status = StreamStatus::kComplete;
    } else {
      stream.status = StreamStatus::kFailed;
      stream.error = cancelled || stop.stop_requested() ? "cancelled" : "stream ended before the last event";
    }
  }
  if (!stream.timings.total_generation_ms && stream.timings.first_token_ms) {
    stream.timings.total_generation_ms = sw.elapsed_ms();
  }
  return stream;
}

Transcription SpeechToText::transcribe(std::span<const std::uint8_t> audio, std::string_view content_type) {
  if (audio.empty()) throw Error(ErrorCode::kPrecondition, "audio payload is empty");
  if (!is_supported_audio_type(content_type)) {
    throw Error(ErrorCode::kUnsupported, "unsupported audio content type '" + std::string(content_type) + "'");
  }
  Stopwatch sw;
  auto text = call_with_retry([&] { return do_transcribe(audio, content_type); });
  return Transcription{std::move(text), sw.elapsed_ms()};
}

SynthesizedAudio TextToSpeech::synthesize(std::string_view text) {
  if (text.empty()) throw Error(ErrorCode::kPrecondition, "nothing to synthesize");
  Stopwatch sw;
  auto [audio, type] = call_with_retry([&] { return do_synthesize(text); });
  return SynthesizedAudio{std::move(audio), std::move(type), sw.elapsed_ms()};
}

}  // namespace sightline
