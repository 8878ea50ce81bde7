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

// Client interfaces for the four model roles. Each base class owns the
// role's contract (preconditions, client-side timing, retry, stream
// bookkeeping); concrete clients only move bytes.

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stop_token>
#include <string>
#include <string_view>

#include "sightline/domain.hpp"

namespace sightline {

enum class BackendRole { kTagger, kVlm, kAsr, kTts };

std::string_view to_string(BackendRole role);
BackendRole parse_backend_role(std::string_view s);

struct BackendEndpoint {
  BackendRole role = BackendRole::kTagger;
  std::string base_url;
  DurationMs timeout_ms = 10000;
  std::optional<std::string> auth_token;

  /// Throws Error(kConfig) on an empty URL or non-positive timeout.
  void validate() const;
};

struct TokenEvent {
  int seq_no = 0;
  std::string text;
  bool is_last = false;

  bool operator==(const TokenEvent&) const = default;
};

using TokenConsumer = std::function<void(const TokenEvent&)>;

struct Transcription {
  std::string text;
  DurationMs asr_ms = 0;
};

struct SynthesizedAudio {
  Bytes audio;
  std::string content_type;
  DurationMs tts_ms = 0;
};

/// Audio MIME types accepted for transcription.
bool is_supported_audio_type(std::string_view content_type);

class Tagger {
 public:
  virtual ~Tagger() = default;

  /// Tags in backend order, normalized. Rejects an empty frame before any
  /// dispatch; retries once on timeout. An empty tag list is a valid result.
  TagSet tag_image(const Frame& frame);

  virtual bool ping() = 0;

 protected:
  virtual std::vector<std::string> do_tag(const Frame& frame) = 0;
};

class VisionLanguageModel {
 public:
  virtual ~VisionLanguageModel() = default;

  /// Streams the answer for (frame, prompt). Events reach `on_event` in
  /// sequence order as they arrive. A disconnect or cancellation after the
  /// first event yields status kFailed with the partial chunks retained;
  /// a timeout before the first event throws a retryable Error. Never
  /// retried here.
  AnswerStream generate_stream(const Frame& frame, std::string_view prompt, const GenerationParams& params,
                               const TokenConsumer& on_event, std::stop_token stop = {});

  virtual bool ping() = 0;

 protected:
  /// Emits events through `emit`; stops as soon as `emit` returns false.
  using Emitter = std::function<bool(const TokenEvent&)>;
  virtual void do_generate(const Frame& frame, std::string_view prompt, const GenerationParams& params,
                           const Emitter& emit) = 0;
};

class SpeechToText {
 public:
  virtual ~SpeechToText() = default;

  Transcription transcribe(std::span<const std::uint8_t> audio, std::string_view content_type);

  virtual bool ping() = 0;

 protected:
  virtual std::string do_transcribe(std::span<const std::uint8_t> audio, std::string_view content_type) = 0;
};

class TextToSpeech {
 public:
  virtual ~TextToSpeech() = default;

  SynthesizedAudio synthesize(std::string_view text);

  virtual bool ping() = 0;

 protected:
  /// Returns the payload and its content type.
  virtual std::pair<Bytes, std::string> do_synthesize(std::string_view text) = 0;
};

}  // namespace sightline
