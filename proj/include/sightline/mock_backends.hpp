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

#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sightline/backends.hpp"

namespace sightline {

struct TaggerFixture {
  std::vector<std::string> tags;
  DurationMs delay_ms = 0;

  bool operator==(const TaggerFixture&) const = default;
};

struct VlmFixture {
  /// Answer chunks in delivery order. Empty means an empty completion,
  /// delivered as one event with empty text.
  std::vector<std::string> chunks;
  DurationMs first_token_delay_ms = 0;
  DurationMs inter_chunk_delay_ms = 0;
  /// Drop the stream after this many events have been delivered.
  std::optional<int> disconnect_after;

  bool operator==(const VlmFixture&) const = default;

  std::string answer() const;
};

struct AsrFixture {
  std::string text;
  DurationMs delay_ms = 0;

  bool operator==(const AsrFixture&) const = default;
};

/// Scripted backend outputs keyed by SHA-256 of the input: frame bytes for
/// the tagger and VLM (optionally frame + prompt for the VLM), audio bytes
/// for ASR. TTS is rule-based and only carries an injected delay.
///
/// JSON form:
///   {"tagger": {"<sha256>": {"tags": [...], "delay_ms": 40}},
///    "vlm":    {"<sha256>[:<prompt sha256>]": {"chunks": [...], "first_token_delay_ms": 0,
///               "inter_chunk_delay_ms": 0, "disconnect_after": null}},
///    "asr":    {"<sha256>": {"text": "...", "delay_ms": 0}},
///    "tts":    {"delay_ms": 0}}
class MockFixtureSet {
 public:
  void add_tagger(const std::string& frame_digest, TaggerFixture fixture);
  void add_vlm(const std::string& frame_digest, VlmFixture fixture,
               const std::optional<std::string>& prompt_digest = std::nullopt);
  void add_asr(const std::string& audio_digest, AsrFixture fixture);
  void set_tts_delay_ms(DurationMs delay) { tts_delay_ms_ = delay; }

  const TaggerFixture* find_tagger(const std::string& frame_digest) const;
  /// Prefers an entry keyed by frame + prompt over one keyed by frame only.
  const VlmFixture* find_vlm(const std::string& frame_digest, const std::string& prompt_digest) const;
  const AsrFixture* find_asr(const std::string& audio_digest) const;
  DurationMs tts_delay_ms() const { return tts_delay_ms_; }

  /// Adds every entry of `other`. Throws Error(kConfig) when a key is
  /// already bound to a different output.
  void merge(const MockFixtureSet& other);

  Json to_json() const;
  static MockFixtureSet from_json(const Json& j);
  static MockFixtureSet load_file(const std::filesystem::path& path);
  /// Merges every *.json file in the directory, in filename order.
  static MockFixtureSet load_directory(const std::filesystem::path& dir);

 private:
  std::map<std::string, TaggerFixture> tagger_;
  std::map<std::string, VlmFixture> vlm_;
  std::map<std::string, AsrFixture> asr_;
  DurationMs tts_delay_ms_ = 0;
};

using FixturePtr = std::shared_ptr<const MockFixtureSet>;

inline constexpr DurationMs kNoTimeout = std::numeric_limits<DurationMs>::infinity();

/// The mocks below are pure functions of (fixtures, input): identical inputs
/// give byte-identical outputs. A scripted delay longer than `timeout_ms`
/// surfaces as a timeout after `timeout_ms` has elapsed.
class MockTagger : public Tagger {
 public:
  explicit MockTagger(FixturePtr fixtures, DurationMs timeout_ms = kNoTimeout)
      : fixtures_(std::move(fixtures)), timeout_ms_(timeout_ms) {}
  bool ping() override { return true; }

 protected:
  std::vector<std::string> do_tag(const Frame& frame) override;

 private:
  FixturePtr fixtures_;
  DurationMs timeout_ms_;
};

class MockVisionLanguageModel : public VisionLanguageModel {
 public:
  explicit MockVisionLanguageModel(FixturePtr fixtures, DurationMs timeout_ms = kNoTimeout)
      : fixtures_(std::move(fixtures)), timeout_ms_(timeout_ms) {}
  bool ping() override { return true; }

  /// Event sequence the fixture scripts for (frame, prompt).
  static std::vector<TokenEvent> script_events(const VlmFixture& fixture);

 protected:
  void do_generate(const Frame& frame, std::string_view prompt, const GenerationParams& params,
                   const Emitter& emit) override;

 private:
  FixturePtr fixtures_;
  DurationMs timeout_ms_;
};

class MockSpeechToText : public SpeechToText {
 public:
  explicit MockSpeechToText(FixturePtr fixtures, DurationMs timeout_ms = kNoTimeout)
      : fixtures_(std::move(fixtures)), timeout_ms_(timeout_ms) {}
  bool ping() override { return true; }

 protected:
  std::string do_transcribe(std::span<const std::uint8_t> audio, std::string_view content_type) override;

 private:
  FixturePtr fixtures_;
  DurationMs timeout_ms_;
};

/// Emits a WAV sine tone lasting 50 ms per character, capped at 10 s.
class MockTextToSpeech : public TextToSpeech {
 public:
  static constexpr int kMsPerCharacter = 50;
  static constexpr int kMaxDurationMs = 10000;

  explicit MockTextToSpeech(FixturePtr fixtures = nullptr, DurationMs timeout_ms = kNoTimeout)
      : fixtures_(std::move(fixtures)), timeout_ms_(timeout_ms) {}
  bool ping() override { return true; }

  static int duration_ms_for(std::string_view text);

 protected:
  std::pair<Bytes, std::string> do_synthesize(std::string_view text) override;

 private:
  FixturePtr fixtures_;
  DurationMs timeout_ms_;
};

}  // namespace sightline
