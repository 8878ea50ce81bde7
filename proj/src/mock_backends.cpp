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

#include "sightline/mock_backends.hpp"

#include <algorithm>
#include <fstream>

#include "sightline/digest.hpp"
#include "sightline/error.hpp"
#include "sightline/wav.hpp"

namespace sightline {

namespace {

void scripted_wait(DurationMs delay, DurationMs timeout, std::string_view what) {
  if (delay > timeout) {
    sleep_ms(timeout);
    throw Error(ErrorCode::kTimeout, std::string(what) + " timed out");
  }
  sleep_ms(delay);
}

template <typename Map, typename Value>
void insert_unique(Map& map, const std::string& key, Value value, std::string_view role) {
  auto [it, inserted] = map.emplace(key, value);
  if (!inserted && !(it->second == value)) {
    throw Error(ErrorCode::kConfig, "conflicting " + std::string(role) + " fixtures for key " + key);
  }
}

}  // namespace

std::string VlmFixture::answer() const {
  std::string out;
  for (const auto& c : chunks) out += c;
  return out;
}

void MockFixtureSet::add_tagger(const std::string& frame_digest, TaggerFixture fixture) {
  insert_unique(tagger_, frame_digest, std::move(fixture), "tagger");
}

void MockFixtureSet::add_vlm(const std::string& frame_digest, VlmFixture fixture,
                             const std::optional<std::string>& prompt_digest) {
  auto key = prompt_digest ? frame_digest + ":" + *prompt_digest : frame_digest;
  insert_unique(vlm_, key, std::move(fixture), "vlm");
}

void MockFixtureSet::add_asr(const std::string& audio_digest, AsrFixture fixture) {
  insert_unique(asr_, audio_digest, std::move(fixture), "asr");
}

const TaggerFixture* MockFixtureSet::find_tagger(const std::string& frame_digest) const {
  auto it = tagger_.find(frame_digest);
  return it == tagger_.end() ? nullptr : &it->second;
}

const VlmFixture* MockFixtureSet::find_vlm(const std::string& frame_digest, const std::string& prompt_digest) const {
  if (auto it = vlm_.find(frame_digest + ":" + prompt_digest); it != vlm_.end()) return &it->second;
  auto it = vlm_.find(frame_digest);
  return it == vlm_.end() ? nullptr : &it->second;
}

const AsrFixture* MockFixtureSet::find_asr(const std::string& audio_digest) const {
  auto it = asr_.find(audio_digest);
  return it == asr_.end() ? nullptr : &it->second;
}

void MockFixtureSet::merge(const MockFixtureSet& other) {
  for (const auto& [k, v] : other.tagger_) insert_unique(tagger_, k, v, "tagger");
  for (const auto& [k, v] : other.vlm_) insert_unique(vlm_, k, v, "vlm");
  for (const auto& [k, v] : other.asr_) insert_unique(asr_, k, v, "asr");
  tts_delay_ms_ = std::max(tts_delay_ms_, other.tts_delay_ms_);
}

Json MockFixtureSet::to_json() const {
  Json j = Json::object();
  Json tagger = Json::object();
  for (const auto& [k, v] : tagger_) tagger[k] = Json{{"tags", v.tags}, {"delay_ms", v.delay_ms}};
  Json vlm = Json::object();
  for (const auto& [k, v] : vlm_) {
    Json e{{"chunks", v.chunks},
           {"first_token_delay_ms", v.first_token_delay_ms},
           {"inter_chunk_delay_ms", v.inter_chunk_delay_ms}};
    e["disconnect_after"] = v.disconnect_after ? Json(*v.disconnect_after) : Json(nullptr);
    vlm[k] = std::move(e);
  }
  Json asr = Json::object();
  for (const auto& [k, v] : asr_) asr[k] = Json{{"text", v.text}, {"delay_ms", v.delay_ms}};
  j["tagger"] = std::move(tagger);
  j["vlm"] = std::move(vlm);
  j["asr"] = std::move(asr);
  j["tts"] = Json{{"delay_ms", tts_delay_ms_}};
  return j;
}

MockFixtureSet MockFixtureSet::from_json(const Json& j) {
  MockFixtureSet set;
  try {
    if (auto it = j.find("tagger"); it != j.end()) {
      for (const auto& [k, v] : it->items()) {
        set.add_tagger(k, TaggerFixture{v.at("tags").get<std::vector<std::string>>(), v.value("delay_ms", 0.0)});
      }
    }
    if (auto it = j.find("vlm"); it != j.end()) {
      for (const auto& [k, v] : it->items()) {
        VlmFixture f;
        f.chunks = v.at("chunks").get<std::vector<std::string>>();
        f.first_token_delay_ms = v.value("first_token_delay_ms", 0.0);
        f.inter_chunk_delay_ms = v.value("inter_chunk_delay_ms", 0.0);
        if (auto d = v.find("disconnect_after"); d != v.end() && !d->is_null()) f.disconnect_after = d->get<int>();
        set.vlm_.emplace(k, std::move(f));
      }
    }
    if (auto it = j.find("asr"); it != j.end()) {
      for (const auto& [k, v] : it->items()) {
        set.add_asr(k, AsrFixture{v.at("text").get<std::string>(), v.value("delay_ms", 0.0)});
      }
    }
    if (auto it = j.find("tts"); it != j.end()) set.tts_delay_ms_ = it->value("delay_ms", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("malformed fixture set: ") + e.what());
  }
  return set;
}

MockFixtureSet MockFixtureSet::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open fixture file " + path.string());
  try {
    return from_json(Json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfig, "fixture file " + path.string() + ": " + e.what());
  }
}

MockFixtureSet MockFixtureSet::load_directory(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  MockFixtureSet set;
  for (const auto& f : files) set.merge(load_file(f));
  return set;
}

std::vector<std::string> MockTagger::do_tag(const Frame& frame) {
  const auto* f = fixtures_->find_tagger(sha256_hex(frame.bytes));
  if (!f) throw Error(ErrorCode::kProtocol, "mock tagger has no fixture for this image");
  scripted_wait(f->delay_ms, timeout_ms_, "tagger");
  return f->tags;
}

std::vector<TokenEvent> MockVisionLanguageModel::script_events(const VlmFixture& fixture) {
  std::vector<TokenEvent> events;
  if (fixture.chunks.empty()) {
    events.push_back(TokenEvent{0, "", true});
    return events;
  }
  for (std::size_t i = 0; i < fixture.chunks.size(); ++i) {
    events.push_back(TokenEvent{static_cast<int>(i), fixture.chunks[i], i + 1 == fixture.chunks.size()});
  }
  return events;
}

void MockVisionLanguageModel::do_generate(const Frame& frame, std::string_view prompt, const GenerationParams&,
                                          const Emitter& emit) {
  const auto* f = fixtures_->find_vlm(sha256_hex(frame.bytes), sha256_hex(prompt));
  if (!f) throw Error(ErrorCode::kProtocol, "mock VLM has no scripted answer for this image");
  auto events = script_events(*f);
  for (std::size_t i = 0; i < events.size(); ++i) {
    scripted_wait(i == 0 ? f->first_token_delay_ms : f->inter_chunk_delay_ms, timeout_ms_, "generation");
    if (f->disconnect_after && static_cast<int>(i) >= *f->disconnect_after) {
      throw Error(ErrorCode::kUnavailable, "backend disconnected mid-stream");
    }
    if (!emit(events[i])) return;
  }
}

std::string MockSpeechToText::do_transcribe(std::span<const std::uint8_t> audio, std::string_view) {
  const auto* f = fixtures_->find_asr(sha256_hex(audio));
  if (!f) throw Error(ErrorCode::kTranscriptionFailed, "mock ASR has no transcript for this audio");
  scripted_wait(f->delay_ms, timeout_ms_, "transcription");
  return f->text;
}

int MockTextToSpeech::duration_ms_for(std::string_view text) {
  auto chars = utf8_length(text);
  return static_cast<int>(std::min<std::size_t>(chars * kMsPerCharacter, kMaxDurationMs));
}

std::pair<Bytes, std::string> MockTextToSpeech::do_synthesize(std::string_view text) {
  scripted_wait(fixtures_ ? fixtures_->tts_delay_ms() : 0.0, timeout_ms_, "synthesis");
  return {make_sine_wav(duration_ms_for(text)), "audio/wav"};
}

}  // namespace sightline
