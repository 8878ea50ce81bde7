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

// Scripted end-to-end scenarios: frames, queries, expected tags and answers
// that drive the mock backends and check the pipeline's output.
//
// File format (JSON, one scenario per file; paths relative to the file):
//
//   {
//     "scenario_id": "subway_walkthrough",
//     "notes": "free text",
//     "frames": {
//       "street": {"image": "../images/street.png", "content_type": "image/png",
//                  "sha256": "<hex>", "source": "where the image came from"}
//     },
//     "audio": {
//       "gate_question": {"file": "../audio/gate.wav", "content_type": "audio/wav", "sha256": "<hex>"}
//     },
//     "steps": [
//       {"frame_ref": "street", "query_text": "...", "audio_ref": null,
//        "expected_tags": ["street", "people"], "scripted_answer": "...",
//        "answer_chunks": null, "task": "scene_understanding",
//        "tagging_delay_ms": 0, "first_token_delay_ms": 0,
//        "inter_chunk_delay_ms": 0, "asr_delay_ms": 0}
//     ]
//   }
//
// Without "answer_chunks" the answer is streamed word by word.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sightline/gateway.hpp"

namespace sightline {

struct ScenarioFrame {
  std::filesystem::path image;
  std::string content_type;
  std::string sha256;
  std::string source;
  Bytes bytes;
};

struct ScenarioAudio {
  std::filesystem::path file;
  std::string content_type;
  std::string sha256;
  Bytes bytes;
};

struct ScenarioStep {
  std::string frame_ref;
  std::string query_text;
  /// When set, the query is spoken: the audio goes through transcription,
  /// which is scripted to return query_text.
  std::optional<std::string> audio_ref;
  std::vector<std::string> expected_tags;
  std::string scripted_answer;
  std::vector<std::string> answer_chunks;
  std::optional<TaskHint> task;
  DurationMs tagging_delay_ms = 0;
  DurationMs first_token_delay_ms = 0;
  DurationMs inter_chunk_delay_ms = 0;
  DurationMs asr_delay_ms = 0;
};

struct Scenario {
  std::string scenario_id;
  std::string notes;
  std::map<std::string, ScenarioFrame> frames;
  std::map<std::string, ScenarioAudio> audio;
  std::vector<ScenarioStep> steps;
};

/// Reads and checks a scenario file: at least one step, every frame_ref and
/// audio_ref resolves, expected tags are non-empty and already normalized,
/// chunks concatenate to the scripted answer, and every file matches its
/// pinned digest. Violations throw Error(kValidation) naming the step;
/// malformed JSON throws Error(kSchema).
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const Json& j, const std::filesystem::path& base_dir);
/// Every *.json file in the directory, in filename order.
std::vector<Scenario> load_scenario_directory(const std::filesystem::path& dir);

/// "a b  c" -> {"a ", "b  ", "c"}: each word keeps the whitespace after it.
std::vector<std::string> word_chunks(const std::string& text);

/// Mock outputs scripted by the scenario: tags and answer keyed by the
/// frame digest, transcripts keyed by the audio digest.
MockFixtureSet fixtures_from(const Scenario& scenario);
MockFixtureSet fixtures_from(const std::vector<Scenario>& scenarios);

struct StepOutcome {
  std::size_t index = 0;
  std::string frame_ref;
  QueryRecord record;
  std::vector<ChunkEvent> relayed;
};

struct ReplayResult {
  std::string scenario_id;
  std::vector<StepOutcome> steps;
  StageReport timings;

  /// Everything except timing fields, so two replays compare equal.
  Json transcript() const;
  std::string render_text() const;
};

/// Runs every step in one session of `gateway`, whose backends must be
/// scripted by this scenario. After each step the relayed chunks must be
/// dense and concatenate to the scripted answer, tags must equal the
/// expected tags, and the prompt must start with their tag sentence and
/// contain the query verbatim. The first failing step aborts with an Error
/// naming its index.
ReplayResult replay(const Scenario& scenario, Gateway& gateway);

/// replay() against a fresh gateway wired to mocks built from the scenario.
ReplayResult replay_with_mocks(const Scenario& scenario, const TemplateRegistry& templates,
                               GatewayConfig config = GatewayConfig::mock_defaults());

}  // namespace sightline
