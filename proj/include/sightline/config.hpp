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

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "sightline/backends.hpp"
#include "sightline/domain.hpp"

namespace sightline {

/// Gateway configuration. The file form is JSON:
///
///   {
///     "endpoints": {
///       "tagger": {"base_url": "http://127.0.0.1:9001", "timeout_ms": 5000, "auth_token": null},
///       "vlm":    {...}, "asr": {...}, "tts": {...}
///     },
///     "generation": {"min_length": 1, "max_length": 200, "beam_width": 5,
///                    "length_penalty": 1, "repetition_penalty": 3, "temperature": 1},
///     "frame_buffer_capacity": 32,
///     "session_ttl_ms": 1800000,
///     "templates_dir": "templates",
///     "task_templates": {"risk_assessment": "pblv_assistant"},
///     "session_log": "sessions.ndjson",
///     "relay_buffer_events": 16
///   }
///
/// A base_url of the form "mock://" selects the in-process mock backend for
/// that role. Relative paths resolve against the config file's directory.
/// Environment overrides: SIGHTLINE_<ROLE>_URL and SIGHTLINE_<ROLE>_TOKEN,
/// with ROLE in TAGGER, VLM, ASR, TTS.
struct GatewayConfig {
  std::map<BackendRole, BackendEndpoint> endpoints;
  GenerationParams generation;
  std::size_t frame_buffer_capacity = 32;
  DurationMs session_ttl_ms = 30.0 * 60.0 * 1000.0;
  std::filesystem::path templates_dir = "templates";
  std::map<TaskHint, std::string> task_templates;
  std::optional<std::filesystem::path> session_log;
  std::size_t relay_buffer_events = 16;

  /// Throws Error(kConfig) on any violated invariant.
  void validate() const;

  const BackendEndpoint& endpoint(BackendRole role) const;

  Json to_json() const;
  static GatewayConfig from_json(const Json& j, const std::filesystem::path& base_dir = {});
  static GatewayConfig load_file(const std::filesystem::path& path);

  /// Every role pointed at the in-process mocks.
  static GatewayConfig mock_defaults();

  using EnvLookup = std::function<const char*(const char*)>;
  void apply_env_overrides(const EnvLookup& getenv = [](const char* k) { return std::getenv(k); });
};

}  // namespace sightline
