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

#include "sightline/config.hpp"

#include <cctype>
#include <fstream>

#include "sightline/error.hpp"

namespace sightline {

namespace {

constexpr BackendRole kRoles[] = {BackendRole::kTagger, BackendRole::kVlm, BackendRole::kAsr, BackendRole::kTts};

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.is_absolute() || base.empty()) return p;
  return base / p;
}

}  // namespace

void GatewayConfig::validate() const {
  for (auto role : kRoles) {
    auto it = endpoints.find(role);
    if (it == endpoints.end()) {
      throw Error(ErrorCode::kConfig, "no endpoint configured for role '" + std::string(to_string(role)) + "'");
    }
    if (it->second.role != role) throw Error(ErrorCode::kConfig, "endpoint role mismatch");
    it->second.validate();
  }
  generation.validate();
  if (frame_buffer_capacity < 1) throw Error(ErrorCode::kConfig, "frame_buffer_capacity must be >= 1");
  if (!(session_ttl_ms > 0)) throw Error(ErrorCode::kConfig, "session_ttl_ms must be > 0");
  if (relay_buffer_events < 1) throw Error(ErrorCode::kConfig, "relay_buffer_events must be >= 1");
}

const BackendEndpoint& GatewayConfig::endpoint(BackendRole role) const {
  auto it = endpoints.find(role);
  if (it == endpoints.end()) {
    throw Error(ErrorCode::kConfig, "no endpoint configured for role '" + std::string(to_string(role)) + "'");
  }
  return it->second;
}

Json GatewayConfig::to_json() const {
  Json eps = Json::object();
  for (const auto& [role, ep] : endpoints) {
    Json e{{"base_url", ep.base_url}, {"timeout_ms", ep.timeout_ms}};
    e["auth_token"] = ep.auth_token ? Json(*ep.auth_token) : Json(nullptr);
    eps[std::string(to_string(role))] = std::move(e);
  }
  Json tasks = Json::object();
  for (const auto& [task, id] : task_templates) tasks[std::string(to_string(task))] = id;
  Json j = Json::object();
  j["endpoints"] = std::move(eps);
  j["generation"] = generation;
  j["frame_buffer_capacity"] = frame_buffer_capacity;
  j["session_ttl_ms"] = session_ttl_ms;
  j["templates_dir"] = templates_dir.string();
  j["task_templates"] = std::move(tasks);
  j["session_log"] = session_log ? Json(session_log->string()) : Json(nullptr);
  j["relay_buffer_events"] = relay_buffer_events;
  return j;
}

GatewayConfig GatewayConfig::from_json(const Json& j, const std::filesystem::path& base_dir) {
  GatewayConfig c;
  try {
    if (!j.is_object()) throw Error(ErrorCode::kConfig, "config must be a JSON object");
    for (const auto& [name, e] : j.at("endpoints").items()) {
      BackendEndpoint ep;
      ep.role = parse_backend_role(name);
      ep.base_url = e.at("base_url").get<std::string>();
      ep.timeout_ms = e.value("timeout_ms", ep.timeout_ms);
      if (auto t = e.find("auth_token"); t != e.end() && !t->is_null()) ep.auth_token = t->get<std::string>();
      c.endpoints[ep.role] = std::move(ep);
    }
    if (auto g = j.find("generation"); g != j.end()) c.generation = g->get<GenerationParams>();
    c.frame_buffer_capacity = j.value("frame_buffer_capacity", c.frame_buffer_capacity);
    c.session_ttl_ms = j.value("session_ttl_ms", c.session_ttl_ms);
    c.templates_dir = resolve(j.value("templates_dir", c.templates_dir.string()), base_dir);
    if (auto t = j.find("task_templates"); t != j.end()) {
      for (const auto& [task, id] : t->items()) {
        try {
          c.task_templates[parse_task_hint(task)] = id.get<std::string>();
        } catch (const Error& e) {
          throw Error(ErrorCode::kConfig, e.what());
        }
      }
    }
    if (auto s = j.find("session_log"); s != j.end() && !s->is_null()) {
      c.session_log = resolve(s->get<std::string>(), base_dir);
    }
    c.relay_buffer_events = j.value("relay_buffer_events", c.relay_buffer_events);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("malformed config: ") + e.what());
  }
  return c;
}

GatewayConfig GatewayConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open config file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfig, "config file " + path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

GatewayConfig GatewayConfig::mock_defaults() {
  GatewayConfig c;
  for (auto role : kRoles) c.endpoints[role] = BackendEndpoint{role, "mock://", 10000, std::nullopt};
  return c;
}

void GatewayConfig::apply_env_overrides(const EnvLookup& getenv) {
  for (auto role : kRoles) {
    std::string upper(to_string(role));
    for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    auto url_key = "SIGHTLINE_" + upper + "_URL";
    auto token_key = "SIGHTLINE_" + upper + "_TOKEN";
    const char* url = getenv(url_key.c_str());
    const char* token = getenv(token_key.c_str());
    if (!url && !token) continue;
    auto& ep = endpoints[role];
    ep.role = role;
    if (url) ep.base_url = url;
    if (token) ep.auth_token = std::string(token);
  }
}

}  // namespace sightline
