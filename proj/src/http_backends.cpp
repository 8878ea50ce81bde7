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

#include "sightline/http_backends.hpp"

#include <httplib.h>

#include <cmath>

#include "sightline/digest.hpp"
#include "sightline/error.hpp"
#include "sightline/sse.hpp"

namespace sightline {

namespace {

std::unique_ptr<httplib::Client> make_client(const BackendEndpoint& ep, const HttpTarget& target) {
  auto cli = std::make_unique<httplib::Client>(target.scheme_host_port);
  auto micros = static_cast<long long>(std::ceil(ep.timeout_ms * 1000.0));
  auto sec = static_cast<time_t>(micros / 1000000);
  auto usec = static_cast<time_t>(micros % 1000000);
  cli->set_connection_timeout(sec, usec);
  cli->set_read_timeout(sec, usec);
  cli->set_write_timeout(sec, usec);
  cli->set_keep_alive(false);
  if (ep.auth_token) cli->set_bearer_token_auth(*ep.auth_token);
  return cli;
}

std::string role_name(const BackendEndpoint& ep) { return std::string(to_string(ep.role)); }

[[noreturn]] void throw_transport(const BackendEndpoint& ep, httplib::Error err) {
  auto what = role_name(ep) + " backend: " + httplib::to_string(err);
  if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
    throw Error(ErrorCode::kTimeout, what);
  }
  throw Error(ErrorCode::kUnavailable, what);
}

// Non-2xx responses carry {"error": message, "code": error-code-name}.
[[noreturn]] void throw_status(const BackendEndpoint& ep, int status, const std::string& body) {
  std::string message = body;
  std::optional<ErrorCode> code;
  auto parsed = Json::parse(body, nullptr, false);
  if (parsed.is_object()) {
    message = parsed.value("error", body);
    if (parsed.contains("code") && parsed["code"].is_string()) code = parse_error_code(parsed["code"].get<std::string>());
  }
  if (!code) {
    switch (status) {
      case 400: code = ErrorCode::kPrecondition; break;
      case 415: code = ErrorCode::kUnsupported; break;
      case 504: code = ErrorCode::kTimeout; break;
      case 503: code = ErrorCode::kUnavailable; break;
      default: code = ErrorCode::kProtocol; break;
    }
  }
  throw Error(*code, role_name(ep) + " backend returned " + std::to_string(status) + ": " + message);
}

httplib::Result post_json(const BackendEndpoint& ep, const HttpTarget& target, const std::string& path,
                          const Json& body) {
  auto cli = make_client(ep, target);
  auto res = cli->Post(target.path_prefix + path, body.dump(), "application/json");
  if (!res) throw_transport(ep, res.error());
  if (res->status != 200) throw_status(ep, res->status, res->body);
  return res;
}

Json parse_body(const BackendEndpoint& ep, const std::string& body) {
  auto j = Json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kProtocol, role_name(ep) + " backend sent a non-JSON response");
  }
  return j;
}

bool ping_endpoint(const BackendEndpoint& ep, const HttpTarget& target) {
  auto cli = make_client(ep, target);
  auto res = cli->Get(target.path_prefix + "/healthz");
  return res && res->status == 200;
}

}  // namespace

HttpTarget parse_base_url(const std::string& base_url) {
  auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::kConfig, "base_url needs a scheme: " + base_url);
  auto scheme = base_url.substr(0, scheme_end);
  if (scheme != "http") throw Error(ErrorCode::kConfig, "only http:// base URLs are supported: " + base_url);
  auto path_start = base_url.find('/', scheme_end + 3);
  HttpTarget t;
  t.scheme_host_port = base_url.substr(0, path_start);
  if (t.scheme_host_port.size() == scheme_end + 3) throw Error(ErrorCode::kConfig, "base_url has no host: " + base_url);
  if (path_start != std::string::npos) {
    t.path_prefix = base_url.substr(path_start);
    while (!t.path_prefix.empty() && t.path_prefix.back() == '/') t.path_prefix.pop_back();
  }
  return t;
}

HttpTagger::HttpTagger(BackendEndpoint endpoint)
    : endpoint_(std::move(endpoint)), target_(parse_base_url(endpoint_.base_url)) {
  endpoint_.validate();
}

bool HttpTagger::ping() { return ping_endpoint(endpoint_, target_); }

std::vector<std::string> HttpTagger::do_tag(const Frame& frame) {
  Json req{{"image", base64_encode(frame.bytes)}, {"content_type", frame.content_type}};
  auto res = post_json(endpoint_, target_, "/v1/tag", req);
  auto j = parse_body(endpoint_, res->body);
  auto it = j.find("tags");
  if (it == j.end() || !it->is_array()) throw Error(ErrorCode::kProtocol, "tagger response has no tags array");
  std::vector<std::string> tags;
  for (const auto& t : *it) {
    if (!t.is_string()) throw Error(ErrorCode::kProtocol, "tagger response has a non-string tag");
    tags.push_back(t.get<std::string>());
  }
  return tags;
}

HttpVisionLanguageModel::HttpVisionLanguageModel(BackendEndpoint endpoint)
    : endpoint_(std::move(endpoint)), target_(parse_base_url(endpoint_.base_url)) {
  endpoint_.validate();
}

bool HttpVisionLanguageModel::ping() { return ping_endpoint(endpoint_, target_); }

void HttpVisionLanguageModel::do_generate(const Frame& frame, std::string_view prompt, const GenerationParams& params,
                                          const Emitter& emit) {
  Json body{{"image", base64_encode(frame.bytes)},
            {"content_type", frame.content_type},
            {"prompt", std::string(prompt)},
            {"params", params}};

  httplib::Request req;
  req.method = "POST";
  req.path = target_.path_prefix + "/v1/generate";
  req.set_header("Accept", "text/event-stream");
  req.set_header("Content-Type", "application/json");
  req.body = body.dump();

  int status = 0;
  std::string error_body;
  SseParser parser;
  bool stopped = false;
  bool any_event = false;
  std::optional<Error> failure;
  Stopwatch since_data;

  req.response_handler = [&](const httplib::Response& r) {
    status = r.status;
    return true;
  };
  req.content_receiver = [&](const char* data, std::size_t n, std::uint64_t, std::uint64_t) {
    since_data.reset();
    if (status != 200) {
      error_body.append(data, n);
      return true;
    }
    try {
      for (auto& ev : parser.feed(std::string_view(data, n))) {
        auto j = Json::parse(ev.data, nullptr, false);
        if (!j.is_object() || !j.contains("seq") || !j.contains("text") || !j.contains("last") ||
            !j["seq"].is_number_integer() || !j["text"].is_string() || !j["last"].is_boolean()) {
          throw Error(ErrorCode::kProtocol, "malformed generate event: " + ev.data);
        }
        any_event = true;
        if (!emit(TokenEvent{j["seq"].get<int>(), j["text"].get<std::string>(), j["last"].get<bool>()})) {
          stopped = true;
          return false;
        }
      }
    } catch (const Error& e) {
      failure = e;
      return false;
    }
    return true;
  };

  auto cli = make_client(endpoint_, target_);
  auto res = cli->send(req);
  if (failure) throw *failure;
  if (stopped) return;
  if (status != 0 && status != 200) throw_status(endpoint_, status, error_body);
  if (!res) {
    // httplib reports both an idle read timeout and a peer close as Read;
    // tell them apart by how long the socket sat idle.
    bool idle = since_data.elapsed_ms() >= 0.9 * endpoint_.timeout_ms;
    if (res.error() == httplib::Error::Read && !idle) {
      throw Error(ErrorCode::kUnavailable, "vlm backend disconnected mid-stream");
    }
    if (any_event && idle) throw Error(ErrorCode::kTimeout, "vlm backend stalled mid-stream");
    throw_transport(endpoint_, res.error());
  }
}

HttpSpeechToText::HttpSpeechToText(BackendEndpoint endpoint)
    : endpoint_(std::move(endpoint)), target_(parse_base_url(endpoint_.base_url)) {
  endpoint_.validate();
}

bool HttpSpeechToText::ping() { return ping_endpoint(endpoint_, target_); }

std::string HttpSpeechToText::do_transcribe(std::span<const std::uint8_t> audio, std::string_view content_type) {
  Json req{{"audio", base64_encode(audio)}, {"content_type", std::string(content_type)}};
  auto res = post_json(endpoint_, target_, "/v1/transcribe", req);
  auto j = parse_body(endpoint_, res->body);
  if (!j.contains("text") || !j["text"].is_string()) {
    throw Error(ErrorCode::kTranscriptionFailed, "asr response has no text field");
  }
  return j["text"].get<std::string>();
}

HttpTextToSpeech::HttpTextToSpeech(BackendEndpoint endpoint)
    : endpoint_(std::move(endpoint)), target_(parse_base_url(endpoint_.base_url)) {
  endpoint_.validate();
}

bool HttpTextToSpeech::ping() { return ping_endpoint(endpoint_, target_); }

std::pair<Bytes, std::string> HttpTextToSpeech::do_synthesize(std::string_view text) {
  auto res = post_json(endpoint_, target_, "/v1/synthesize", Json{{"text", std::string(text)}});
  auto type = res->get_header_value("Content-Type");
  if (type.rfind("audio/", 0) != 0) throw Error(ErrorCode::kProtocol, "tts backend returned " + type);
  return {Bytes(res->body.begin(), res->body.end()), type};
}

}  // namespace sightline
