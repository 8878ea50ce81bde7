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

#include "sightline/mock_backend_server.hpp"

#include <httplib.h>

#include "sightline/digest.hpp"
#include "sightline/error.hpp"
#include "sightline/sse.hpp"

namespace sightline {

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kPrecondition:
    case ErrorCode::kValidation: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kUnsupported: return 415;
    case ErrorCode::kTimeout: return 504;
    case ErrorCode::kUnavailable: return 503;
    default: return 422;
  }
}

void send_error(httplib::Response& res, const Error& e) {
  res.status = status_for(e.code());
  res.set_content(Json{{"error", e.what()}, {"code", to_string(e.code())}}.dump(), "application/json");
}

Json parse_request(const httplib::Request& req) {
  auto j = Json::parse(req.body, nullptr, false);
  if (!j.is_object()) throw Error(ErrorCode::kPrecondition, "request body must be a JSON object");
  return j;
}

Frame frame_from(const Json& j) {
  Frame f;
  f.frame_id = FrameId::generate();
  f.content_type = j.value("content_type", "application/octet-stream");
  f.bytes = base64_decode(j.at("image").get<std::string>());
  return f;
}

}  // namespace

MockBackendServer::MockBackendServer(FixturePtr fixtures)
    : fixtures_(std::move(fixtures)), server_(std::make_unique<httplib::Server>()) {
  server_->new_task_queue = [] { return new httplib::ThreadPool(32); };
  install_routes();
}

MockBackendServer::~MockBackendServer() { stop(); }

void MockBackendServer::install_routes() {
  auto fixtures = fixtures_;

  server_->Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });

  server_->Post("/v1/tag", [fixtures](const httplib::Request& req, httplib::Response& res) {
    try {
      auto frame = frame_from(parse_request(req));
      if (frame.bytes.empty()) throw Error(ErrorCode::kPrecondition, "empty image");
      const auto* f = fixtures->find_tagger(sha256_hex(frame.bytes));
      if (!f) throw Error(ErrorCode::kProtocol, "no tagger fixture for this image");
      sleep_ms(f->delay_ms);
      res.set_content(Json{{"tags", f->tags}, {"model", "mock-tagger"}}.dump(), "application/json");
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const nlohmann::json::exception& e) {
      send_error(res, Error(ErrorCode::kPrecondition, e.what()));
    }
  });

  server_->Post("/v1/generate", [fixtures](const httplib::Request& req, httplib::Response& res) {
    const VlmFixture* fixture = nullptr;
    try {
      auto j = parse_request(req);
      auto frame = frame_from(j);
      auto prompt = j.at("prompt").get<std::string>();
      if (prompt.empty()) throw Error(ErrorCode::kPrecondition, "empty prompt");
      fixture = fixtures->find_vlm(sha256_hex(frame.bytes), sha256_hex(prompt));
      if (!fixture) throw Error(ErrorCode::kProtocol, "no scripted answer for this image");
    } catch (const Error& e) {
      send_error(res, e);
      return;
    } catch (const nlohmann::json::exception& e) {
      send_error(res, Error(ErrorCode::kPrecondition, e.what()));
      return;
    }
    auto events = std::make_shared<std::vector<TokenEvent>>(MockVisionLanguageModel::script_events(*fixture));
    auto next = std::make_shared<std::size_t>(0);
    VlmFixture script = *fixture;
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream", [events, next, script](std::size_t, httplib::DataSink& sink) {
          std::size_t i = *next;
          if (i >= events->size()) {
            sink.done();
            return true;
          }
          sleep_ms(i == 0 ? script.first_token_delay_ms : script.inter_chunk_delay_ms);
          if (script.disconnect_after && static_cast<int>(i) >= *script.disconnect_after) return false;
          const auto& ev = (*events)[i];
          auto payload = format_sse("", Json{{"seq", ev.seq_no}, {"text", ev.text}, {"last", ev.is_last}}.dump());
          if (!sink.write(payload.data(), payload.size())) return false;
          *next = i + 1;
          return true;
        });
  });

  server_->Post("/v1/transcribe", [fixtures](const httplib::Request& req, httplib::Response& res) {
    try {
      auto j = parse_request(req);
      auto audio = base64_decode(j.at("audio").get<std::string>());
      auto type = j.value("content_type", "");
      if (audio.empty()) throw Error(ErrorCode::kPrecondition, "empty audio");
      if (!is_supported_audio_type(type)) throw Error(ErrorCode::kUnsupported, "unsupported content type " + type);
      const auto* f = fixtures->find_asr(sha256_hex(audio));
      if (!f) throw Error(ErrorCode::kTranscriptionFailed, "no transcript fixture for this audio");
      sleep_ms(f->delay_ms);
      res.set_content(Json{{"text", f->text}}.dump(), "application/json");
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const nlohmann::json::exception& e) {
      send_error(res, Error(ErrorCode::kPrecondition, e.what()));
    }
  });

  server_->Post("/v1/synthesize", [fixtures](const httplib::Request& req, httplib::Response& res) {
    try {
      auto text = parse_request(req).at("text").get<std::string>();
      MockTextToSpeech tts(fixtures);
      auto audio = tts.synthesize(text);
      res.set_content(std::string(audio.audio.begin(), audio.audio.end()), audio.content_type);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const nlohmann::json::exception& e) {
      send_error(res, Error(ErrorCode::kPrecondition, e.what()));
    }
  });
}

int MockBackendServer::start(const std::string& host, int port) {
  host_ = host;
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ < 0) throw Error(ErrorCode::kUnavailable, "mock backend cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void MockBackendServer::listen(const std::string& host, int port) {
  host_ = host;
  port_ = port;
  if (!server_->listen(host, port)) {
    throw Error(ErrorCode::kUnavailable, "mock backend cannot listen on " + host + ":" + std::to_string(port));
  }
}

void MockBackendServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockBackendServer::base_url() const { return "http://" + host_ + ":" + std::to_string(port_); }

}  // namespace sightline
