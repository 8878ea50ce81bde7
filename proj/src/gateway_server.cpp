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

#include "sightline/gateway_server.hpp"

#include <httplib.h>

#include "sightline/channel.hpp"
#include "sightline/error.hpp"
#include "sightline/sse.hpp"

namespace sightline {

namespace {

void send_error(httplib::Response& res, const Error& e) {
  res.status = http_status_for(e.code());
  res.set_content(Json{{"error", e.what()}, {"code", to_string(e.code())}}.dump(), "application/json");
}

void send_json(httplib::Response& res, const Json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

SessionId session_from(const httplib::Request& req) {
  try {
    return SessionId::parse(req.matches[1].str());
  } catch (const Error&) {
    throw Error(ErrorCode::kNotFound, "unknown session " + req.matches[1].str());
  }
}

Bytes body_bytes(const httplib::Request& req) { return Bytes(req.body.begin(), req.body.end()); }

std::string render_event(const ResponseEvent& ev) {
  return std::visit(
      [](const auto& e) -> std::string {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, ChunkEvent>) {
          return format_sse("chunk", Json{{"seq", e.seq}, {"text", e.text}}.dump());
        } else if constexpr (std::is_same_v<T, DoneEvent>) {
          Json j = Json::object();
          j["timings"] = e.timings;
          j["query_id"] = e.query_id.str();
          return format_sse("done", j.dump());
        } else {
          return format_sse("error", Json{{"stage", e.stage}, {"message", e.message}}.dump());
        }
      },
      ev);
}

// State shared between the pipeline thread (producer) and the HTTP content
// provider (consumer) of one streamed query.
struct RelayState {
  explicit RelayState(std::size_t capacity) : channel(capacity) {}
  BoundedChannel<std::string> channel;
  std::stop_source cancel;
  std::thread worker;
};

}  // namespace

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kPrecondition:
    case ErrorCode::kValidation:
    case ErrorCode::kSchema:
    case ErrorCode::kRange: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kBusy: return 409;
    case ErrorCode::kNotReady: return 425;
    case ErrorCode::kUnsupported: return 415;
    case ErrorCode::kAnswerFailed:
    case ErrorCode::kEmptyReport:
    case ErrorCode::kNoFrame: return 422;
    case ErrorCode::kTimeout: return 504;
    case ErrorCode::kUnavailable: return 503;
    case ErrorCode::kConfig: return 500;
    case ErrorCode::kProtocol:
    case ErrorCode::kTranscriptionFailed: return 502;
  }
  return 500;
}

GatewayServer::GatewayServer(Gateway& gateway) : gateway_(gateway), server_(std::make_unique<httplib::Server>()) {
  // Streams hold a worker for their whole lifetime.
  server_->new_task_queue = [] { return new httplib::ThreadPool(64); };
  install_routes();
}

GatewayServer::~GatewayServer() { stop(); }

void GatewayServer::install_routes() {
  auto& gw = gateway_;
  auto& svr = *server_;

  svr.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  svr.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  auto guarded = [](auto handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const std::exception& e) {
        send_error(res, Error(ErrorCode::kProtocol, e.what()));
      }
    };
  };

  svr.Get("/healthz", [&gw](const httplib::Request&, httplib::Response& res) {
    bool ok = false;
    try {
      ok = gw.healthy();
    } catch (const std::exception&) {
      ok = false;
    }
    send_json(res, Json{{"status", ok ? "ok" : "degraded"}}, ok ? 200 : 503);
  });

  svr.Post("/v1/sessions", guarded([&gw](const httplib::Request&, httplib::Response& res) {
             send_json(res, Json{{"session_id", gw.create_session().str()}});
           }));

  svr.Post(R"(/v1/sessions/([^/]+)/frames)", guarded([&gw](const httplib::Request& req, httplib::Response& res) {
             auto type = req.get_header_value("Content-Type");
             auto r = gw.ingest_frame(session_from(req), type.empty() ? "application/octet-stream" : type,
                                      body_bytes(req));
             send_json(res, Json{{"frame_id", r.frame_id.str()}, {"captured_at", r.captured_at}});
           }));

  svr.Post(R"(/v1/sessions/([^/]+)/queries)", guarded([&gw](const httplib::Request& req, httplib::Response& res) {
             auto modality = parse_modality(req.has_param("modality") ? req.get_param_value("modality") : "text");
             std::optional<TaskHint> task;
             if (req.has_param("task")) task = parse_task_hint(req.get_param_value("task"));
             auto ticket = std::make_shared<Gateway::QueryTicket>(gw.open_query(
                 session_from(req), modality, body_bytes(req), req.get_header_value("Content-Type"), task));

             auto relay = std::make_shared<RelayState>(gw.config().relay_buffer_events);
             relay->worker = std::thread([relay, ticket] {
               ticket->run(
                   [&](const ResponseEvent& ev) { return relay->channel.push(render_event(ev)); },
                   relay->cancel.get_token());
               relay->channel.close();
             });

             res.set_header("Cache-Control", "no-cache");
             res.set_header("X-Query-Id", ticket->query_id().str());
             res.set_chunked_content_provider(
                 "text/event-stream",
                 [relay](std::size_t, httplib::DataSink& sink) {
                   auto next = relay->channel.pop();
                   if (!next) {
                     sink.done();
                     return true;
                   }
                   return sink.write(next->data(), next->size());
                 },
                 [relay](bool) {
                   relay->cancel.request_stop();
                   relay->channel.close();
                   if (relay->worker.joinable()) relay->worker.join();
                 });
           }));

  svr.Get(R"(/v1/sessions/([^/]+)/queries/([^/]+)/audio)",
          guarded([&gw](const httplib::Request& req, httplib::Response& res) {
            QueryId qid;
            try {
              qid = QueryId::parse(req.matches[2].str());
            } catch (const Error&) {
              throw Error(ErrorCode::kNotFound, "unknown query " + req.matches[2].str());
            }
            auto audio = gw.get_answer_audio(session_from(req), qid);
            res.set_content(std::string(audio.audio.begin(), audio.audio.end()), audio.content_type);
          }));

  svr.Get("/v1/report/timings", guarded([&gw](const httplib::Request& req, httplib::Response& res) {
            auto report = gw.stage_report();
            if (req.has_param("format") && req.get_param_value("format") == "text") {
              res.set_content(report.render_text(), "text/plain");
            } else {
              send_json(res, report.to_json());
            }
          }));
}

int GatewayServer::start(const std::string& host, int port) {
  host_ = host;
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ < 0) throw Error(ErrorCode::kUnavailable, "gateway cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void GatewayServer::listen(const std::string& host, int port) {
  host_ = host;
  port_ = port;
  if (!server_->listen(host, port)) {
    throw Error(ErrorCode::kUnavailable, "gateway cannot listen on " + host + ":" + std::to_string(port));
  }
}

void GatewayServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string GatewayServer::base_url() const { return "http://" + host_ + ":" + std::to_string(port_); }

}  // namespace sightline
