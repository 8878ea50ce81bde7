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

#include <memory>
#include <string>
#include <thread>

#include "sightline/gateway.hpp"

namespace httplib {
class Server;
}

namespace sightline {

/// HTTP front end for a Gateway:
///   POST /v1/sessions                                -> {"session_id"}
///   POST /v1/sessions/{id}/frames                    -> {"frame_id","captured_at"}
///   POST /v1/sessions/{id}/queries?modality=text|audio[&task=...]
///        -> SSE: "chunk" {"seq","text"} ... then "done" {"timings","query_id"}
///           or "error" {"stage","message"}
///   GET  /v1/sessions/{id}/queries/{qid}/audio       -> audio/wav
///   GET  /v1/report/timings[?format=text]            -> stage report
///   GET  /healthz                                    -> 200 when every backend pings
/// Rejections before streaming use 400 (bad input), 404 (unknown id),
/// 409 (query already in flight) and 425 (answer not ready).
class GatewayServer {
 public:
  explicit GatewayServer(Gateway& gateway);
  ~GatewayServer();

  GatewayServer(const GatewayServer&) = delete;
  GatewayServer& operator=(const GatewayServer&) = delete;

  /// Binds and serves on a background thread; port 0 picks a free port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();

  std::string base_url() const;

 private:
  void install_routes();

  Gateway& gateway_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_;
  int port_ = 0;
};

/// HTTP status used for an error code on the gateway API.
int http_status_for(ErrorCode code);

}  // namespace sightline
