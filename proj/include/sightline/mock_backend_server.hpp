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

#include "sightline/mock_backends.hpp"

namespace httplib {
class Server;
}

namespace sightline {

/// Serves the four backend wire endpoints from a fixture set, so the HTTP
/// clients and the gateway can run against scripted outputs:
///   POST /v1/tag, POST /v1/generate (SSE), POST /v1/transcribe,
///   POST /v1/synthesize, GET /healthz.
class MockBackendServer {
 public:
  explicit MockBackendServer(FixturePtr fixtures);
  ~MockBackendServer();

  MockBackendServer(const MockBackendServer&) = delete;
  MockBackendServer& operator=(const MockBackendServer&) = delete;

  /// Binds and starts serving on a background thread. Port 0 picks a free
  /// port. Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);

  /// Blocks serving on the calling thread.
  void listen(const std::string& host, int port);

  void stop();

  std::string base_url() const;

 private:
  void install_routes();

  FixturePtr fixtures_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_;
  int port_ = 0;
};

}  // namespace sightline
