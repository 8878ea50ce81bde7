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


// sightline: gateway server, stand-alone mock backends and scenario replay.
//
//   sightline serve [--config gateway.json] [--scenarios DIR] [--fixtures DIR] [--host H] [--port N]
//   sightline mock-backends [--scenarios DIR] [--fixtures DIR] [--host H] [--port N]
//   sightline replay --scenario FILE [--templates DIR] [--json]

#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "sightline/config.hpp"
#include "sightline/error.hpp"
#include "sightline/gateway.hpp"
#include "sightline/gateway_server.hpp"
#include "sightline/mock_backend_server.hpp"
#include "sightline/scenario.hpp"

namespace {

using namespace sightline;

FixturePtr load_fixtures(const std::string& scenarios_dir, const std::string& fixtures_dir) {
  if (scenarios_dir.empty() && fixtures_dir.empty()) return nullptr;
  MockFixtureSet set;
  if (!scenarios_dir.empty()) set.merge(fixtures_from(load_scenario_directory(scenarios_dir)));
  if (!fixtures_dir.empty()) set.merge(MockFixtureSet::load_directory(fixtures_dir));
  return std::make_shared<const MockFixtureSet>(std::move(set));
}

int serve(const std::string& config_path, const std::string& scenarios_dir, const std::string& fixtures_dir,
          const std::string& host, int port) {
  GatewayConfig config = config_path.empty() ? GatewayConfig::mock_defaults() : GatewayConfig::load_file(config_path);
  config.apply_env_overrides();
  config.validate();
  auto fixtures = load_fixtures(scenarios_dir, fixtures_dir);
  auto templates = TemplateRegistry::load_directory(config.templates_dir);
  Gateway gateway(config, make_backends(config, fixtures), std::move(templates));
  GatewayServer server(gateway);
  std::cerr << "sightline: gateway listening on " << host << ":" << port << '\n';
  server.listen(host, port);
  return 0;
}

int mock_backends(const std::string& scenarios_dir, const std::string& fixtures_dir, const std::string& host,
                  int port) {
  auto fixtures = load_fixtures(scenarios_dir, fixtures_dir);
  if (!fixtures) fixtures = std::make_shared<const MockFixtureSet>();
  MockBackendServer server(fixtures);
  std::cerr << "sightline: mock backends listening on " << host << ":" << port << '\n';
  server.listen(host, port);
  return 0;
}

int replay_file(const std::string& scenario_path, const std::string& templates_dir, bool as_json) {
  auto scenario = load_scenario(scenario_path);
  auto templates = TemplateRegistry::load_directory(templates_dir);
  auto result = replay_with_mocks(scenario, templates);
  if (as_json) {
    Json j = result.transcript();
    j["timings"] = result.timings.to_json();
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << result.render_text();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assistive perception gateway"};
  app.require_subcommand(1);

  std::string config_path, scenarios_dir, fixtures_dir, host = "127.0.0.1";
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "Run the gateway HTTP API");
  serve_cmd->add_option("--config", config_path, "Gateway config JSON (default: every backend mocked)");
  serve_cmd->add_option("--scenarios", scenarios_dir, "Script mock backends from the scenarios in DIR");
  serve_cmd->add_option("--fixtures", fixtures_dir, "Script mock backends from fixture JSON files in DIR");
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--port", port);

  int mock_port = 9000;
  auto* mock_cmd = app.add_subcommand("mock-backends", "Serve scripted tagger, VLM, ASR and TTS endpoints");
  mock_cmd->add_option("--scenarios", scenarios_dir, "Script outputs from the scenarios in DIR");
  mock_cmd->add_option("--fixtures", fixtures_dir, "Script outputs from fixture JSON files in DIR");
  mock_cmd->add_option("--host", host);
  mock_cmd->add_option("--port", mock_port);

  std::string scenario_path, templates_dir = "templates";
  bool as_json = false;
  auto* replay_cmd = app.add_subcommand("replay", "Replay a scenario against in-process mocks");
  replay_cmd->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  replay_cmd->add_option("--templates", templates_dir, "Prompt template directory");
  replay_cmd->add_flag("--json", as_json, "Print the transcript as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) return serve(config_path, scenarios_dir, fixtures_dir, host, port);
    if (*mock_cmd) return mock_backends(scenarios_dir, fixtures_dir, host, mock_port);
    return replay_file(scenario_path, templates_dir, as_json);
  } catch (const Error& e) {
    std::cerr << "sightline: " << to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == ErrorCode::kConfig || e.code() == ErrorCode::kSchema || e.code() == ErrorCode::kValidation ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "sightline: " << e.what() << '\n';
    return 1;
  }
}
