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

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include "sightline/digest.hpp"
#include "sightline/domain.hpp"
#include "sightline/gateway.hpp"
#include "sightline/mock_backends.hpp"
#include "sightline/prompt.hpp"

namespace testing_support {

inline std::filesystem::path source_path(const std::string& rel) {
  return std::filesystem::path(SIGHTLINE_SOURCE_DIR) / rel;
}

inline sightline::Bytes to_bytes(std::string_view s) { return sightline::Bytes(s.begin(), s.end()); }

/// Distinct fake image payload per label.
inline sightline::Bytes fake_image(const std::string& label) { return to_bytes("\x89PNG-fake-" + label); }

inline std::string digest_of(const sightline::Bytes& b) { return sightline::sha256_hex(b); }

inline sightline::Frame frame_of(const sightline::Bytes& bytes, sightline::TimestampMs at = 0) {
  sightline::Frame f;
  f.frame_id = sightline::FrameId::generate();
  f.session_id = sightline::SessionId::generate();
  f.captured_at = at;
  f.content_type = "image/png";
  f.bytes = bytes;
  return f;
}

inline sightline::TemplateRegistry shipped_templates() {
  return sightline::TemplateRegistry::load_directory(source_path("templates"));
}

inline std::unique_ptr<sightline::Gateway> mock_gateway(std::shared_ptr<const sightline::MockFixtureSet> fixtures,
                                                        sightline::GatewayConfig config =
                                                            sightline::GatewayConfig::mock_defaults()) {
  auto backends = sightline::make_backends(config, fixtures);
  return std::make_unique<sightline::Gateway>(std::move(config), std::move(backends), shipped_templates());
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sightline_test_" + name + "_" +
                                                       sightline::SessionId::generate().str().substr(0, 8));
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& p, std::string_view content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

}  // namespace testing_support
