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

#include "sightline/ids.hpp"

#include <cstdio>
#include <mutex>
#include <random>

#include "sightline/error.hpp"

namespace sightline::detail {

std::array<std::uint64_t, 2> random_id_words() {
  static std::mutex mu;
  static std::mt19937_64 rng = [] {
    std::random_device rd;
    std::seed_seq seq{rd(), rd(), rd(), rd(), rd(), rd(), rd(), rd()};
    return std::mt19937_64(seq);
  }();
  std::lock_guard lock(mu);
  std::array<std::uint64_t, 2> words{};
  do {
    words = {rng(), rng()};
  } while (words[0] == 0 && words[1] == 0);
  return words;
}

std::string words_to_hex(const std::array<std::uint64_t, 2>& words) {
  char buf[33];
  std::snprintf(buf, sizeof(buf), "%016llx%016llx", static_cast<unsigned long long>(words[0]),
                static_cast<unsigned long long>(words[1]));
  return std::string(buf, 32);
}

std::array<std::uint64_t, 2> hex_to_words(std::string_view hex) {
  if (hex.size() != 32) {
    throw Error(ErrorCode::kValidation, "identifier must be 32 hex digits: '" + std::string(hex) + "'");
  }
  std::array<std::uint64_t, 2> words{};
  for (std::size_t i = 0; i < 32; ++i) {
    char c = hex[i];
    std::uint64_t nibble;
    if (c >= '0' && c <= '9') {
      nibble = static_cast<std::uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      nibble = static_cast<std::uint64_t>(c - 'a' + 10);
    } else {
      throw Error(ErrorCode::kValidation, "identifier must be lowercase hex: '" + std::string(hex) + "'");
    }
    words[i / 16] = (words[i / 16] << 4) | nibble;
  }
  return words;
}

}  // namespace sightline::detail
