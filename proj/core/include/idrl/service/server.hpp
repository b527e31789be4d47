// Copyright 2026 The IDRL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "idrl/service/session.hpp"

namespace idrl::service {

struct ServerConfig {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8765;  // 0 picks a free port
  std::filesystem::path static_dir;  // console assets; empty serves none
};

// HTTP + websocket endpoint for one session on a single port:
//   GET /ws      upgrade to the advice protocol
//   GET /health  JSON status
//   GET /<path>  files below static_dir (index.html for "/")
class Server {
 public:
  Server(Session& session, ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and starts the I/O thread. Throws Error if the port cannot be bound.
  void start();
  void stop();
  std::uint16_t port() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Content type used for a static file, by extension.
std::string_view mime_type(const std::filesystem::path& path) noexcept;

}  // namespace idrl::service
