// Copyright 2026 The qpauth authors
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
#include <memory>
#include <span>
#include <string>

namespace qpauth::net {

/// Byte transport used by the channel layer; lets tests substitute
/// in-memory pipes for TCP sockets.
class ByteStream {
 public:
  virtual ~ByteStream() = default;
  virtual void write(std::span<const uint8_t> data) = 0;
  /// Fills `out` completely or returns false (peer closed).
  virtual bool read_exact(std::span<uint8_t> out) = 0;
};

class Socket : public ByteStream {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() override;
  Socket(Socket&& other) noexcept;
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  void write(std::span<const uint8_t> data) override;
  bool read_exact(std::span<uint8_t> out) override;
  void close();
  bool valid() const { return fd_ >= 0; }

 private:
  int fd_ = -1;
};

Socket tcp_connect(const std::string& host, uint16_t port);

class Listener {
 public:
  /// Binds 127.0.0.1:port; port 0 picks a free port.
  explicit Listener(uint16_t port);
  ~Listener();
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  uint16_t port() const { return port_; }
  /// Blocks; returns an invalid socket once close() is called.
  Socket accept();
  void close();

 private:
  int fd_ = -1;
  uint16_t port_ = 0;
};

}  // namespace qpauth::net
