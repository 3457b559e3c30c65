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
#include <optional>
#include <string>

#include "qpauth/crypto.hpp"
#include "qpauth/kem.hpp"
#include "qpauth/net.hpp"

namespace qpauth::channel {

// Wire format: 4-byte big-endian length (covering the type byte and the
// payload), 1-byte message type, payload.

enum MsgType : uint8_t {
  kClientHello = 0x01,
  kServerKemPub = 0x02,
  kClientKemCt = 0x03,
  kConfirm = 0x04,
  kEncPassword = 0x10,
  kAuthResult = 0x11,
  kRedirect = 0x12,
  kError = 0x7f,
};

inline constexpr std::size_t kMaxFrameLen = 1u << 20;
inline constexpr std::size_t kNonceLen = 32;

struct Frame {
  uint8_t type = 0;
  crypto::Bytes payload;

  bool operator==(const Frame&) const = default;
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

crypto::Bytes encode_frame(const Frame& f);
void write_frame(net::ByteStream& stream, const Frame& f);
/// Throws ProtocolError on malformed framing; nullopt on clean EOF.
std::optional<Frame> read_frame(net::ByteStream& stream);

/// Directional keys derived from the shared secret and the handshake
/// transcript hash; the two directions are always distinct.
struct SessionKeys {
  crypto::AeadKey client_to_server{};
  crypto::AeadKey server_to_client{};
  crypto::AeadKey client_confirm{};
  crypto::AeadKey server_confirm{};
  crypto::Digest transcript{};
};

/// Client side of the handshake, driven one message at a time:
///   hello() -> on_server_pub() -> [send ct] -> on_server_confirm()
///   -> confirm().
/// Any mismatch throws ProtocolError; the session must then be abandoned.
class ClientHandshake {
 public:
  explicit ClientHandshake(crypto::Drbg rng);

  Frame hello();
  Frame on_server_pub(const Frame& f);
  void on_server_confirm(const Frame& f);
  Frame confirm() const;
  const SessionKeys& keys() const { return keys_; }

 private:
  enum class State { Start, SentHello, SentCt, Done } state_ = State::Start;
  crypto::Drbg rng_;
  crypto::Bytes transcript_;
  SessionKeys keys_{};
};

class ServerHandshake {
 public:
  ServerHandshake(kem::KemKeypair longterm, crypto::Drbg rng);

  Frame on_hello(const Frame& f);
  Frame on_client_ct(const Frame& f);  // returns the server confirm
  void on_client_confirm(const Frame& f);
  const SessionKeys& keys() const { return keys_; }

 private:
  enum class State { Start, SentPub, SentConfirm, Done } state_ = State::Start;
  kem::KemKeypair longterm_;
  crypto::Drbg rng_;
  crypto::Bytes transcript_;
  SessionKeys keys_{};
};

/// Post-handshake transport: every frame is sealed with AES-256-GCM under
/// the directional key. Nonces are direction tag plus a send counter;
/// counters are also checked on receive, so replayed or reordered frames
/// fail authentication. Counter exhaustion raises a hard error rather than
/// reusing a nonce.
class SecureChannel {
 public:
  SecureChannel(SessionKeys keys, bool is_client);

  void send(net::ByteStream& stream, uint8_t inner_type,
            std::span<const uint8_t> payload);
  /// Throws ProtocolError on tampering or counter mismatch; nullopt on EOF.
  std::optional<Frame> recv(net::ByteStream& stream);

 private:
  SessionKeys keys_;
  bool is_client_;
  uint64_t send_counter_ = 0;
  uint64_t recv_counter_ = 0;
};

/// Convenience blocking drivers over a byte stream.
SecureChannel client_handshake(net::ByteStream& stream, crypto::Drbg rng);
SecureChannel server_handshake(net::ByteStream& stream,
                               const kem::KemKeypair& longterm,
                               crypto::Drbg rng);

}  // namespace qpauth::channel
