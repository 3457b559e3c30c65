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

#include "qpauth/channel.hpp"

#include <cstring>

namespace qpauth::channel {

namespace {

void put_u32be(crypto::Bytes& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

void put_u64be(crypto::Bytes& out, uint64_t v) {
  for (int i = 7; i >= 0; --i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint64_t get_u64be(std::span<const uint8_t> in) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in[i];
  return v;
}

void append_to_transcript(crypto::Bytes& transcript, const Frame& f) {
  transcript.push_back(f.type);
  put_u32be(transcript, static_cast<uint32_t>(f.payload.size()));
  transcript.insert(transcript.end(), f.payload.begin(), f.payload.end());
}

crypto::AeadKey kdf_key(const kem::SharedSecret& ss,
                        const crypto::Digest& transcript,
                        const char* label) {
  crypto::Bytes material(ss.begin(), ss.end());
  material.insert(material.end(), transcript.begin(), transcript.end());
  material.insert(material.end(), label, label + std::strlen(label));
  put_u32be(material, 1);
  return crypto::sha256(material);
}

SessionKeys derive_session_keys(const kem::SharedSecret& ss,
                                const crypto::Bytes& transcript) {
  SessionKeys keys;
  keys.transcript = crypto::sha256(transcript);
  keys.client_to_server = kdf_key(ss, keys.transcript, "c2s");
  keys.server_to_client = kdf_key(ss, keys.transcript, "s2c");
  keys.client_confirm = kdf_key(ss, keys.transcript, "confirm-client");
  keys.server_confirm = kdf_key(ss, keys.transcript, "confirm-server");
  return keys;
}

crypto::Bytes confirm_mac(const crypto::AeadKey& key,
                          const crypto::Digest& transcript) {
  return crypto::hmac_sha256(key, transcript);
}

void expect_type(const Frame& f, uint8_t type) {
  if (f.type != type) {
    throw ProtocolError("unexpected message type " + std::to_string(f.type));
  }
}

}  // namespace

crypto::Bytes encode_frame(const Frame& f) {
  crypto::Bytes out;
  put_u32be(out, static_cast<uint32_t>(1 + f.payload.size()));
  out.push_back(f.type);
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  return out;
}

void write_frame(net::ByteStream& stream, const Frame& f) {
  if (1 + f.payload.size() > kMaxFrameLen) {
    throw ProtocolError("frame too large");
  }
  stream.write(encode_frame(f));
}

std::optional<Frame> read_frame(net::ByteStream& stream) {
  uint8_t head[4];
  if (!stream.read_exact(head)) return std::nullopt;
  const uint32_t len = (static_cast<uint32_t>(head[0]) << 24) |
                       (static_cast<uint32_t>(head[1]) << 16) |
                       (static_cast<uint32_t>(head[2]) << 8) | head[3];
  if (len < 1 || len > kMaxFrameLen) throw ProtocolError("bad frame length");
  Frame f;
  f.payload.resize(len - 1);
  if (!stream.read_exact(std::span<uint8_t>(&f.type, 1))) {
    throw ProtocolError("truncated frame");
  }
  if (!f.payload.empty() && !stream.read_exact(f.payload)) {
    throw ProtocolError("truncated frame");
  }
  return f;
}

ClientHandshake::ClientHandshake(crypto::Drbg rng) : rng_(std::move(rng)) {}

Frame ClientHandshake::hello() {
  if (state_ != State::Start) throw ProtocolError("hello out of order");
  Frame f{kClientHello, rng_.bytes(kNonceLen)};
  append_to_transcript(transcript_, f);
  state_ = State::SentHello;
  return f;
}

Frame ClientHandshake::on_server_pub(const Frame& f) {
  if (state_ != State::SentHello) throw ProtocolError("pub out of order");
  expect_type(f, kServerKemPub);
  if (f.payload.size() < kNonceLen + 1) throw ProtocolError("short pub");
  append_to_transcript(transcript_, f);

  const kem::KemParams params = kem::KemParams::by_wire_id(
      f.payload[kNonceLen]);
  kem::KemPublicKey pub;
  try {
    pub = kem::KemPublicKey::parse(
        params, std::span<const uint8_t>(f.payload).subspan(kNonceLen + 1));
  } catch (const std::exception&) {
    throw ProtocolError("malformed server public key");
  }

  const kem::Encapsulated enc = kem::kem_encaps(params, pub, rng_);
  Frame ct{kClientKemCt, enc.ct.serialize(params)};
  append_to_transcript(transcript_, ct);
  keys_ = derive_session_keys(enc.ss, transcript_);
  state_ = State::SentCt;
  return ct;
}

void ClientHandshake::on_server_confirm(const Frame& f) {
  if (state_ != State::SentCt) throw ProtocolError("confirm out of order");
  expect_type(f, kConfirm);
  const auto expected = confirm_mac(keys_.server_confirm, keys_.transcript);
  if (!crypto::constant_time_equal(f.payload, expected)) {
    throw ProtocolError("server confirmation MAC mismatch");
  }
  state_ = State::Done;
}

Frame ClientHandshake::confirm() const {
  if (state_ != State::Done) throw ProtocolError("confirm before handshake");
  return Frame{kConfirm, confirm_mac(keys_.client_confirm, keys_.transcript)};
}

ServerHandshake::ServerHandshake(kem::KemKeypair longterm, crypto::Drbg rng)
    : longterm_(std::move(longterm)), rng_(std::move(rng)) {}

Frame ServerHandshake::on_hello(const Frame& f) {
  if (state_ != State::Start) throw ProtocolError("hello out of order");
  expect_type(f, kClientHello);
  if (f.payload.size() != kNonceLen) throw ProtocolError("bad hello");
  append_to_transcript(transcript_, f);

  Frame pub{kServerKemPub, rng_.bytes(kNonceLen)};
  pub.payload.push_back(longterm_.params.wire_id());
  const crypto::Bytes pk = longterm_.pub.serialize(longterm_.params);
  pub.payload.insert(pub.payload.end(), pk.begin(), pk.end());
  append_to_transcript(transcript_, pub);
  state_ = State::SentPub;
  return pub;
}

Frame ServerHandshake::on_client_ct(const Frame& f) {
  if (state_ != State::SentPub) throw ProtocolError("ct out of order");
  expect_type(f, kClientKemCt);
  append_to_transcript(transcript_, f);
  kem::KemCiphertext ct;
  try {
    ct = kem::KemCiphertext::parse(longterm_.params, f.payload);
  } catch (const std::exception&) {
    throw ProtocolError("malformed ciphertext");
  }
  const kem::SharedSecret ss = kem::kem_decaps(longterm_, ct);
  keys_ = derive_session_keys(ss, transcript_);
  state_ = State::SentConfirm;
  return Frame{kConfirm, confirm_mac(keys_.server_confirm, keys_.transcript)};
}

void ServerHandshake::on_client_confirm(const Frame& f) {
  if (state_ != State::SentConfirm) {
    throw ProtocolError("client confirm out of order");
  }
  expect_type(f, kConfirm);
  const auto expected = confirm_mac(keys_.client_confirm, keys_.transcript);
  if (!crypto::constant_time_equal(f.payload, expected)) {
    throw ProtocolError("client confirmation MAC mismatch");
  }
  state_ = State::Done;
}

SecureChannel::SecureChannel(SessionKeys keys, bool is_client)
    : keys_(std::move(keys)), is_client_(is_client) {}

void SecureChannel::send(net::ByteStream& stream, uint8_t inner_type,
                         std::span<const uint8_t> payload) {
  if (send_counter_ == UINT64_MAX) {
    throw ProtocolError("nonce counter exhausted");
  }
  const uint64_t counter = send_counter_++;
  crypto::AeadNonce nonce{};
  nonce[0] = is_client_ ? 0x01 : 0x02;
  for (int i = 0; i < 8; ++i) {
    nonce[4 + i] = static_cast<uint8_t>(counter >> (8 * (7 - i)));
  }
  const crypto::AeadKey& key =
      is_client_ ? keys_.client_to_server : keys_.server_to_client;
  const uint8_t aad[1] = {inner_type};
  const crypto::Bytes sealed = crypto::aead_seal(key, nonce, payload, aad);

  Frame f{inner_type, {}};
  put_u64be(f.payload, counter);
  f.payload.insert(f.payload.end(), sealed.begin(), sealed.end());
  write_frame(stream, f);
}

std::optional<Frame> SecureChannel::recv(net::ByteStream& stream) {
  auto f = read_frame(stream);
  if (!f) return std::nullopt;
  if (f->payload.size() < 8 + crypto::kTagLen) {
    throw ProtocolError("sealed frame too short");
  }
  const uint64_t counter = get_u64be(f->payload);
  if (counter != recv_counter_) {
    throw ProtocolError("frame counter mismatch (replay or loss)");
  }
  ++recv_counter_;
  crypto::AeadNonce nonce{};
  nonce[0] = is_client_ ? 0x02 : 0x01;  // peer's direction tag
  for (int i = 0; i < 8; ++i) {
    nonce[4 + i] = static_cast<uint8_t>(counter >> (8 * (7 - i)));
  }
  const crypto::AeadKey& key =
      is_client_ ? keys_.server_to_client : keys_.client_to_server;
  const uint8_t aad[1] = {f->type};
  auto opened = crypto::aead_open(
      key, nonce, std::span<const uint8_t>(f->payload).subspan(8), aad);
  if (!opened) throw ProtocolError("authentication failure on sealed frame");
  return Frame{f->type, std::move(*opened)};
}

SecureChannel client_handshake(net::ByteStream& stream, crypto::Drbg rng) {
  ClientHandshake hs(std::move(rng));
  write_frame(stream, hs.hello());
  auto pub = read_frame(stream);
  if (!pub) throw ProtocolError("peer closed during handshake");
  write_frame(stream, hs.on_server_pub(*pub));
  auto confirm = read_frame(stream);
  if (!confirm) throw ProtocolError("peer closed during handshake");
  hs.on_server_confirm(*confirm);
  write_frame(stream, hs.confirm());
  return SecureChannel(hs.keys(), /*is_client=*/true);
}

SecureChannel server_handshake(net::ByteStream& stream,
                               const kem::KemKeypair& longterm,
                               crypto::Drbg rng) {
  ServerHandshake hs(longterm, std::move(rng));
  auto hello = read_frame(stream);
  if (!hello) throw ProtocolError("peer closed during handshake");
  write_frame(stream, hs.on_hello(*hello));
  auto ct = read_frame(stream);
  if (!ct) throw ProtocolError("peer closed during handshake");
  write_frame(stream, hs.on_client_ct(*ct));
  auto confirm = read_frame(stream);
  if (!confirm) throw ProtocolError("peer closed during handshake");
  hs.on_client_confirm(*confirm);
  return SecureChannel(hs.keys(), /*is_client=*/false);
}

}  // namespace qpauth::channel
