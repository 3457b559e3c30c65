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

#include "qpauth/authnet.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qpauth/game.hpp"
#include "qpauth/rng.hpp"

namespace qpauth::authnet {

namespace {

using nlohmann::json;

std::string bytes_to_string(const crypto::Bytes& b) {
  return std::string(b.begin(), b.end());
}

crypto::Bytes string_to_bytes(std::string_view s) {
  return crypto::Bytes(s.begin(), s.end());
}

crypto::Bytes relay_mac(const std::string& secret, const std::string& user_id,
                        const std::string& nonce_hex,
                        const std::string& suffix) {
  const std::string data = user_id + "|" + nonce_hex + "|" + suffix;
  return crypto::hmac_sha256(string_to_bytes(secret), string_to_bytes(data));
}

trapauth::Salt instance_salt(const trapauth::Salt& base, int instance) {
  if (instance == 0) return base;
  crypto::Bytes material(base.begin(), base.end());
  material.push_back(static_cast<uint8_t>(instance));
  const auto digest = crypto::sha256(material);
  trapauth::Salt salt{};
  std::copy_n(digest.begin(), salt.size(), salt.begin());
  return salt;
}

int64_t now_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

uint64_t fresh_seed(const std::optional<uint64_t>& master,
                    std::atomic<uint64_t>& counter) {
  const uint64_t index = counter.fetch_add(1);
  if (master) return derive_seed(*master, index);
  const crypto::Bytes raw = crypto::random_bytes(8);
  uint64_t s = 0;
  for (int i = 0; i < 8; ++i) s |= static_cast<uint64_t>(raw[i]) << (8 * i);
  return s;
}

}  // namespace

json EnrollmentRecord::to_json() const {
  json j;
  j["user_id"] = user_id;
  j["salt"] = crypto::to_hex(salt);
  j["keysets"] = json::array();
  for (const auto& k : keysets) j["keysets"].push_back(k.to_json());
  j["policy"] = policy.to_json();
  j["created_at"] = created_at;
  return j;
}

EnrollmentRecord EnrollmentRecord::from_json(const json& j) {
  EnrollmentRecord r;
  r.user_id = j.at("user_id").get<std::string>();
  const auto salt = crypto::from_hex(j.at("salt").get<std::string>());
  if (salt.size() != r.salt.size()) throw std::invalid_argument("bad salt");
  std::copy(salt.begin(), salt.end(), r.salt.begin());
  for (const auto& k : j.at("keysets")) {
    r.keysets.push_back(trapauth::KeySet::from_json(k));
  }
  if (r.keysets.empty()) throw std::invalid_argument("record has no keys");
  r.policy = verify::AcceptPolicy::from_json(j.at("policy"));
  r.created_at = j.at("created_at").get<int64_t>();
  return r;
}

EnrollmentStore::EnrollmentStore(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in.good()) return;  // new store
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("enrollment store " + path_ +
                             " is corrupt: " + e.what());
  }
  for (const auto& rec : j.at("records")) {
    records_.push_back(EnrollmentRecord::from_json(rec));
  }
}

void EnrollmentStore::save() const {
  std::lock_guard lock(mutex_);
  json j;
  j["records"] = json::array();
  for (const auto& r : records_) j["records"].push_back(r.to_json());
  const std::string tmp = path_ + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out.good()) throw std::runtime_error("cannot write " + tmp);
    out << j.dump(2) << "\n";
  }
  if (std::rename(tmp.c_str(), path_.c_str()) != 0) {
    throw std::runtime_error("cannot replace " + path_);
  }
}

bool EnrollmentStore::enroll(EnrollmentRecord record) {
  std::lock_guard lock(mutex_);
  for (const auto& r : records_) {
    if (r.user_id == record.user_id) return false;
  }
  records_.push_back(std::move(record));
  return true;
}

std::optional<EnrollmentRecord> EnrollmentStore::find(
    const std::string& user_id) const {
  std::lock_guard lock(mutex_);
  for (const auto& r : records_) {
    if (r.user_id == user_id) return r;
  }
  return std::nullopt;
}

std::size_t EnrollmentStore::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

verify::VerificationOutcome run_verification(const EnrollmentRecord& record,
                                             const std::string& password,
                                             const VerifySettings& settings,
                                             uint64_t seed) {
  const qcirc::NoiseModel noise =
      qcirc::NoiseModel::preset(settings.noise, verify::kTotalQubits);
  verify::VerificationOutcome first;
  double aggregate = 1.0;
  for (std::size_t i = 0; i < record.keysets.size(); ++i) {
    const trapauth::KeySet& program_keys = record.keysets[i];
    const trapauth::KeySet attempt = trapauth::derive_keys(
        trapauth::Password{password}, program_keys.salt);
    const auto prepared =
        trapauth::prepare_program(program_keys, /*delegated=*/true);
    const qcirc::Circuit circuit =
        verify::build_verification(prepared.program, attempt, settings.mode);
    const qcirc::CountsMap raw =
        qcirc::sample(circuit, settings.shots, noise, derive_seed(seed, i));
    verify::VerificationOutcome outcome =
        verify::postprocess(raw, attempt, prepared.frame, settings.mode);
    aggregate *= outcome.pass_fraction;
    if (i == 0) first = std::move(outcome);
  }
  // Report the multi-instance product through the first instance's record.
  first.pass_fraction = aggregate;
  first.passed = static_cast<uint64_t>(aggregate * first.shots + 0.5);
  return first;
}

EnrollmentRecord make_enrollment(const std::string& user_id,
                                 const std::string& password,
                                 const trapauth::Salt& salt,
                                 const VerifySettings& settings,
                                 uint64_t calibration_seed) {
  EnrollmentRecord record;
  record.user_id = user_id;
  record.salt = salt;
  record.created_at = now_seconds();
  for (int i = 0; i < settings.instances; ++i) {
    record.keysets.push_back(trapauth::derive_keys(
        trapauth::Password{password}, instance_salt(salt, i)));
  }
  record.policy.tau = 0.5;
  record.policy.min_shots = std::min<uint64_t>(settings.shots, 100);
  if (settings.noise != "ideal") {
    // Calibrate against the noise floor: accept at half the measured
    // correct-password baseline.
    const auto baseline =
        run_verification(record, password, settings, calibration_seed);
    if (baseline.pass_fraction > 0.0) {
      record.policy.tau = baseline.pass_fraction / 2.0;
    }
  }
  return record;
}

AuthServer::AuthServer(AuthServerConfig config)
    : config_(std::move(config)),
      store_(config_.store_path),
      keypair_(kem::kem_keygen(
          kem::KemParams::by_name(config_.kem_profile),
          config_.seed ? derive_seed(*config_.seed, 0x4b) : [] {
            const auto raw = crypto::random_bytes(8);
            uint64_t s = 0;
            for (int i = 0; i < 8; ++i) {
              s |= static_cast<uint64_t>(raw[i]) << (8 * i);
            }
            return s;
          }())) {}

AuthServer::~AuthServer() { stop(); }

uint16_t AuthServer::port() const {
  return listener_ ? listener_->port() : 0;
}

void AuthServer::start() {
  listener_ = std::make_unique<net::Listener>(config_.port);
  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void AuthServer::stop() {
  if (!running_.exchange(false)) return;
  if (listener_) listener_->close();
  if (accept_thread_.joinable()) accept_thread_.join();
  std::lock_guard lock(sessions_mutex_);
  for (auto& t : sessions_) {
    if (t.joinable()) t.join();
  }
  sessions_.clear();
}

void AuthServer::accept_loop() {
  while (running_) {
    net::Socket sock = listener_->accept();
    if (!sock.valid()) break;
    std::lock_guard lock(sessions_mutex_);
    sessions_.emplace_back(
        [this, s = std::move(sock)]() mutable { handle_session(std::move(s)); });
  }
}

void AuthServer::handle_session(net::Socket sock) {
  try {
    channel::SecureChannel ch = channel::server_handshake(
        sock, keypair_, crypto::Drbg(fresh_seed(config_.seed, op_counter_)));
    auto frame = ch.recv(sock);
    if (!frame) return;
    if (frame->type != channel::kEncPassword) {
      const std::string err = R"({"error":"unexpected message"})";
      ch.send(sock, channel::kError, string_to_bytes(err));
      return;
    }
    const json req = json::parse(bytes_to_string(frame->payload));
    const std::string op = req.at("op").get<std::string>();
    const std::string user_id = req.at("user_id").get<std::string>();
    const std::string password = req.at("password").get<std::string>();

    if (op == "enroll") {
      trapauth::Salt salt{};
      if (config_.seed) {
        crypto::Drbg drbg(fresh_seed(config_.seed, op_counter_));
        drbg.fill(salt);
      } else {
        const auto raw = crypto::random_bytes(salt.size());
        std::copy(raw.begin(), raw.end(), salt.begin());
      }
      auto record =
          make_enrollment(user_id, password, salt, config_.verify,
                          fresh_seed(config_.seed, op_counter_));
      if (config_.tau_override > 0.0) {
        record.policy.tau = config_.tau_override;
      }
      if (!store_.enroll(std::move(record))) {
        const std::string err = R"({"error":"duplicate_user"})";
        ch.send(sock, channel::kError, string_to_bytes(err));
        return;
      }
      store_.save();
      json resp{{"result", "enrolled"}};
      ch.send(sock, channel::kAuthResult, string_to_bytes(resp.dump()));
      return;
    }

    if (op != "login") {
      const std::string err = R"({"error":"unknown operation"})";
      ch.send(sock, channel::kError, string_to_bytes(err));
      return;
    }

    // Login requires the redirect token issued by the application server.
    const std::string nonce = req.value("nonce", "");
    const std::string mac_hex = req.value("mac", "");
    const auto expected = relay_mac(config_.relay_secret, user_id, nonce,
                                    "redirect");
    if (nonce.empty() ||
        !crypto::constant_time_equal(crypto::from_hex(mac_hex), expected)) {
      const std::string err = R"({"error":"invalid redirect token"})";
      ch.send(sock, channel::kError, string_to_bytes(err));
      return;
    }

    const auto record = store_.find(user_id);
    if (!record) {
      json resp{{"result", "unknown_user"}};
      ch.send(sock, channel::kAuthResult, string_to_bytes(resp.dump()));
      return;
    }
    const auto outcome =
        run_verification(*record, password, config_.verify,
                         fresh_seed(config_.seed, op_counter_));
    verify::AcceptPolicy policy = record->policy;
    if (config_.tau_override > 0.0) policy.tau = config_.tau_override;
    const bool accept =
        verify::decide(outcome, policy) == verify::Decision::Accept;
    const std::string result = accept ? "accept" : "reject";
    json resp{{"result", result},
              {"pass_fraction", outcome.pass_fraction},
              {"result_mac",
               crypto::to_hex(relay_mac(config_.relay_secret, user_id, nonce,
                                        "result|" + result))}};
    ch.send(sock, channel::kAuthResult, string_to_bytes(resp.dump()));
  } catch (const std::exception&) {
    // Session aborted (tampering, handshake failure, malformed JSON).
  }
}

AppServer::AppServer(AppServerConfig config)
    : config_(std::move(config)),
      keypair_(kem::kem_keygen(
          kem::KemParams::by_name(config_.kem_profile),
          config_.seed ? derive_seed(*config_.seed, 0xa4) : [] {
            const auto raw = crypto::random_bytes(8);
            uint64_t s = 0;
            for (int i = 0; i < 8; ++i) {
              s |= static_cast<uint64_t>(raw[i]) << (8 * i);
            }
            return s;
          }())) {}

AppServer::~AppServer() { stop(); }

uint16_t AppServer::port() const {
  return listener_ ? listener_->port() : 0;
}

void AppServer::start() {
  listener_ = std::make_unique<net::Listener>(config_.port);
  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void AppServer::stop() {
  if (!running_.exchange(false)) return;
  if (listener_) listener_->close();
  if (accept_thread_.joinable()) accept_thread_.join();
  std::lock_guard lock(sessions_mutex_);
  for (auto& t : sessions_) {
    if (t.joinable()) t.join();
  }
  sessions_.clear();
}

void AppServer::accept_loop() {
  while (running_) {
    net::Socket sock = listener_->accept();
    if (!sock.valid()) break;
    std::lock_guard lock(sessions_mutex_);
    sessions_.emplace_back(
        [this, s = std::move(sock)]() mutable { handle_session(std::move(s)); });
  }
}

void AppServer::handle_session(net::Socket sock) {
  try {
    channel::SecureChannel ch = channel::server_handshake(
        sock, keypair_, crypto::Drbg(fresh_seed(config_.seed, op_counter_)));
    for (;;) {
      auto frame = ch.recv(sock);
      if (!frame) return;
      const json req = json::parse(bytes_to_string(frame->payload));
      if (frame->type == channel::kRedirect) {
        // Login request: hand out the signed token pointing at the
        // authentication server.
        const std::string user_id = req.at("user_id").get<std::string>();
        const std::string nonce = crypto::to_hex(crypto::random_bytes(16));
        json resp{{"auth_host", config_.auth_host},
                  {"auth_port", config_.auth_port},
                  {"user_id", user_id},
                  {"nonce", nonce},
                  {"mac", crypto::to_hex(relay_mac(config_.relay_secret,
                                                   user_id, nonce,
                                                   "redirect"))}};
        ch.send(sock, channel::kRedirect, string_to_bytes(resp.dump()));
      } else if (frame->type == channel::kAuthResult) {
        // Result token relayed back by the client; route accordingly.
        const std::string user_id = req.at("user_id").get<std::string>();
        const std::string nonce = req.at("nonce").get<std::string>();
        const std::string result = req.at("result").get<std::string>();
        const auto expected = relay_mac(config_.relay_secret, user_id, nonce,
                                        "result|" + result);
        json resp;
        if (crypto::constant_time_equal(
                crypto::from_hex(req.value("result_mac", "")), expected) &&
            result == "accept") {
          resp["location"] = "/home";
        } else {
          resp["location"] = "/login-failed";
        }
        ch.send(sock, channel::kRedirect, string_to_bytes(resp.dump()));
        return;
      } else {
        const std::string err = R"({"error":"unexpected message"})";
        ch.send(sock, channel::kError, string_to_bytes(err));
        return;
      }
    }
  } catch (const std::exception&) {
  }
}

namespace {

uint64_t client_seed(uint64_t seed, uint64_t salt) {
  if (seed != 0) return derive_seed(seed, salt);
  const auto raw = crypto::random_bytes(8);
  uint64_t s = 0;
  for (int i = 0; i < 8; ++i) s |= static_cast<uint64_t>(raw[i]) << (8 * i);
  return s;
}

}  // namespace

AuthOutcome client_enroll(const std::string& auth_host, uint16_t auth_port,
                          const std::string& user_id,
                          const std::string& password, uint64_t seed) {
  net::Socket sock = net::tcp_connect(auth_host, auth_port);
  channel::SecureChannel ch =
      channel::client_handshake(sock, crypto::Drbg(client_seed(seed, 1)));
  json req{{"op", "enroll"}, {"user_id", user_id}, {"password", password}};
  ch.send(sock, channel::kEncPassword, string_to_bytes(req.dump()));
  auto resp = ch.recv(sock);
  if (!resp) throw channel::ProtocolError("server closed connection");
  const json body = json::parse(bytes_to_string(resp->payload));
  if (resp->type == channel::kError) {
    return AuthOutcome{body.value("error", "error"), 0.0, ""};
  }
  return AuthOutcome{body.at("result").get<std::string>(), 0.0, ""};
}

AuthOutcome client_login(const std::string& app_host, uint16_t app_port,
                         const std::string& user_id,
                         const std::string& password, uint64_t seed) {
  // Step 1: ask the application server for the login redirect.
  net::Socket app_sock = net::tcp_connect(app_host, app_port);
  channel::SecureChannel app_ch = channel::client_handshake(
      app_sock, crypto::Drbg(client_seed(seed, 2)));
  json login_req{{"user_id", user_id}};
  app_ch.send(app_sock, channel::kRedirect,
              string_to_bytes(login_req.dump()));
  auto redirect = app_ch.recv(app_sock);
  if (!redirect || redirect->type != channel::kRedirect) {
    throw channel::ProtocolError("no redirect from application server");
  }
  const json token = json::parse(bytes_to_string(redirect->payload));

  // Step 2: authenticate against the quantum authentication server.
  net::Socket auth_sock =
      net::tcp_connect(token.at("auth_host").get<std::string>(),
                       token.at("auth_port").get<uint16_t>());
  channel::SecureChannel auth_ch = channel::client_handshake(
      auth_sock, crypto::Drbg(client_seed(seed, 3)));
  json auth_req{{"op", "login"},
                {"user_id", user_id},
                {"password", password},
                {"nonce", token.at("nonce").get<std::string>()},
                {"mac", token.at("mac").get<std::string>()}};
  auth_ch.send(auth_sock, channel::kEncPassword,
               string_to_bytes(auth_req.dump()));
  auto result = auth_ch.recv(auth_sock);
  if (!result) throw channel::ProtocolError("auth server closed connection");
  const json body = json::parse(bytes_to_string(result->payload));
  AuthOutcome outcome;
  if (result->type == channel::kError) {
    outcome.result = body.value("error", "error");
    return outcome;
  }
  outcome.result = body.at("result").get<std::string>();
  outcome.pass_fraction = body.value("pass_fraction", 0.0);

  // Step 3: relay the result token for the final redirect.
  json report{{"user_id", user_id},
              {"nonce", token.at("nonce").get<std::string>()},
              {"result", outcome.result},
              {"result_mac", body.value("result_mac", "")}};
  app_ch.send(app_sock, channel::kAuthResult, string_to_bytes(report.dump()));
  auto final_redirect = app_ch.recv(app_sock);
  if (final_redirect && final_redirect->type == channel::kRedirect) {
    outcome.location = json::parse(bytes_to_string(final_redirect->payload))
                           .value("location", "");
  }
  return outcome;
}

}  // namespace qpauth::authnet
