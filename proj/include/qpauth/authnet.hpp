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

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qpauth/channel.hpp"
#include "qpauth/kem.hpp"
#include "qpauth/net.hpp"
#include "qpauth/trapauth.hpp"
#include "qpauth/verify.hpp"

namespace qpauth::authnet {

struct EnrollmentRecord {
  std::string user_id;
  trapauth::Salt salt{};
  /// One key set per program instance; instance i derives its salt from the
  /// base salt, and a login must pass every instance.
  std::vector<trapauth::KeySet> keysets;
  verify::AcceptPolicy policy;
  int64_t created_at = 0;

  nlohmann::json to_json() const;
  static EnrollmentRecord from_json(const nlohmann::json& j);
};

/// JSON-file persistence with exclusive access and atomic replace on save
/// (write temp file, then rename).
class EnrollmentStore {
 public:
  EnrollmentStore() = default;
  /// Loads `path` if it exists. A missing file yields an empty store; a
  /// corrupt file throws with the parser's position diagnostics.
  explicit EnrollmentStore(std::string path);

  void save() const;

  /// False if the user already exists.
  bool enroll(EnrollmentRecord record);
  std::optional<EnrollmentRecord> find(const std::string& user_id) const;
  std::size_t size() const;

 private:
  std::string path_;
  mutable std::mutex mutex_;
  std::vector<EnrollmentRecord> records_;
};

struct VerifySettings {
  std::string noise = "ideal";
  uint64_t shots = 5000;
  verify::VerificationMode mode = verify::VerificationMode::PhaseOnly;
  int instances = 1;
};

/// Builds the enrolled program(s), derives attempt keys from the submitted
/// password, runs the sampling pipeline and post-processing. The aggregate
/// pass fraction over instances is their product.
verify::VerificationOutcome run_verification(
    const EnrollmentRecord& record, const std::string& password,
    const VerifySettings& settings, uint64_t seed);

/// Enrollment record construction: fresh key sets from the password and
/// salt. For noisy backends the accept threshold is calibrated to half the
/// correct-password baseline measured at enrollment time.
EnrollmentRecord make_enrollment(const std::string& user_id,
                                 const std::string& password,
                                 const trapauth::Salt& salt,
                                 const VerifySettings& settings,
                                 uint64_t calibration_seed);

struct AuthServerConfig {
  uint16_t port = 0;  // 0 picks a free port
  std::string store_path = "enrollments.json";
  VerifySettings verify;
  double tau_override = 0.0;  // 0 = policy from enrollment record
  std::string relay_secret = "dev-relay-secret";
  std::string kem_profile = "toy";
  std::optional<uint64_t> seed;  // deterministic mode for tests
};

struct AppServerConfig {
  uint16_t port = 0;
  std::string auth_host = "127.0.0.1";
  uint16_t auth_port = 0;
  std::string relay_secret = "dev-relay-secret";
  std::string kem_profile = "toy";
  std::optional<uint64_t> seed;
};

class AuthServer {
 public:
  explicit AuthServer(AuthServerConfig config);
  ~AuthServer();

  uint16_t port() const;
  void start();
  void stop();

 private:
  void accept_loop();
  void handle_session(net::Socket sock);

  AuthServerConfig config_;
  EnrollmentStore store_;
  kem::KemKeypair keypair_;
  std::unique_ptr<net::Listener> listener_;
  std::thread accept_thread_;
  std::vector<std::thread> sessions_;
  std::mutex sessions_mutex_;
  std::atomic<uint64_t> op_counter_{0};
  std::atomic<bool> running_{false};
};

class AppServer {
 public:
  explicit AppServer(AppServerConfig config);
  ~AppServer();

  uint16_t port() const;
  void start();
  void stop();

 private:
  void accept_loop();
  void handle_session(net::Socket sock);

  AppServerConfig config_;
  kem::KemKeypair keypair_;
  std::unique_ptr<net::Listener> listener_;
  std::thread accept_thread_;
  std::vector<std::thread> sessions_;
  std::mutex sessions_mutex_;
  std::atomic<uint64_t> op_counter_{0};
  std::atomic<bool> running_{false};
};

struct AuthOutcome {
  std::string result;  // enrolled | accept | reject | unknown_user | error
  double pass_fraction = 0.0;
  std::string location;  // final redirect from the application server
};

/// Enrolls directly against the authentication server.
AuthOutcome client_enroll(const std::string& auth_host, uint16_t auth_port,
                          const std::string& user_id,
                          const std::string& password, uint64_t seed);

/// Full login flow: application server hands out a signed redirect token,
/// the authentication server verifies the password, and the result token
/// is relayed back for the final redirect.
AuthOutcome client_login(const std::string& app_host, uint16_t app_port,
                         const std::string& user_id,
                         const std::string& password, uint64_t seed);

}  // namespace qpauth::authnet
