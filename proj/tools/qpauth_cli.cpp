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

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qpauth/authnet.hpp"
#include "qpauth/game.hpp"
#include "qpauth/mitigation.hpp"
#include "qpauth/qcirc.hpp"
#include "qpauth/trapauth.hpp"
#include "qpauth/verify.hpp"

namespace {

using namespace qpauth;

volatile std::sig_atomic_t g_stop = 0;

void handle_signal(int) { g_stop = 1; }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out.good()) throw std::runtime_error("cannot write " + path);
  out << content;
}

uint64_t seed_or_env(uint64_t seed_flag) {
  if (seed_flag != 0) return seed_flag;
  if (const char* env = std::getenv("QPAUTH_SEED")) {
    return std::strtoull(env, nullptr, 0);
  }
  return 1;
}

struct ExperimentOptions {
  std::string noise = "ideal";
  uint64_t shots = 5000;
  int trials = 10;
  std::string mode = "phase";
  uint64_t seed = 0;
  std::string out;
  std::string password = "hunter2";
  int point_bits = 256;
};

void add_experiment_flags(CLI::App* cmd, ExperimentOptions& opt) {
  cmd->add_option("--noise", opt.noise, "noise preset")
      ->check(CLI::IsMember(qcirc::NoiseModel::preset_names()));
  cmd->add_option("--shots", opt.shots, "shots per circuit")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--trials", opt.trials, "independent trials per test")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--mode", opt.mode, "verification mode")
      ->check(CLI::IsMember({"phase", "bitphase"}));
  cmd->add_option("--seed", opt.seed, "master seed (0 = QPAUTH_SEED or 1)");
  cmd->add_option("--out", opt.out, "output directory");
  cmd->add_option("--password", opt.password, "enrolled password");
  cmd->add_option("--point-bits", opt.point_bits, "point length in bits")
      ->check(CLI::PositiveNumber);
}

void emit_histograms(const std::string& dir, int test,
                     const game::TestHistograms& hist) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string base = dir + "/test" + std::to_string(test);
  write_file(base + "_raw.csv", hist.raw.to_csv());
  write_file(base + "_post.csv", hist.post.to_csv());
  write_file(base + "_raw.json", hist.raw.to_json().dump(2) + "\n");
  write_file(base + "_post.json", hist.post.to_json().dump(2) + "\n");
}

int cmd_run_test(int test_id, const ExperimentOptions& opt,
                 std::optional<int> target) {
  game::TestSpec spec = game::TestSpec::standard(test_id);
  spec.trials = opt.trials;
  spec.shots = opt.shots;
  spec.noise = opt.noise;
  spec.mode = verify::mode_from_name(opt.mode);
  spec.target_qubit = target;
  const trapauth::Password password{opt.password, opt.point_bits};
  game::TestHistograms hist;
  const game::RateRecord rec =
      game::run_test(spec, password, seed_or_env(opt.seed), &hist);
  std::cout << rec.to_json().dump(2) << "\n";
  if (!opt.out.empty()) {
    std::filesystem::create_directories(opt.out);
    write_file(opt.out + "/test" + std::to_string(test_id) + ".json",
               rec.to_json().dump(2) + "\n");
    emit_histograms(opt.out, test_id, hist);
  }
  return 0;
}

int cmd_run_suite(const ExperimentOptions& opt) {
  const auto specs =
      game::standard_suite(opt.trials, opt.shots, opt.noise,
                           verify::mode_from_name(opt.mode));
  const trapauth::Password password{opt.password, opt.point_bits};
  const game::SuiteResult result =
      game::run_suite(specs, password, seed_or_env(opt.seed));
  std::cout << result.table.to_csv();
  if (!opt.out.empty()) {
    std::filesystem::create_directories(opt.out);
    write_file(opt.out + "/rate_table.json",
               result.table.to_json().dump(2) + "\n");
    write_file(opt.out + "/rate_table.csv", result.table.to_csv());
    for (const auto& [test, hist] : result.histograms) {
      emit_histograms(opt.out, test, hist);
    }
  }
  return 0;
}

int cmd_histogram(const ExperimentOptions& opt) {
  game::TestSpec spec = game::TestSpec::standard(1);
  spec.trials = 1;
  spec.shots = opt.shots;
  spec.noise = opt.noise;
  spec.mode = verify::mode_from_name(opt.mode);
  const trapauth::Password password{opt.password, opt.point_bits};
  game::TestHistograms hist;
  game::run_test(spec, password, seed_or_env(opt.seed), &hist);
  if (opt.out.empty()) {
    std::cout << hist.post.to_csv();
  } else {
    emit_histograms(opt.out, 1, hist);
    std::cout << "wrote histograms to " << opt.out << "\n";
  }
  return 0;
}

int cmd_calibrate(const std::string& noise, int qubits, uint64_t shots,
                  const std::string& method, uint64_t seed,
                  const std::string& out, const std::string& apply) {
  std::vector<int> targets(qubits);
  for (int i = 0; i < qubits; ++i) targets[i] = i;
  const auto model = qcirc::NoiseModel::preset(noise, qubits);
  const auto cal = mitigation::calibrate(
      model, targets, shots,
      method == "complete" ? mitigation::Method::Complete
                           : mitigation::Method::Tensored,
      seed_or_env(seed));
  const std::string dump = cal.to_json().dump(2) + "\n";
  if (out.empty()) {
    std::cout << dump;
  } else {
    write_file(out, dump);
  }
  if (!apply.empty()) {
    std::ifstream in(apply);
    if (!in.good()) throw std::runtime_error("cannot read " + apply);
    nlohmann::json j;
    in >> j;
    const auto raw = qcirc::CountsMap::from_json(j);
    const auto mitigated = mitigation::mitigate(raw, cal);
    nlohmann::json out_j;
    for (const auto& [bits, p] : mitigated) out_j[bits] = p;
    std::cout << out_j.dump(2) << "\n";
  }
  return 0;
}

int cmd_depth_report(const ExperimentOptions& opt) {
  const uint64_t seed = seed_or_env(opt.seed);
  std::cout << "keyset,delegated_depth,naive_depth,ratio\n";
  double min_ratio = 1e9, max_ratio = 0.0;
  for (int i = 0; i < opt.trials; ++i) {
    crypto::Drbg drbg(derive_seed(seed, i));
    trapauth::Salt salt{};
    drbg.fill(salt);
    const auto keys = trapauth::derive_keys(
        trapauth::Password{opt.password, opt.point_bits}, salt);

    const auto delegated = trapauth::prepare_program(keys, true);
    const qcirc::Circuit fast = verify::build_verification(
        delegated.program, keys, verify::mode_from_name(opt.mode));
    const qcirc::Circuit slow = verify::build_naive_pipeline(
        keys, verify::mode_from_name(opt.mode));

    const int fast_depth = qcirc::depth(fast);
    const int slow_depth = qcirc::depth(slow);
    const double ratio =
        static_cast<double>(slow_depth) / static_cast<double>(fast_depth);
    min_ratio = std::min(min_ratio, ratio);
    max_ratio = std::max(max_ratio, ratio);
    std::cout << i << "," << fast_depth << "," << slow_depth << "," << ratio
              << "\n";
  }
  std::cout << "# ratio range [" << min_ratio << ", " << max_ratio << "]\n";
  return 0;
}

int serve_loop(const std::function<void()>& stop) {
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  while (!g_stop) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  stop();
  return 0;
}

std::pair<std::string, uint16_t> split_addr(const std::string& addr) {
  const auto pos = addr.rfind(':');
  if (pos == std::string::npos) {
    throw CLI::ValidationError("address must be host:port");
  }
  return {addr.substr(0, pos),
          static_cast<uint16_t>(std::stoi(addr.substr(pos + 1)))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Copy-protected password authentication toolkit"};
  app.require_subcommand(1);

  ExperimentOptions opt;
  int test_id = 1;
  std::optional<int> target;

  auto* run_test = app.add_subcommand("run-test", "run one correctness test");
  run_test->add_option("id", test_id, "test number 1..6")
      ->required()
      ->check(CLI::Range(1, 6));
  run_test->add_option("--target", target,
                       "data qubit for injected errors (default random)");
  add_experiment_flags(run_test, opt);

  auto* run_suite =
      app.add_subcommand("run-suite", "run all six correctness tests");
  add_experiment_flags(run_suite, opt);

  auto* histogram = app.add_subcommand(
      "histogram", "post-processed syndrome histogram for test 1");
  add_experiment_flags(histogram, opt);
  histogram->get_option("--shots")->default_val(8192);

  std::string cal_noise = "mock-device", cal_method = "tensored";
  std::string cal_out, cal_apply;
  int cal_qubits = 6;
  uint64_t cal_shots = 10000, cal_seed = 0;
  auto* calibrate =
      app.add_subcommand("calibrate", "readout calibration matrices");
  calibrate->add_option("--noise", cal_noise, "noise preset")
      ->check(CLI::IsMember(qcirc::NoiseModel::preset_names()));
  calibrate->add_option("--qubits", cal_qubits, "register width")
      ->check(CLI::Range(1, 20));
  calibrate->add_option("--shots", cal_shots, "shots per basis state");
  calibrate->add_option("--method", cal_method, "tensored or complete")
      ->check(CLI::IsMember({"tensored", "complete"}));
  calibrate->add_option("--seed", cal_seed, "sampling seed");
  calibrate->add_option("--out", cal_out, "calibration JSON output file");
  calibrate->add_option("--apply", cal_apply,
                        "counts JSON file to mitigate with the calibration");

  auto* depth_report = app.add_subcommand(
      "depth-report", "delegated vs naive pipeline depth comparison");
  add_experiment_flags(depth_report, opt);

  authnet::AuthServerConfig auth_cfg;
  std::string auth_listen = "0", auth_mode = "phase";
  uint64_t auth_seed = 0;
  auto* serve_auth =
      app.add_subcommand("serve-auth", "run the authentication server");
  serve_auth->add_option("--listen", auth_listen, "port (0 = ephemeral)");
  serve_auth->add_option("--store", auth_cfg.store_path, "enrollment store");
  serve_auth->add_option("--noise", auth_cfg.verify.noise, "noise preset")
      ->check(CLI::IsMember(qcirc::NoiseModel::preset_names()));
  serve_auth->add_option("--shots", auth_cfg.verify.shots, "shots per login");
  serve_auth->add_option("--mode", auth_mode, "verification mode")
      ->check(CLI::IsMember({"phase", "bitphase"}));
  serve_auth->add_option("--tau", auth_cfg.tau_override,
                         "accept threshold override (0 = auto)");
  serve_auth->add_option("--instances", auth_cfg.verify.instances,
                         "independent program instances per login")
      ->check(CLI::Range(1, 8));
  serve_auth->add_option("--relay-secret", auth_cfg.relay_secret,
                         "shared secret with the application server");
  serve_auth->add_option("--kem", auth_cfg.kem_profile, "KEM profile")
      ->check(CLI::IsMember({"toy", "default"}));
  serve_auth->add_option("--seed", auth_seed, "deterministic master seed");

  authnet::AppServerConfig app_cfg;
  std::string app_listen = "0", auth_addr = "127.0.0.1:7601";
  uint64_t app_seed = 0;
  auto* serve_app =
      app.add_subcommand("serve-app", "run the application server");
  serve_app->add_option("--listen", app_listen, "port (0 = ephemeral)");
  serve_app->add_option("--auth-addr", auth_addr,
                        "authentication server host:port");
  serve_app->add_option("--relay-secret", app_cfg.relay_secret,
                        "shared secret with the authentication server");
  serve_app->add_option("--kem", app_cfg.kem_profile, "KEM profile")
      ->check(CLI::IsMember({"toy", "default"}));
  serve_app->add_option("--seed", app_seed, "deterministic master seed");

  std::string client_user, client_password, client_addr;
  uint64_t client_seed = 0;
  auto* client = app.add_subcommand("client", "enroll or log in");
  client->require_subcommand(1);
  auto* enroll = client->add_subcommand("enroll", "enroll a user");
  enroll->add_option("--auth-addr", client_addr, "auth server host:port")
      ->required();
  enroll->add_option("--user", client_user, "user id")->required();
  enroll->add_option("--password", client_password, "password")->required();
  enroll->add_option("--seed", client_seed, "client randomness seed");
  auto* login = client->add_subcommand("login", "log a user in");
  login->add_option("--app-addr", client_addr, "application server host:port")
      ->required();
  login->add_option("--user", client_user, "user id")->required();
  login->add_option("--password", client_password, "password")->required();
  login->add_option("--seed", client_seed, "client randomness seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run_test->parsed()) return cmd_run_test(test_id, opt, target);
    if (run_suite->parsed()) return cmd_run_suite(opt);
    if (histogram->parsed()) return cmd_histogram(opt);
    if (calibrate->parsed()) {
      return cmd_calibrate(cal_noise, cal_qubits, cal_shots, cal_method,
                           cal_seed, cal_out, cal_apply);
    }
    if (depth_report->parsed()) return cmd_depth_report(opt);
    if (serve_auth->parsed()) {
      auth_cfg.port = static_cast<uint16_t>(std::stoi(auth_listen));
      auth_cfg.verify.mode = verify::mode_from_name(auth_mode);
      if (auth_seed != 0) {
        auth_cfg.seed = auth_seed;
      } else if (const char* env = std::getenv("QPAUTH_SEED")) {
        auth_cfg.seed = std::strtoull(env, nullptr, 0);
      }
      authnet::AuthServer server(auth_cfg);
      server.start();
      std::cout << "auth server listening on 127.0.0.1:" << server.port()
                << "\n";
      return serve_loop([&] { server.stop(); });
    }
    if (serve_app->parsed()) {
      app_cfg.port = static_cast<uint16_t>(std::stoi(app_listen));
      auto [host, port] = split_addr(auth_addr);
      app_cfg.auth_host = host;
      app_cfg.auth_port = port;
      if (app_seed != 0) {
        app_cfg.seed = app_seed;
      } else if (const char* env = std::getenv("QPAUTH_SEED")) {
        app_cfg.seed = std::strtoull(env, nullptr, 0);
      }
      authnet::AppServer server(app_cfg);
      server.start();
      std::cout << "application server listening on 127.0.0.1:"
                << server.port() << "\n";
      return serve_loop([&] { server.stop(); });
    }
    if (enroll->parsed()) {
      auto [host, port] = split_addr(client_addr);
      const auto outcome = authnet::client_enroll(host, port, client_user,
                                                  client_password,
                                                  client_seed);
      std::cout << nlohmann::json{{"result", outcome.result}}.dump() << "\n";
      return outcome.result == "enrolled" ? 0 : 3;
    }
    if (login->parsed()) {
      auto [host, port] = split_addr(client_addr);
      const auto outcome = authnet::client_login(host, port, client_user,
                                                 client_password,
                                                 client_seed);
      std::cout << nlohmann::json{{"result", outcome.result},
                                  {"pass_fraction", outcome.pass_fraction},
                                  {"location", outcome.location}}
                       .dump()
                << "\n";
      return outcome.result == "accept" ? 0 : 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
