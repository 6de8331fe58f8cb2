// Copyright 2026 The SwinScan Authors
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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "swinscan/report/report.hpp"
#include "swinscan/swin.hpp"

namespace swinscan::report {

inline constexpr std::size_t kMaxRequestBytes = std::size_t{8} << 20;

using Clock = std::function<std::chrono::system_clock::time_point()>;

/// "YYYY-MM-DDTHH:MM:SSZ", truncated to whole seconds.
std::string format_timestamp(std::chrono::system_clock::time_point t);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);

struct Response {
  int status = 200;
  std::string content_type;
  std::string body;
};

/// Everything one request produces, before serialization.
struct Prediction {
  DiagnosticReport report;
  segment::RgbImage highlighted;
};

/// Stateless prediction service over two immutable models. All handlers
/// are const and safe to call concurrently.
class Service {
 public:
  Service(swin::ModelWeights detection, swin::ModelWeights classification, ModelVersions versions,
          Clock clock = std::chrono::system_clock::now);

  /// Loads both weight files; versions are "sha256:" digests of the file
  /// bytes.
  static Service from_files(const std::filesystem::path& detection, const std::filesystem::path& classification,
                            Clock clock = std::chrono::system_clock::now);

  Prediction run(const PredictRequest& request) const;

  Response predict(std::string_view body) const;     // application/json
  Response report_pdf(std::string_view body) const;  // application/pdf
  Response health() const;

  const ModelVersions& versions() const { return versions_; }

 private:
  template <class F>
  Response guarded(std::string_view body, F&& render) const;

  swin::ModelWeights detection_, classification_;
  ModelVersions versions_;
  Clock clock_;
};

Response error_response(int status, std::string_view code, std::string_view message);

/// Flag wins over SWINSCAN_PORT; 8080 when neither is set. Throws
/// ConfigError for a malformed or out-of-range value.
int resolve_port(std::optional<int> flag, const char* env_value);

/// HTTP front end: POST /v1/predict, POST /v1/report.pdf, GET /v1/health.
class HttpServer {
 public:
  explicit HttpServer(const Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace swinscan::report
