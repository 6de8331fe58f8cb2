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

#include "swinscan/report/service.hpp"

#include <charconv>
#include <ctime>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "httplib.h"
#include "swinscan/data.hpp"
#include "swinscan/report/pdf.hpp"
#include "swinscan/weights_io.hpp"

namespace swinscan::report {

std::string format_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                     tm.tm_min, tm.tm_sec);
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::string hex;
  for (unsigned i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

namespace {

ClassResult classify(const swin::ModelWeights& w, const Tensor& image, const std::vector<std::string>& classes) {
  const auto p = swin::forward_classify(w, image);
  ClassResult r;
  r.class_id = p.label;
  r.label = classes.at(p.label);
  r.classes = classes;
  r.probabilities = p.probabilities;
  return r;
}

std::vector<std::string> names(data::Task task) {
  const auto v = data::class_names(task);
  return {v.begin(), v.end()};
}

}  // namespace

Service::Service(swin::ModelWeights detection, swin::ModelWeights classification, ModelVersions versions, Clock clock)
    : detection_(std::move(detection)),
      classification_(std::move(classification)),
      versions_(std::move(versions)),
      clock_(std::move(clock)) {
  if (detection_.config().num_classes != data::num_classes(data::Task::kDetection))
    throw ConfigError("detection weights must have 2 classes");
  if (classification_.config().num_classes != data::num_classes(data::Task::kClassification))
    throw ConfigError("classification weights must have 3 classes");
  if (!clock_) throw ContractError("service clock is empty");
}

Service Service::from_files(const std::filesystem::path& det, const std::filesystem::path& cls, Clock clock) {
  const auto det_bytes = swin::read_file_bytes(det);
  const auto cls_bytes = swin::read_file_bytes(cls);
  ModelVersions v{"sha256:" + sha256_hex(det_bytes), "sha256:" + sha256_hex(cls_bytes)};
  return Service(swin::deserialize_weights(det_bytes), swin::deserialize_weights(cls_bytes), std::move(v),
                 std::move(clock));
}

Prediction Service::run(const PredictRequest& req) const {
  data::Image image;
  try {
    image = data::load_pnm(req.image);
  } catch (const ParseError& e) {
    throw RequestError(RequestErrorCode::kBadImage, e.what());
  }
  const data::PreprocessConfig pre;
  const data::Image prepared = data::normalize(data::prepare(image, pre), pre);
  const Tensor x = Tensor::from({prepared.channels, prepared.height, prepared.width}, prepared.pixels);

  ReportInputs in;
  in.task = req.task;
  in.patient_ref = req.patient_ref;
  in.detection = classify(detection_, x, names(data::Task::kDetection));
  if (req.task != RequestTask::kDetect && in.detection->label == "Yes")
    in.classification = classify(classification_, x, names(data::Task::kClassification));

  // Size is measured on the uploaded resolution, not the 64x64 model input.
  auto seg = segment::segment(segment::RgbImage::from_image(image), req.pixel_spacing_mm);
  in.segmentation = summarize(seg, image.height, image.width);
  in.model_versions = versions_;
  in.timestamp = format_timestamp(clock_());
  return {build_report(in), std::move(seg.highlighted)};
}

Response error_response(int status, std::string_view code, std::string_view message) {
  return {status, "application/json", error_json(code, message).dump(2) + "\n"};
}

template <class F>
Response Service::guarded(std::string_view body, F&& render) const {
  if (body.size() > kMaxRequestBytes)
    return error_response(413, "payload_too_large",
                          fmt::format("request body of {} bytes exceeds {} bytes", body.size(), kMaxRequestBytes));
  try {
    return render(run(parse_predict_request(body)));
  } catch (const RequestError& e) {
    return error_response(400, request_error_name(e.code()), e.what());
  } catch (const LayoutError& e) {
    return error_response(422, "layout_error", e.what());
  } catch (const InputError& e) {
    return error_response(400, "bad_image", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal_error", e.what());
  }
}

Response Service::predict(std::string_view body) const {
  return guarded(body, [](const Prediction& p) { return Response{200, "application/json", report_json(p.report)}; });
}

Response Service::report_pdf(std::string_view body) const {
  return guarded(body, [](const Prediction& p) {
    const auto pdf = write_pdf(p.report, p.highlighted);
    return Response{200, "application/pdf", std::string(pdf.begin(), pdf.end())};
  });
}

Response Service::health() const {
  nlohmann::ordered_json j;
  j["status"] = "ok";
  j["version"] = kVersion;
  j["schema_version"] = kSchemaVersion;
  j["model_versions"] = {{"detection", versions_.detection}, {"classification", versions_.classification}};
  return {200, "application/json", j.dump(2) + "\n"};
}

int resolve_port(std::optional<int> flag, const char* env_value) {
  int port = 8080;
  if (flag) {
    port = *flag;
  } else if (env_value && *env_value) {
    const std::string_view s(env_value);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), port);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError(fmt::format("SWINSCAN_PORT '{}' is not a number", s));
  }
  if (port < 0 || port > 65535) throw ConfigError(fmt::format("port {} out of range", port));
  return port;
}

// ---- HTTP ----

struct HttpServer::Impl {
  explicit Impl(const Service& s) : service(s) {}
  const Service& service;
  httplib::Server server;
};

namespace {

void apply(const Response& r, httplib::Response& res) {
  res.status = r.status;
  res.set_content(r.body, r.content_type);
}

}  // namespace

HttpServer::HttpServer(const Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto& s = impl_->server;
  // One byte over the cap still reaches the service, which answers with
  // the JSON 413; anything larger is cut off by the transport.
  s.set_payload_max_length(kMaxRequestBytes + 1);
  const Service* svc = &impl_->service;
  s.Post("/v1/predict", [svc](const httplib::Request& req, httplib::Response& res) { apply(svc->predict(req.body), res); });
  s.Post("/v1/report.pdf",
         [svc](const httplib::Request& req, httplib::Response& res) { apply(svc->report_pdf(req.body), res); });
  s.Get("/v1/health", [svc](const httplib::Request&, httplib::Response& res) { apply(svc->health(), res); });
  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const auto code = res.status == 413 ? "payload_too_large" : res.status == 404 ? "not_found" : "bad_request";
    apply(error_response(res.status, code, httplib::status_message(res.status)), res);
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int p = impl_->server.bind_to_any_port(host);
    if (p < 0) throw Error("could not bind " + host);
    return p;
  }
  if (!impl_->server.bind_to_port(host, port)) throw Error(fmt::format("could not bind {}:{}", host, port));
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }
void HttpServer::stop() { impl_->server.stop(); }
void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace swinscan::report
