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

#include "swinscan/report/report.hpp"

#include <cmath>

#include "swinscan/error.hpp"
#include "swinscan/report/base64.hpp"

namespace swinscan::report {

using nlohmann::ordered_json;

std::string_view request_task_name(RequestTask task) {
  switch (task) {
    case RequestTask::kDetect:
      return "detect";
    case RequestTask::kClassify:
      return "classify";
    case RequestTask::kFull:
      break;
  }
  return "full";
}

std::string_view request_error_name(RequestErrorCode code) {
  switch (code) {
    case RequestErrorCode::kBadEncoding:
      return "bad_encoding";
    case RequestErrorCode::kBadImage:
      return "bad_image";
    case RequestErrorCode::kBadTask:
      return "bad_task";
    case RequestErrorCode::kBadRequest:
      break;
  }
  return "bad_request";
}

PredictRequest parse_predict_request(std::string_view body) {
  ordered_json j = ordered_json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw RequestError(RequestErrorCode::kBadRequest, "request body must be a JSON object");

  PredictRequest req;
  if (auto it = j.find("task"); it != j.end()) {
    if (!it->is_string()) throw RequestError(RequestErrorCode::kBadTask, "task must be a string");
    const auto t = it->get<std::string>();
    if (t == "detect") {
      req.task = RequestTask::kDetect;
    } else if (t == "classify") {
      req.task = RequestTask::kClassify;
    } else if (t == "full") {
      req.task = RequestTask::kFull;
    } else {
      throw RequestError(RequestErrorCode::kBadTask, "unknown task '" + t + "'");
    }
  }
  if (auto it = j.find("pixel_spacing_mm"); it != j.end() && !it->is_null()) {
    if (!it->is_number() || !(it->get<double>() > 0.0) || !std::isfinite(it->get<double>()))
      throw RequestError(RequestErrorCode::kBadRequest, "pixel_spacing_mm must be a positive number");
    req.pixel_spacing_mm = it->get<double>();
  }
  if (auto it = j.find("patient_ref"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw RequestError(RequestErrorCode::kBadRequest, "patient_ref must be a string");
    req.patient_ref = it->get<std::string>();
  }
  auto img = j.find("image");
  if (img == j.end()) throw RequestError(RequestErrorCode::kBadRequest, "missing image");
  if (!img->is_string()) throw RequestError(RequestErrorCode::kBadEncoding, "image must be a base64 string");
  try {
    req.image = base64_decode(img->get_ref<const std::string&>());
  } catch (const ParseError& e) {
    throw RequestError(RequestErrorCode::kBadEncoding, e.what());
  }
  return req;
}

SegmentationSummary summarize(const segment::SegmentationResult& r, std::size_t height, std::size_t width) {
  SegmentationSummary s;
  s.found = r.size.found;
  s.threshold = r.level;
  s.area_px = r.size.area_px;
  s.area_mm2 = r.size.area_mm2;
  s.bbox = r.size.bbox;
  s.centroid = r.size.centroid;
  s.image_height = height;
  s.image_width = width;
  return s;
}

DiagnosticReport build_report(const ReportInputs& in) {
  if (!in.detection) throw ContractError("a report needs a detection result");
  DiagnosticReport r;
  r.task = in.task;
  r.patient_ref = in.patient_ref;
  r.detection = in.detection;
  if (in.task != RequestTask::kDetect && in.detection->label == "Yes") r.classification = in.classification;
  r.segmentation = in.segmentation;
  r.model_versions = in.model_versions;
  r.timestamp = in.timestamp;
  return r;
}

namespace {

ordered_json class_json(const ClassResult& c) {
  ordered_json j;
  j["label"] = c.label;
  j["class_id"] = c.class_id;
  ordered_json probs;
  for (std::size_t i = 0; i < c.classes.size(); ++i) probs[c.classes[i]] = c.probabilities.at(i);
  j["probabilities"] = std::move(probs);
  return j;
}

}  // namespace

ordered_json to_json(const DiagnosticReport& r) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["task"] = std::string(request_task_name(r.task));
  if (r.patient_ref) j["patient_ref"] = *r.patient_ref;
  j["detection"] = class_json(*r.detection);
  if (r.classification) j["classification"] = class_json(*r.classification);

  const auto& s = r.segmentation;
  ordered_json seg;
  seg["found"] = s.found;
  seg["threshold"] = s.threshold;
  seg["area_px"] = s.area_px;
  seg["area_mm2"] = s.area_mm2 ? ordered_json(*s.area_mm2) : ordered_json();
  seg["bbox"] = s.bbox ? ordered_json::array({s.bbox->row0, s.bbox->col0, s.bbox->row1, s.bbox->col1}) : ordered_json();
  seg["centroid"] = s.centroid ? ordered_json::array({(*s.centroid)[0], (*s.centroid)[1]}) : ordered_json();
  seg["image_size"] = ordered_json::array({s.image_height, s.image_width});
  j["segmentation"] = std::move(seg);

  ordered_json mv;
  mv["detection"] = r.model_versions.detection;
  mv["classification"] = r.model_versions.classification.empty() ? ordered_json() : ordered_json(r.model_versions.classification);
  j["model_versions"] = std::move(mv);
  j["software_version"] = kVersion;
  j["timestamp"] = r.timestamp;
  j["disclaimer"] = r.disclaimer;
  return j;
}

std::string report_json(const DiagnosticReport& report) { return to_json(report).dump(2) + "\n"; }

ordered_json error_json(std::string_view code, std::string_view message) {
  ordered_json e;
  e["code"] = std::string(code);
  e["message"] = std::string(message);
  ordered_json j;
  j["error"] = std::move(e);
  return j;
}

}  // namespace swinscan::report
