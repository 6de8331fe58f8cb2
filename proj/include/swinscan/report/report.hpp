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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "swinscan/error.hpp"
#include "swinscan/segment.hpp"

namespace swinscan::report {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kDisclaimer =
    "Research software. Predictions are produced by an automated model and are not a medical diagnosis; "
    "every finding must be reviewed by a qualified clinician.";

enum class RequestTask { kDetect, kClassify, kFull };

std::string_view request_task_name(RequestTask task);

struct PredictRequest {
  std::vector<std::uint8_t> image;  // decoded PNM bytes
  RequestTask task = RequestTask::kFull;
  std::optional<double> pixel_spacing_mm;
  std::optional<std::string> patient_ref;
};

/// Why a request was rejected; maps onto the HTTP error codes.
enum class RequestErrorCode { kBadRequest, kBadEncoding, kBadImage, kBadTask };
std::string_view request_error_name(RequestErrorCode code);

class RequestError : public Error {
 public:
  RequestError(RequestErrorCode code, const std::string& what) : Error(what), code_(code) {}
  RequestErrorCode code() const noexcept { return code_; }

 private:
  RequestErrorCode code_;
};

/// Parses the JSON body. Unknown fields are ignored. "task" defaults to
/// "full". Throws RequestError.
PredictRequest parse_predict_request(std::string_view body);

struct ClassResult {
  std::string label;
  std::size_t class_id = 0;
  std::vector<std::string> classes;
  std::vector<double> probabilities;
};

struct SegmentationSummary {
  bool found = false;
  int threshold = 0;
  std::size_t area_px = 0;
  std::optional<double> area_mm2;
  std::optional<segment::BoundingBox> bbox;
  std::optional<std::array<double, 2>> centroid;
  std::size_t image_height = 0, image_width = 0;
};

SegmentationSummary summarize(const segment::SegmentationResult& result, std::size_t height, std::size_t width);

struct ModelVersions {
  std::string detection;       // "sha256:<hex>"
  std::string classification;  // may be empty when no model is loaded
};

struct DiagnosticReport {
  RequestTask task = RequestTask::kFull;
  std::optional<std::string> patient_ref;
  std::optional<ClassResult> detection;
  std::optional<ClassResult> classification;
  SegmentationSummary segmentation;
  ModelVersions model_versions;
  std::string timestamp;  // ISO-8601 UTC
  std::string disclaimer = kDisclaimer;
};

struct ReportInputs {
  RequestTask task = RequestTask::kFull;
  std::optional<ClassResult> detection;
  std::optional<ClassResult> classification;  // dropped unless detection is "Yes"
  SegmentationSummary segmentation;
  ModelVersions model_versions;
  std::string timestamp;
  std::optional<std::string> patient_ref;
};

/// Deterministic assembly. ContractError when detection is missing.
/// Classification is kept only for a "Yes" detection and a task other
/// than detect.
DiagnosticReport build_report(const ReportInputs& inputs);

/// Stable key order; doubles in shortest round-trip form.
nlohmann::ordered_json to_json(const DiagnosticReport& report);
std::string report_json(const DiagnosticReport& report);

nlohmann::ordered_json error_json(std::string_view code, std::string_view message);

}  // namespace swinscan::report
