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

// Writes representative JSON documents produced by the library and CLI so
// the schema checker can validate them.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "swinscan/cli.hpp"
#include "swinscan/report/base64.hpp"
#include "swinscan/report/service.hpp"
#include "swinscan/train.hpp"
#include "swinscan/weights_io.hpp"

using namespace swinscan;
namespace fs = std::filesystem;

namespace {

void put(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string request(const data::Image& img, const std::string& task, bool extras) {
  nlohmann::ordered_json j;
  j["image"] = report::base64_encode(data::write_pnm(img));
  j["task"] = task;
  if (extras) {
    j["pixel_spacing_mm"] = 0.4;
    j["patient_ref"] = "anon-17";
    j["client_note"] = "ignored";
  }
  return j.dump();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: write_schema_samples OUT_DIR\n";
    return 1;
  }
  const fs::path dir = argv[1];
  fs::remove_all(dir);
  fs::create_directories(dir);

  const auto det = swin::ModelWeights::initialize(swin::SwinConfig::detection(), 11);
  const auto cls = swin::ModelWeights::initialize(swin::SwinConfig::classification(), 12);
  swin::save_weights(det, dir / "det.swnw");
  swin::save_weights(cls, dir / "cls.swnw");
  const auto svc = report::Service::from_files(dir / "det.swnw", dir / "cls.swnw",
                                               [] { return cli::parse_timestamp("2026-03-04T05:06:07Z"); });

  const auto disk = train::disk_image(64, 30, 33, 12);
  const auto blank = data::Image::blank(3, 40, 52, 0.1);
  int n = 0;
  for (const auto& [img, task, extras] : std::vector<std::tuple<data::Image, std::string, bool>>{
           {disk, "full", true}, {disk, "detect", false}, {disk, "classify", true}, {blank, "full", false}}) {
    const auto body = request(img, task, extras);
    put(dir / ("request_" + std::to_string(n) + ".json"), body);
    const auto r = svc.predict(body);
    if (r.status != 200) {
      std::cerr << "unexpected status " << r.status << ": " << r.body;
      return 1;
    }
    put(dir / ("report_" + std::to_string(n) + ".json"), r.body);
    ++n;
  }
  // Force a report with a classification block regardless of the random
  // detection head.
  report::ReportInputs in;
  in.detection = report::ClassResult{"Yes", 1, {"No", "Yes"}, {0.1, 0.9}};
  in.classification = report::ClassResult{"Pituitary Tumor", 2, {"Meningioma Tumor", "Glioma Tumor", "Pituitary Tumor"}, {0.2, 0.3, 0.5}};
  in.segmentation.image_height = in.segmentation.image_width = 64;
  in.model_versions = svc.versions();
  in.timestamp = "2026-03-04T05:06:07Z";
  put(dir / "report_classified.json", report::report_json(report::build_report(in)));

  const std::vector<std::string> bad{R"({"image":"***"})", R"({"image":"UDM="})", R"({"image":"","task":"x"})",
                                     R"([])", std::string(report::kMaxRequestBytes + 1, ' ')};
  for (std::size_t i = 0; i < bad.size(); ++i) put(dir / ("error_" + std::to_string(i) + ".json"), svc.predict(bad[i]).body);
  put(dir / "health.json", svc.health().body);

  std::ostringstream out, err;
  if (cli::run({"make-synthetic", "--task", "detect", "--count", "6", "--out", (dir / "data").string()}, out, err) != 0 ||
      cli::run({"make-synthetic", "--task", "classify", "--count", "6", "--out", (dir / "cdata").string()}, out, err) != 0) {
    std::cerr << err.str();
    return 1;
  }
  for (const auto& [w, m, name] : std::vector<std::tuple<std::string, std::string, std::string>>{
           {"det.swnw", "data", "eval_detection.json"}, {"cls.swnw", "cdata", "eval_classification.json"}}) {
    std::ostringstream o;
    if (cli::run({"eval", "--weights", (dir / w).string(), "--manifest", (dir / m / "manifest.csv").string()}, o, err) != 0) {
      std::cerr << err.str();
      return 1;
    }
    put(dir / name, o.str());
  }
  std::cout << "wrote samples to " << dir << "\n";
  return 0;
}
