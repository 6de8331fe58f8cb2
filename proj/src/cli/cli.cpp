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

#include "swinscan/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <ctime>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <optional>

#include "swinscan/data.hpp"
#include "swinscan/metrics.hpp"
#include "swinscan/report/pdf.hpp"
#include "swinscan/report/plots.hpp"
#include "swinscan/report/service.hpp"
#include "swinscan/train.hpp"
#include "swinscan/weights_io.hpp"

namespace swinscan::cli {

std::chrono::system_clock::time_point parse_timestamp(std::string_view text) {
  std::tm tm{};
  char z = 0;
  const std::string s(text);
  if (s.size() != 20 ||
      std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour, &tm.tm_min,
                  &tm.tm_sec, &z) != 7 ||
      z != 'Z')
    throw InputError(fmt::format("timestamp '{}' is not YYYY-MM-DDTHH:MM:SSZ", text));
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  const auto t = std::chrono::system_clock::from_time_t(timegm(&tm));
  if (report::format_timestamp(t) != s) throw InputError(fmt::format("timestamp '{}' is out of range", text));
  return t;
}

namespace {

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("failed writing " + path.string());
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::string read_text(const std::filesystem::path& path) {
  const auto b = swin::read_file_bytes(path);
  return {b.begin(), b.end()};
}

data::Task task_from_flag(const std::string& t) {
  return t == "detect" ? data::Task::kDetection : data::Task::kClassification;
}

report::Clock clock_for(const std::string& fixed) {
  if (fixed.empty()) return std::chrono::system_clock::now;
  const auto t = parse_timestamp(fixed);
  return [t] { return t; };
}

std::string escape_csv(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

struct TrainOpts {
  std::string task, manifest, out, history;
  std::uint64_t seed = 0, init_seed = 0;
  std::size_t epochs = train::TrainConfig{}.epochs;
  double lr = train::TrainConfig{}.learning_rate;
  bool augment = false, all = false;
};

int cmd_train(const TrainOpts& o, std::ostream& out) {
  const auto manifest = data::load_manifest(o.manifest);
  if (manifest.task != task_from_flag(o.task))
    throw InputError(fmt::format("manifest holds {} rows but --task is {}", data::task_name(manifest.task), o.task));
  const data::PreprocessConfig pre;
  const auto samples = data::load_samples(manifest, pre);
  data::Split<data::Sample> split;
  if (o.all) {
    split.train = samples;
  } else {
    split = data::split_train_test(samples, o.seed);
  }
  if (split.train.empty()) throw InputError("training split is empty");

  train::TrainConfig cfg;
  cfg.epochs = o.epochs;
  cfg.learning_rate = o.lr;
  cfg.seed = o.seed;
  cfg.augment = o.augment;
  cfg.validate();
  const auto config = manifest.task == data::Task::kDetection ? swin::SwinConfig::detection() : swin::SwinConfig::classification();
  const auto init = swin::ModelWeights::initialize(config, o.init_seed);
  const auto result = train::train(init, split.train, cfg, split.test.empty() ? nullptr : &split.test);
  swin::save_weights(result.weights, o.out);
  if (!o.history.empty()) train::log_epoch_metrics(result.history, o.history);

  const auto& last = result.history.back();
  nlohmann::ordered_json j;
  j["task"] = std::string(data::task_name(manifest.task));
  j["train_size"] = split.train.size();
  j["test_size"] = split.test.size();
  j["epochs"] = result.history.size();
  j["final_mean_loss"] = last.mean_loss;
  j["final_train_accuracy"] = last.train_accuracy;
  j["weights"] = o.out;
  out << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& weights_path, const std::string& manifest_path, const std::string& split_name,
             std::uint64_t seed, std::ostream& out) {
  const auto manifest = data::load_manifest(manifest_path);
  const auto weights = swin::load_weights(weights_path);
  if (weights.config().num_classes != data::num_classes(manifest.task))
    throw ConfigError(fmt::format("weights have {} classes but the manifest task {} needs {}",
                                  weights.config().num_classes, data::task_name(manifest.task),
                                  data::num_classes(manifest.task)));
  const data::PreprocessConfig pre;
  auto samples = data::load_samples(manifest, pre);
  if (split_name == "test") samples = data::split_train_test(samples, seed).test;
  if (split_name == "train") samples = data::split_train_test(samples, seed).train;
  const auto r = train::evaluate(weights, samples, pre);
  nlohmann::ordered_json j;
  j["task"] = std::string(data::task_name(manifest.task));
  j["split"] = split_name;
  j["samples"] = samples.size();
  j["report"] = metrics::to_json(r.report);
  j["confusion"] = metrics::to_json(r.confusion);
  out << j.dump(2) << "\n";
  return kExitOk;
}

struct PredictOpts {
  std::string det, cls, image, pdf, json_out, task = "full", patient_ref, fixed_time;
  std::optional<double> spacing;
};

int cmd_predict(const PredictOpts& o, std::ostream& out) {
  const auto svc = report::Service::from_files(o.det, o.cls, clock_for(o.fixed_time));
  report::PredictRequest req;
  req.image = swin::read_file_bytes(o.image);
  req.task = o.task == "detect" ? report::RequestTask::kDetect
             : o.task == "classify" ? report::RequestTask::kClassify
                                    : report::RequestTask::kFull;
  req.pixel_spacing_mm = o.spacing;
  if (!o.patient_ref.empty()) req.patient_ref = o.patient_ref;
  report::Prediction p;
  try {
    p = svc.run(req);
  } catch (const report::RequestError& e) {
    throw InputError(e.what());
  }
  const auto json = report::report_json(p.report);
  if (!o.json_out.empty()) write_file(o.json_out, json);
  if (!o.pdf.empty()) write_file(o.pdf, report::write_pdf(p.report, p.highlighted));
  out << json;
  return kExitOk;
}

int cmd_serve(const std::string& det, const std::string& cls, std::optional<int> port_flag, const std::string& host,
              const std::string& fixed_time, std::ostream& out) {
  const int port = report::resolve_port(port_flag, std::getenv("SWINSCAN_PORT"));
  const auto svc = report::Service::from_files(det, cls, clock_for(fixed_time));
  report::HttpServer server(svc);
  const int bound = server.bind(host, port);
  out << "listening on http://" << host << ":" << bound << std::endl;
  server.listen();
  return kExitOk;
}

int cmd_plot(const std::string& history, bool comparison, const std::string& out_path, std::ostream& out) {
  std::string svg;
  if (comparison) {
    svg = report::comparison_chart_svg(metrics::render_comparison(metrics::reference_detection_report()));
  } else {
    svg = report::epoch_chart_svg(train::parse_epoch_metrics(read_text(history)));
  }
  write_file(out_path, svg);
  out << "wrote " << out_path << "\n";
  return kExitOk;
}

int cmd_make_synthetic(const std::string& task, std::size_t count, std::uint64_t seed, const std::string& dir,
                       std::ostream& out) {
  const auto t = task_from_flag(task);
  const auto samples = t == data::Task::kDetection ? train::synthetic_detection(count, seed)
                                                   : train::synthetic_classification(count, seed);
  std::filesystem::create_directories(dir);
  std::string manifest = "path,task,class\n";
  const auto& names = data::class_names(t);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto file = fmt::format("{}_{:04}.ppm", task, i);
    write_file(std::filesystem::path(dir) / file, data::write_pnm(samples[i].image));
    manifest += fmt::format("{},{},{}\n", escape_csv(file), data::task_name(t), escape_csv(names[samples[i].label]));
  }
  const auto mpath = std::filesystem::path(dir) / "manifest.csv";
  write_file(mpath, manifest);
  out << "wrote " << samples.size() << " images and " << mpath.string() << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"SwinScan: brain tumour detection, classification and reporting", "swinscan"};
  app.require_subcommand(1);
  const std::vector<std::string> tasks{"detect", "classify"};

  TrainOpts topt;
  auto* tr = app.add_subcommand("train", "Train a model from a manifest");
  tr->add_option("--task", topt.task, "detect or classify")->required()->check(CLI::IsMember(tasks));
  tr->add_option("--manifest", topt.manifest, "Dataset manifest CSV")->required();
  tr->add_option("--out", topt.out, "Output weights file")->required();
  tr->add_option("--seed", topt.seed, "Split, shuffle and augmentation seed");
  tr->add_option("--init-seed", topt.init_seed, "Parameter initialization seed");
  tr->add_option("--epochs", topt.epochs, "Epochs")->check(CLI::PositiveNumber);
  tr->add_option("--lr", topt.lr, "Learning rate")->check(CLI::PositiveNumber);
  tr->add_option("--history", topt.history, "Write per-epoch metrics CSV");
  tr->add_flag("--augment", topt.augment, "Random flip / rotation / pad-crop");
  tr->add_flag("--all", topt.all, "Train on every row (no held-out split)");

  std::string ew, em, esplit = "all";
  std::uint64_t eseed = 0;
  auto* ev = app.add_subcommand("eval", "Evaluate weights on a manifest; prints JSON");
  ev->add_option("--weights", ew, "Weights file")->required();
  ev->add_option("--manifest", em, "Dataset manifest CSV")->required();
  ev->add_option("--split", esplit, "all, train or test")->check(CLI::IsMember({"all", "train", "test"}));
  ev->add_option("--seed", eseed, "Split seed");

  PredictOpts popt;
  auto* pr = app.add_subcommand("predict", "Run detection, classification and segmentation on one image");
  pr->add_option("--weights-detect", popt.det, "Detection weights")->required();
  pr->add_option("--weights-classify", popt.cls, "Classification weights")->required();
  pr->add_option("--image", popt.image, "PNM image (P2/P3/P5/P6)")->required();
  pr->add_option("--pdf", popt.pdf, "Write the PDF report here");
  pr->add_option("--json", popt.json_out, "Also write the JSON report here");
  pr->add_option("--task", popt.task, "detect, classify or full")->check(CLI::IsMember({"detect", "classify", "full"}));
  pr->add_option("--pixel-spacing", popt.spacing, "Pixel spacing in mm")->check(CLI::PositiveNumber);
  pr->add_option("--patient-ref", popt.patient_ref, "Opaque reference echoed in the report");
  pr->add_option("--fixed-time", popt.fixed_time)->group("");

  std::string sdet, scls, shost = "127.0.0.1", sfixed;
  std::optional<int> sport;
  auto* sv = app.add_subcommand("serve", "Serve the HTTP API");
  sv->add_option("--weights-detect", sdet, "Detection weights")->required();
  sv->add_option("--weights-classify", scls, "Classification weights")->required();
  sv->add_option("--port", sport, "Port (default $SWINSCAN_PORT, then 8080; 0 picks a free port)");
  sv->add_option("--host", shost, "Bind address");
  sv->add_option("--fixed-time", sfixed)->group("");

  std::string phist, pout;
  bool pcmp = false;
  auto* pl = app.add_subcommand("plot", "Render an SVG chart");
  auto* hopt = pl->add_option("--history", phist, "Epoch metrics CSV (line chart)");
  auto* copt = pl->add_flag("--comparison", pcmp, "Algorithm comparison bar chart");
  hopt->excludes(copt);
  pl->add_option("--out", pout, "Output SVG")->required();

  std::string mtask, mdir;
  std::size_t mcount = 64;
  std::uint64_t mseed = 1;
  auto* ms = app.add_subcommand("make-synthetic", "Write a synthetic PPM dataset with a manifest");
  ms->add_option("--task", mtask, "detect or classify")->required()->check(CLI::IsMember(tasks));
  ms->add_option("--count", mcount, "Number of images")->check(CLI::PositiveNumber);
  ms->add_option("--seed", mseed, "Generator seed");
  ms->add_option("--out", mdir, "Output directory")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
    if (pl->parsed() && phist.empty() && !pcmp) throw CLI::RequiredError("--history or --comparison");
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    if (tr->parsed()) return cmd_train(topt, out);
    if (ev->parsed()) return cmd_eval(ew, em, esplit, eseed, out);
    if (pr->parsed()) return cmd_predict(popt, out);
    if (sv->parsed()) return cmd_serve(sdet, scls, sport, shost, sfixed, out);
    if (pl->parsed()) return cmd_plot(phist, pcmp, pout, out);
    if (ms->parsed()) return cmd_make_synthetic(mtask, mcount, mseed, mdir, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace swinscan::cli
