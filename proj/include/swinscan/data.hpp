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
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swinscan/tensor.hpp"

namespace swinscan::data {

enum class Task { kDetection, kClassification };

std::string_view task_name(Task task);
/// "detection" | "classification"; anything else is an InputError.
Task parse_task(std::string_view name);
std::size_t num_classes(Task task);
/// Detection: {"No", "Yes"}. Classification: {"Meningioma Tumor",
/// "Glioma Tumor", "Pituitary Tumor"}. Index == class id.
const std::vector<std::string>& class_names(Task task);
/// Throws InputError for names outside the task's vocabulary.
std::size_t class_id(Task task, std::string_view name);

/// Planar channel-major image, values nominally in [0, 1].
struct Image {
  std::size_t channels = 3;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> pixels;

  static Image blank(std::size_t channels, std::size_t height, std::size_t width, double fill = 0.0);
  double& at(std::size_t c, std::size_t y, std::size_t x) { return pixels[(c * height + y) * width + x]; }
  double at(std::size_t c, std::size_t y, std::size_t x) const { return pixels[(c * height + y) * width + x]; }
  bool operator==(const Image&) const = default;
};

// ---- PNM ----

/// Decodes P2/P3/P5/P6 with maxval <= 255. Grayscale is replicated to three
/// channels. Errors are ParseError with the offending byte offset.
Image load_pnm(std::span<const std::uint8_t> bytes);
Image load_pnm_file(const std::filesystem::path& path);

enum class PnmKind { kP2 = 2, kP3 = 3, kP5 = 5, kP6 = 6 };
/// Quantizes to 8 bits (round half up after clamping to [0,1]).
/// Gray kinds (P2/P5) write channel 0.
std::vector<std::uint8_t> write_pnm(const Image& image, PnmKind kind = PnmKind::kP6);
std::uint8_t quantize(double v);

// ---- preprocessing ----

/// Separable bilinear resampling, align-corners false: output pixel i maps
/// to source coordinate (i + 0.5) * in / out - 0.5, clamped to [0, in - 1].
Image resize_bilinear(const Image& image, std::size_t height, std::size_t width);

struct PreprocessConfig {
  std::string resample = "bilinear";
  std::array<double, 3> image_mean{0.5, 0.5, 0.5};
  std::array<double, 3> image_std{0.5, 0.5, 0.5};
  std::size_t target_size = 64;

  void validate() const;  // ConfigError
};

Image normalize(const Image& image, const PreprocessConfig& config);
Image denormalize(const Image& image, const PreprocessConfig& config);

/// Resize to target_size (no-op when already there); values stay in [0,1].
Image prepare(const Image& image, const PreprocessConfig& config);

// ---- augmentation ----

Image hflip(const Image& image);
/// Counter-clockwise by quarter_turns * 90 degrees.
Image rotate90(const Image& image, int quarter_turns);
/// Mirror padding that does not repeat the edge pixel (needs pad < extent).
Image pad_reflect(const Image& image, std::size_t pad);
Image center_crop(const Image& image, std::size_t height, std::size_t width);

struct Sample {
  Image image;
  std::size_t label = 0;
  std::string source_path;
  Task task = Task::kDetection;
};

struct AugmentConfig {
  double flip_probability = 0.5;
  std::size_t pad = 4;
  std::size_t crop = 64;
};

/// Horizontal flip with probability 0.5, a uniformly chosen multiple of
/// 90 degrees, then reflect-pad and center crop. Label is untouched.
Sample augment(const Sample& sample, std::mt19937_64& rng, const AugmentConfig& config = {});

// ---- manifests ----

struct ManifestEntry {
  std::string path;  // resolved against the manifest directory
  Task task = Task::kDetection;
  std::string class_name;
  std::size_t label = 0;
};

struct DatasetManifest {
  Task task = Task::kDetection;
  std::vector<ManifestEntry> entries;
  std::map<std::string, std::size_t> counts;  // by class name

  void validate() const;  // InputError when counts drift from entries
};

/// CSV with header `path,task,class`, RFC-4180 quoting, LF or CRLF line
/// ends. All rows must share one task. Relative paths resolve against
/// `base_dir`.
DatasetManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {});
DatasetManifest load_manifest(const std::filesystem::path& path);

std::vector<Sample> load_samples(const DatasetManifest& manifest, const PreprocessConfig& config);

// ---- splitting and batching ----

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified: each class is shuffled with a seeded stream and its first
/// floor(0.9 * n_c) members go to train. Outputs are sorted by index.
SplitIndices split_indices(std::span<const std::size_t> labels, std::uint64_t seed);

template <class T>
struct Split {
  std::vector<T> train;
  std::vector<T> test;
};

Split<ManifestEntry> split_train_test(const DatasetManifest& manifest, std::uint64_t seed);
Split<Sample> split_train_test(const std::vector<Sample>& samples, std::uint64_t seed);

struct Batch {
  Tensor images;  // b x 3 x S x S, normalized
  std::vector<std::size_t> labels;
  std::vector<std::size_t> indices;  // positions in the input sample list
};

/// Number of batches for n samples.
std::size_t batch_count(std::size_t n, std::size_t batch_size);

struct BatchOptions {
  std::size_t batch_size = 32;
  bool shuffle = true;
  bool augment = false;
  PreprocessConfig preprocess;
};

/// Shuffles (when enabled) with `rng`, optionally augments each sample
/// using a seed derived from one rng draw and the sample index, then
/// normalizes and stacks. Every batch is full except possibly the last.
std::vector<Batch> make_batches(const std::vector<Sample>& samples, std::mt19937_64& rng,
                                const BatchOptions& options = {});

/// Stacks already-normalized images into a b x C x H x W tensor.
Tensor stack_images(std::span<const Image> images);

}  // namespace swinscan::data
