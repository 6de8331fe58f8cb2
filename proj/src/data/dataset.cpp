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

#include <algorithm>
#include <map>

#include "swinscan/data.hpp"
#include "swinscan/error.hpp"
#include "swinscan/random.hpp"

namespace swinscan::data {

SplitIndices split_indices(std::span<const std::size_t> labels, std::uint64_t seed) {
  if (labels.empty()) throw InputError("cannot split an empty dataset");
  std::map<std::size_t, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  SplitIndices out;
  for (auto& [label, members] : by_class) {
    std::mt19937_64 g(rng::derive_seed(seed, label));
    rng::shuffle(std::span<std::size_t>(members), g);
    const std::size_t n_train = members.size() * 9 / 10;
    out.train.insert(out.train.end(), members.begin(), members.begin() + n_train);
    out.test.insert(out.test.end(), members.begin() + n_train, members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

namespace {

template <class T, class LabelOf>
Split<T> split_by(const std::vector<T>& items, std::uint64_t seed, LabelOf label_of) {
  std::vector<std::size_t> labels;
  labels.reserve(items.size());
  for (const auto& it : items) labels.push_back(label_of(it));
  auto idx = split_indices(labels, seed);
  Split<T> out;
  for (auto i : idx.train) out.train.push_back(items[i]);
  for (auto i : idx.test) out.test.push_back(items[i]);
  return out;
}

}  // namespace

Split<ManifestEntry> split_train_test(const DatasetManifest& manifest, std::uint64_t seed) {
  return split_by(manifest.entries, seed, [](const ManifestEntry& e) { return e.label; });
}

Split<Sample> split_train_test(const std::vector<Sample>& samples, std::uint64_t seed) {
  return split_by(samples, seed, [](const Sample& s) { return s.label; });
}

std::size_t batch_count(std::size_t n, std::size_t batch_size) {
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
  return (n + batch_size - 1) / batch_size;
}

Tensor stack_images(std::span<const Image> images) {
  if (images.empty()) throw InputError("cannot stack zero images");
  const auto& f = images.front();
  std::vector<double> v;
  v.reserve(images.size() * f.pixels.size());
  for (const auto& im : images) {
    if (im.channels != f.channels || im.height != f.height || im.width != f.width)
      throw DimensionError("stacked images differ in extent");
    v.insert(v.end(), im.pixels.begin(), im.pixels.end());
  }
  return Tensor::from({images.size(), f.channels, f.height, f.width}, std::move(v));
}

std::vector<Batch> make_batches(const std::vector<Sample>& samples, std::mt19937_64& g, const BatchOptions& options) {
  const std::size_t n_batches = batch_count(samples.size(), options.batch_size);
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (options.shuffle) rng::shuffle(std::span<std::size_t>(order), g);
  const std::uint64_t aug_seed = options.augment ? g() : 0;

  std::vector<Batch> out;
  out.reserve(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b) {
    const std::size_t lo = b * options.batch_size, hi = std::min(samples.size(), lo + options.batch_size);
    Batch batch;
    std::vector<Image> imgs;
    imgs.reserve(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) {
      const std::size_t i = order[k];
      const Sample* s = &samples[i];
      Sample augmented;
      if (options.augment) {
        std::mt19937_64 sg(rng::derive_seed(aug_seed, i));
        augmented = augment(*s, sg, AugmentConfig{0.5, 4, options.preprocess.target_size});
        s = &augmented;
      }
      imgs.push_back(normalize(s->image, options.preprocess));
      batch.labels.push_back(s->label);
      batch.indices.push_back(i);
    }
    batch.images = stack_images(imgs);
    out.push_back(std::move(batch));
  }
  return out;
}

}  // namespace swinscan::data
