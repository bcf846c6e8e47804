// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "genefx/ndarray.hpp"

namespace genefx::data {

using Image = NdArray<float>;  // [C×H×W], values in [0,1]

struct ImagePair {
  Image low;
  Image high;
  std::string id;
};

struct DegradeParams {
  double gamma = 1.0;        // >= 1
  double scale = 1.0;        // in (0, 1]
  double noise_sigma = 0.0;  // in [0, 0.2]
  std::uint64_t seed = 0;

  void validate() const;
};

/// low = clamp(scale·high^gamma + N(0, sigma²), 0, 1); deterministic per seed.
Image degrade(const Image& high, const DegradeParams& p);

/// Procedural clean image (gradient, checkerboard, filtered noise or blobs), keyed by seed.
Image procedural_image(std::size_t size, std::uint64_t seed);

struct DatasetParams {
  std::uint64_t seed = 0;
  double gamma_min = 1.0, gamma_max = 2.0;
  double scale_min = 0.15, scale_max = 0.5;
  double sigma_min = 0.0, sigma_max = 0.02;
  /// When set, each low image is scaled to a mean brightness drawn from
  /// [low_mean_min, low_mean_max] independent of its high image, so visually similar lows
  /// map to highs of different exposure.
  bool ambiguous = true;
  double low_mean_min = 0.08, low_mean_max = 0.16;
  double train_fraction = 0.8;
};

struct SourceImage {
  std::string id;
  Image image;
};

struct Split {
  std::vector<ImagePair> train;
  std::vector<ImagePair> val;
};

/// Degradation drawn for one image under the dataset parameters.
DegradeParams draw_degrade(const DatasetParams& params, const std::string& id, const Image& high);

/// Degrades every source and partitions by the hash order of ids: the first
/// round(train_fraction·n) ids go to train. Throws ConfigError if either side ends up empty.
Split make_dataset(const std::vector<SourceImage>& sources, const DatasetParams& params);

/// `count` procedural sources of size×size with ids img0000, img0001, ...
std::vector<SourceImage> procedural_sources(std::size_t count, std::size_t size,
                                            std::uint64_t seed);

/// Partition of ids in the same order make_dataset uses.
std::pair<std::vector<std::string>, std::vector<std::string>> split_ids(
    std::vector<std::string> ids, double train_fraction);

// ---- PNG ----

/// 8-bit grayscale or RGB PNG -> [C×H×W] with C in {1, 3}, values k/255.
/// Throws IoError (with the path) on unreadable, malformed or 16-bit input.
Image load_png(const std::filesystem::path& path);
/// Writes [C×H×W] (C in {1,3}) or [1×C×H×W] as 8-bit PNG, rounding clamp(v,0,1)·255.
void save_png(const std::filesystem::path& path, const Image& image);
/// Replicates a single channel to three; identity for 3-channel input.
Image to_rgb(const Image& image);

// ---- manifest ----

struct ManifestEntry {
  std::string id;
  std::string low_path;   // relative to the manifest directory
  std::string high_path;
  DegradeParams params;
  std::string split;  // "train" or "val"
};

struct Manifest {
  std::vector<std::pair<std::string, std::string>> settings;  // key=value lines, in order
  std::vector<ManifestEntry> entries;

  std::string setting(const std::string& key, const std::string& fallback = "") const;
};

/// Line format: `key=value` settings, `#` comments, and records
/// `pair <id> <split> <low> <high> <gamma> <scale> <sigma> <seed>`.
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& path);

/// Loads the pairs listed in a dataset directory's manifest.txt.
Split load_dataset(const std::filesystem::path& dir);

}  // namespace genefx::data
