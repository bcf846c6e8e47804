// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "genefx/model.hpp"

// Binary layout, all integers little-endian:
//   "GFX1"  u32 version  u32 entry_count
//   per entry: u32 name_len, name bytes, u8 dtype (0 = f32, 1 = f64), u32 rank,
//              rank × u64 extents, payload (little-endian IEEE values, row-major)
namespace genefx::ckpt {

inline constexpr char kMagic[4] = {'G', 'F', 'X', '1'};
inline constexpr std::uint32_t kVersion = 1;
/// Entry holding the model architecture; it is not a parameter.
inline constexpr const char* kConfigEntry = "meta.config";

enum class DType : std::uint8_t { kF32 = 0, kF64 = 1 };

struct Entry {
  std::string name;
  std::variant<NdArray<float>, NdArray<double>> value;

  DType dtype() const { return value.index() == 0 ? DType::kF32 : DType::kF64; }
  const Shape& shape() const;
};

/// Writes atomically (temporary file, then rename). Throws IoError.
void save_entries(const std::filesystem::path& path, const std::vector<Entry>& entries);
/// Parses the whole file before returning. Throws IoError when unreadable and FormatError on
/// a bad magic, unknown version, unknown dtype or truncation.
std::vector<Entry> load_entries(const std::filesystem::path& path);

/// Architecture recorded by save_model. Throws FormatError when absent or malformed.
ToyModelConfig config_from_entries(const std::vector<Entry>& entries);

template <typename T>
void save_model(const std::filesystem::path& path, const ToyModel<T>& model);

/// Overwrites every parameter of `model` from the entries. Throws FormatError for a missing
/// or extra tensor and DimensionError naming the tensor on a shape mismatch; the model is
/// untouched when any check fails.
template <typename T>
void load_into(ToyModel<T>& model, const std::vector<Entry>& entries);

/// Rebuilds the recorded architecture and loads its parameters. The result is in training mode.
template <typename T>
ToyModel<T> load_model(const std::filesystem::path& path);

/// 64-bit FNV-1a over the file bytes, printed as 16 hex digits.
std::string file_fingerprint(const std::filesystem::path& path);

}  // namespace genefx::ckpt
