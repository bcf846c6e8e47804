// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#include "genefx/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <iomanip>

#include "genefx/rng.hpp"

namespace genefx::ckpt {

namespace fs = std::filesystem;

namespace {

constexpr std::uint32_t kMaxNameLength = 4096;
constexpr std::uint32_t kMaxRank = 8;

template <typename U>
void put_le(std::string& out, U value) {
  unsigned char bytes[sizeof(U)];
  std::memcpy(bytes, &value, sizeof(U));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(U));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(U));
}

class Reader {
 public:
  Reader(const std::string& bytes, std::string path) : bytes_(bytes), path_(std::move(path)) {}

  template <typename U>
  U get(const char* what) {
    need(sizeof(U), what);
    unsigned char raw[sizeof(U)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(U));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(U));
    pos_ += sizeof(U);
    U value;
    std::memcpy(&value, raw, sizeof(U));
    return value;
  }

  std::string take(std::size_t n, const char* what) {
    need(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw FormatError("checkpoint '" + path_ + "': " + msg);
  }

 private:
  void need(std::size_t n, const char* what) const {
    if (remaining() < n) fail(std::string("truncated while reading ") + what);
  }

  const std::string& bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

template <typename U>
NdArray<U> read_payload(Reader& r, const Shape& shape) {
  const std::size_t n = shape_numel(shape);
  if (n > r.remaining() / sizeof(U)) r.fail("truncated payload");
  std::vector<U> data(n);
  for (auto& v : data) v = r.template get<U>("payload");
  return NdArray<U>(shape, std::move(data));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Architecture fields in a fixed order, stored as f64.
enum ConfigField : std::size_t {
  kChannels,
  kAttention,
  kHasPde,
  kDm,
  kDk,
  kDe,
  kSource,
  kCandidates,
  kMode,
  kBasisMode,
  kFieldCount
};

template <typename T>
NdArray<T> as(const Entry& e) {
  return std::visit([](const auto& a) { return a.template cast<T>(); }, e.value);
}

}  // namespace

const Shape& Entry::shape() const {
  return std::visit([](const auto& a) -> const Shape& { return a.shape(); }, value);
}

void save_entries(const fs::path& path, const std::vector<Entry>& entries) {
  std::string out(kMagic, 4);
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.name.size()));
    out += e.name;
    out.push_back(static_cast<char>(e.dtype()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.shape().size()));
    for (auto d : e.shape()) put_le<std::uint64_t>(out, d);
    std::visit(
        [&](const auto& a) {
          for (auto v : a.data()) put_le(out, v);
        },
        e.value);
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write checkpoint '" + path.string() + "'");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("failed writing checkpoint '" + path.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into '" + path.string() + "': " + ec.message());
}

std::vector<Entry> load_entries(const fs::path& path) {
  const std::string bytes = read_file(path);
  Reader r(bytes, path.string());
  if (r.take(4, "magic") != std::string(kMagic, 4)) r.fail("bad magic (not a genefx checkpoint)");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kVersion) r.fail("unsupported format version " + std::to_string(version));
  const auto count = r.get<std::uint32_t>("entry count");
  std::vector<Entry> entries;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = r.get<std::uint32_t>("name length");
    if (len == 0 || len > kMaxNameLength) r.fail("invalid name length " + std::to_string(len));
    std::string name = r.take(len, "name");
    const auto tag = r.get<std::uint8_t>("dtype");
    const auto rank = r.get<std::uint32_t>("rank");
    if (rank == 0 || rank > kMaxRank) r.fail("invalid rank for '" + name + "'");
    Shape shape(rank);
    for (auto& d : shape) {
      d = r.get<std::uint64_t>("extent");
      if (d == 0 || d > r.remaining()) r.fail("invalid extent for '" + name + "'");
    }
    if (tag == static_cast<std::uint8_t>(DType::kF32)) {
      entries.push_back({std::move(name), read_payload<float>(r, shape)});
    } else if (tag == static_cast<std::uint8_t>(DType::kF64)) {
      entries.push_back({std::move(name), read_payload<double>(r, shape)});
    } else {
      r.fail("unknown dtype tag " + std::to_string(tag) + " for '" + name + "'");
    }
  }
  if (r.remaining() != 0) r.fail("trailing bytes after the last entry");
  return entries;
}

ToyModelConfig config_from_entries(const std::vector<Entry>& entries) {
  for (const auto& e : entries) {
    if (e.name != kConfigEntry) continue;
    const auto f = as<double>(e);
    if (f.size() != kFieldCount) throw FormatError("checkpoint: malformed architecture record");
    ToyModelConfig cfg;
    cfg.channels = static_cast<std::size_t>(f[kChannels]);
    cfg.attention = f[kAttention] != 0.0;
    if (f[kHasPde] != 0.0) {
      PdeConfig p;
      p.d_m = static_cast<std::size_t>(f[kDm]);
      p.d_k = static_cast<std::size_t>(f[kDk]);
      p.d_e = static_cast<std::size_t>(f[kDe]);
      p.source = static_cast<KernelSource>(static_cast<int>(f[kSource]));
      p.candidates = static_cast<std::size_t>(f[kCandidates]);
      p.mode = static_cast<InsertionMode>(static_cast<int>(f[kMode]));
      p.basis_mode = static_cast<pog::BasisMode>(static_cast<int>(f[kBasisMode]));
      cfg.pde = p;
    }
    return cfg;
  }
  throw FormatError("checkpoint: missing architecture record '" + std::string(kConfigEntry) + "'");
}

template <typename T>
void save_model(const fs::path& path, const ToyModel<T>& model) {
  const auto& cfg = model.config();
  NdArray<double> meta({kFieldCount}, 0.0);
  meta[kChannels] = static_cast<double>(cfg.channels);
  meta[kAttention] = cfg.attention ? 1.0 : 0.0;
  if (cfg.pde) {
    meta[kHasPde] = 1.0;
    meta[kDm] = static_cast<double>(cfg.pde->d_m);
    meta[kDk] = static_cast<double>(cfg.pde->d_k);
    meta[kDe] = static_cast<double>(cfg.pde->d_e);
    meta[kSource] = static_cast<double>(cfg.pde->source);
    meta[kCandidates] = static_cast<double>(cfg.pde->candidates);
    meta[kMode] = static_cast<double>(cfg.pde->mode);
    meta[kBasisMode] = static_cast<double>(cfg.pde->basis_mode);
  }
  std::vector<Entry> entries{{kConfigEntry, meta}};
  for (const auto& p : model.parameters()) entries.push_back({p.name, p.tensor.value()});
  save_entries(path, entries);
}

template <typename T>
void load_into(ToyModel<T>& model, const std::vector<Entry>& entries) {
  std::map<std::string, const Entry*> index;
  for (const auto& e : entries)
    if (e.name != kConfigEntry) index.emplace(e.name, &e);
  auto params = model.parameters();
  for (const auto& p : params) {
    auto it = index.find(p.name);
    if (it == index.end()) throw FormatError("checkpoint: missing tensor '" + p.name + "'");
    if (it->second->shape() != p.tensor.shape()) {
      throw DimensionError("checkpoint: shape mismatch for tensor '" + p.name + "': file has " +
                           shape_str(it->second->shape()) + ", model expects " +
                           shape_str(p.tensor.shape()));
    }
  }
  if (index.size() != params.size()) {
    for (const auto& [name, e] : index) {
      bool known = false;
      for (const auto& p : params) known = known || p.name == name;
      if (!known) throw FormatError("checkpoint: unexpected tensor '" + name + "'");
    }
  }
  for (auto& p : params) p.tensor.mutable_value() = as<T>(*index.at(p.name));
}

template <typename T>
ToyModel<T> load_model(const fs::path& path) {
  const auto entries = load_entries(path);
  ToyModel<T> model(config_from_entries(entries), 0);
  load_into(model, entries);
  return model;
}

std::string file_fingerprint(const fs::path& path) {
  const std::string bytes = read_file(path);
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(bytes);
  return os.str();
}

#define GENEFX_INSTANTIATE_CKPT(T)                                        \
  template void save_model(const fs::path&, const ToyModel<T>&);          \
  template void load_into(ToyModel<T>&, const std::vector<Entry>&);       \
  template ToyModel<T> load_model(const fs::path&);

GENEFX_INSTANTIATE_CKPT(float)
GENEFX_INSTANTIATE_CKPT(double)

}  // namespace genefx::ckpt
