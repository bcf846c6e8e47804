// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#include "genefx/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "genefx/rng.hpp"

namespace genefx::data {

namespace fs = std::filesystem;

void DegradeParams::validate() const {
  if (!(gamma >= 1.0) || !std::isfinite(gamma))
    throw ConfigError("degrade: gamma must be >= 1, got " + std::to_string(gamma));
  if (!(scale > 0.0 && scale <= 1.0))
    throw ConfigError("degrade: scale must be in (0, 1], got " + std::to_string(scale));
  if (!(noise_sigma >= 0.0 && noise_sigma <= 0.2))
    throw ConfigError("degrade: noise_sigma must be in [0, 0.2], got " +
                      std::to_string(noise_sigma));
}

Image degrade(const Image& high, const DegradeParams& p) {
  p.validate();
  Rng rng(p.seed);
  std::normal_distribution<double> noise(0.0, p.noise_sigma > 0 ? p.noise_sigma : 1.0);
  Image low(high.shape(), 0.0f);
  for (std::size_t i = 0; i < high.size(); ++i) {
    const double h = high[i];
    if (h < 0.0 || h > 1.0) throw ContractError("degrade: input pixel outside [0,1]");
    double v = p.scale * (p.gamma == 1.0 ? h : std::pow(h, p.gamma));
    if (p.noise_sigma > 0) v += noise(rng);
    low[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
  return low;
}

namespace {

struct Rgb {
  double r, g, b;
};

Rgb random_color(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng)};
}

void put(Image& img, std::size_t s, std::size_t y, std::size_t x, const Rgb& c) {
  img[0 * s * s + y * s + x] = static_cast<float>(c.r);
  img[1 * s * s + y * s + x] = static_cast<float>(c.g);
  img[2 * s * s + y * s + x] = static_cast<float>(c.b);
}

Rgb lerp(const Rgb& a, const Rgb& b, double t) {
  return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

void gradient(Image& img, std::size_t s, Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const double th = angle(rng);
  const Rgb a = random_color(rng, 0.05, 1.0), b = random_color(rng, 0.05, 1.0);
  const double cx = std::cos(th), cy = std::sin(th);
  for (std::size_t y = 0; y < s; ++y)
    for (std::size_t x = 0; x < s; ++x) {
      const double u = (static_cast<double>(x) / (s - 1) - 0.5) * cx +
                       (static_cast<double>(y) / (s - 1) - 0.5) * cy;
      put(img, s, y, x, lerp(a, b, std::clamp(u / 1.42 + 0.5, 0.0, 1.0)));
    }
}

void checkerboard(Image& img, std::size_t s, Rng& rng) {
  std::uniform_int_distribution<std::size_t> cell(2, std::max<std::size_t>(2, s / 4));
  const std::size_t c = cell(rng);
  const Rgb a = random_color(rng, 0.05, 1.0), b = random_color(rng, 0.05, 1.0);
  for (std::size_t y = 0; y < s; ++y)
    for (std::size_t x = 0; x < s; ++x) put(img, s, y, x, ((y / c + x / c) % 2) ? a : b);
}

// White noise smoothed by a few box-blur passes, then stretched per channel to a random range.
void filtered_noise(Image& img, std::size_t s, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> radius(1, 3);
  const int r = radius(rng);
  for (std::size_t ch = 0; ch < 3; ++ch) {
    std::vector<double> v(s * s);
    for (auto& e : v) e = u(rng);
    for (int pass = 0; pass < 2; ++pass) {
      std::vector<double> out(s * s);
      for (std::size_t y = 0; y < s; ++y)
        for (std::size_t x = 0; x < s; ++x) {
          double acc = 0;
          int n = 0;
          for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx) {
              const long yy = static_cast<long>(y) + dy, xx = static_cast<long>(x) + dx;
              if (yy < 0 || xx < 0 || yy >= static_cast<long>(s) || xx >= static_cast<long>(s))
                continue;
              acc += v[yy * s + xx];
              ++n;
            }
          out[y * s + x] = acc / n;
        }
      v.swap(out);
    }
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    const double lo = 0.05 + 0.3 * u(rng), hi = lo + (0.95 - lo) * (0.4 + 0.6 * u(rng));
    const double span = std::max(*mx - *mn, 1e-12);
    for (std::size_t i = 0; i < s * s; ++i)
      img[ch * s * s + i] = static_cast<float>(lo + (hi - lo) * (v[i] - *mn) / span);
  }
}

void blobs(Image& img, std::size_t s, Rng& rng) {
  const Rgb bg = random_color(rng, 0.05, 0.6);
  for (std::size_t y = 0; y < s; ++y)
    for (std::size_t x = 0; x < s; ++x) put(img, s, y, x, bg);
  std::uniform_real_distribution<double> pos(0.0, static_cast<double>(s));
  std::uniform_real_distribution<double> rad(s / 10.0, s / 3.0);
  std::uniform_int_distribution<int> count(2, 5);
  const int n = count(rng);
  for (int b = 0; b < n; ++b) {
    const double cx = pos(rng), cy = pos(rng), r = rad(rng);
    const Rgb c = random_color(rng, 0.2, 1.0);
    for (std::size_t y = 0; y < s; ++y)
      for (std::size_t x = 0; x < s; ++x) {
        const double d = std::hypot(x - cx, y - cy);
        if (d < r) {
          const double t = 1.0 - d / r;
          Rgb cur{img[y * s + x], img[s * s + y * s + x], img[2 * s * s + y * s + x]};
          put(img, s, y, x, lerp(cur, c, std::min(1.0, 2.0 * t)));
        }
      }
  }
}

std::uint64_t id_hash(const std::string& id) { return mix_seed(fnv1a(id)); }

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

Image procedural_image(std::size_t size, std::uint64_t seed) {
  if (size < 2) throw ConfigError("procedural_image: size must be >= 2");
  Rng rng(seed);
  Image img({3, size, size}, 0.0f);
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0:
      gradient(img, size, rng);
      break;
    case 1:
      checkerboard(img, size, rng);
      break;
    case 2:
      filtered_noise(img, size, rng);
      break;
    default:
      blobs(img, size, rng);
      break;
  }
  // Random exposure so bright and dim scenes both occur among the clean targets.
  const double exposure = std::uniform_real_distribution<double>(0.55, 1.0)(rng);
  for (std::size_t i = 0; i < img.size(); ++i)
    img[i] = static_cast<float>(std::clamp(img[i] * exposure, 0.0, 1.0));
  return img;
}

std::vector<SourceImage> procedural_sources(std::size_t count, std::size_t size,
                                            std::uint64_t seed) {
  std::vector<SourceImage> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::ostringstream id;
    id << "img" << std::setw(4) << std::setfill('0') << i;
    out.push_back({id.str(), procedural_image(size, derive_seed(seed, id.str()))});
  }
  return out;
}

DegradeParams draw_degrade(const DatasetParams& params, const std::string& id,
                           const Image& high) {
  Rng rng(derive_seed(params.seed, "degrade/" + id));
  auto draw = [&](double lo, double hi) {
    return lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  DegradeParams p;
  p.gamma = draw(params.gamma_min, params.gamma_max);
  p.scale = draw(params.scale_min, params.scale_max);
  p.noise_sigma = draw(params.sigma_min, params.sigma_max);
  p.seed = derive_seed(params.seed, "noise/" + id);
  if (params.ambiguous) {
    double acc = 0.0;
    for (std::size_t i = 0; i < high.size(); ++i) acc += std::pow(high[i], p.gamma);
    const double mean_pow = acc / static_cast<double>(high.size());
    const double target = draw(params.low_mean_min, params.low_mean_max);
    if (mean_pow > 0.0) p.scale = std::clamp(target / mean_pow, 1e-3, 1.0);
  }
  return p;
}

std::pair<std::vector<std::string>, std::vector<std::string>> split_ids(
    std::vector<std::string> ids, double train_fraction) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0))
    throw ConfigError("split: train fraction must be in [0,1]");
  std::sort(ids.begin(), ids.end(), [](const std::string& a, const std::string& b) {
    const auto ha = id_hash(a), hb = id_hash(b);
    return ha != hb ? ha < hb : a < b;
  });
  const auto n_train =
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(ids.size())));
  std::vector<std::string> train(ids.begin(), ids.begin() + static_cast<long>(n_train));
  std::vector<std::string> val(ids.begin() + static_cast<long>(n_train), ids.end());
  return {train, val};
}

Split make_dataset(const std::vector<SourceImage>& sources, const DatasetParams& params) {
  if (sources.empty()) throw ConfigError("make_dataset: no source images");
  std::vector<std::string> ids;
  for (const auto& s : sources) ids.push_back(s.id);
  {
    auto sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ConfigError("make_dataset: duplicate image id");
  }
  auto [train_ids, val_ids] = split_ids(ids, params.train_fraction);
  if (train_ids.empty() || val_ids.empty()) {
    throw ConfigError("make_dataset: split of " + std::to_string(ids.size()) +
                      " images leaves train=" + std::to_string(train_ids.size()) +
                      " val=" + std::to_string(val_ids.size()));
  }
  auto find = [&](const std::string& id) -> const SourceImage& {
    return *std::find_if(sources.begin(), sources.end(),
                         [&](const SourceImage& s) { return s.id == id; });
  };
  auto build = [&](const std::vector<std::string>& list) {
    std::vector<ImagePair> out;
    for (const auto& id : list) {
      const auto& src = find(id);
      out.push_back({degrade(src.image, draw_degrade(params, id, src.image)), src.image, id});
    }
    return out;
  };
  return {build(train_ids), build(val_ids)};
}

Image to_rgb(const Image& image) {
  if (image.rank() != 3) throw DimensionError("to_rgb: expects [C×H×W]");
  if (image.dim(0) == 3) return image;
  if (image.dim(0) != 1) throw DimensionError("to_rgb: expects 1 or 3 channels");
  const std::size_t hw = image.dim(1) * image.dim(2);
  Image out({3, image.dim(1), image.dim(2)}, 0.0f);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < hw; ++i) out[c * hw + i] = image[i];
  return out;
}

std::string Manifest::setting(const std::string& key, const std::string& fallback) const {
  for (const auto& [k, v] : settings)
    if (k == key) return v;
  return fallback;
}

void write_manifest(const fs::path& path, const Manifest& manifest) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest '" + path.string() + "'");
  out << "# genefx dataset manifest\n";
  for (const auto& [k, v] : manifest.settings) out << k << '=' << v << '\n';
  out << "# pair <id> <split> <low> <high> <gamma> <scale> <sigma> <seed>\n";
  for (const auto& e : manifest.entries) {
    out << "pair " << e.id << ' ' << e.split << ' ' << e.low_path << ' ' << e.high_path << ' '
        << format_double(e.params.gamma) << ' ' << format_double(e.params.scale) << ' '
        << format_double(e.params.noise_sigma) << ' ' << e.params.seed << '\n';
  }
  if (!out) throw IoError("failed writing manifest '" + path.string() + "'");
}

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest '" + path.string() + "'");
  Manifest m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("pair ", 0) == 0) {
      std::istringstream is(line.substr(5));
      ManifestEntry e;
      if (!(is >> e.id >> e.split >> e.low_path >> e.high_path >> e.params.gamma >>
            e.params.scale >> e.params.noise_sigma >> e.params.seed)) {
        throw FormatError(path.string() + ":" + std::to_string(lineno) + ": malformed pair record");
      }
      m.entries.push_back(std::move(e));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    m.settings.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return m;
}

Split load_dataset(const fs::path& dir) {
  const Manifest m = read_manifest(dir / "manifest.txt");
  Split split;
  for (const auto& e : m.entries) {
    ImagePair p{to_rgb(load_png(dir / e.low_path)), to_rgb(load_png(dir / e.high_path)), e.id};
    if (p.low.shape() != p.high.shape())
      throw DimensionError("dataset: pair '" + e.id + "' has mismatched shapes");
    (e.split == "val" ? split.val : split.train).push_back(std::move(p));
  }
  return split;
}

}  // namespace genefx::data
