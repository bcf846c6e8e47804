// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#include "genefx/gene_effect.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace genefx::gene {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

NdArray<float> training_initializer(const std::string& name, const NdArray<float>& current,
                                    std::size_t fan_in, std::uint64_t seed) {
  if (ends_with(name, ".bias") || ends_with(name, ".b1") || ends_with(name, ".b2")) {
    return NdArray<float>(current.shape(), 0.0f);
  }
  return kaiming_uniform<float>(current.shape(), fan_in, seed);
}

void ResetPlan::validate(const std::vector<LayerInfo>& layers) const {
  std::set<std::string> seen;
  for (const auto& id : layer_ids) {
    if (!seen.insert(id).second) throw ConfigError("reset plan: duplicate layer '" + id + "'");
    detail::find_layer(layers, id);
  }
}

std::size_t DgeReport::capped_terms() const {
  std::size_t n = 0;
  for (const auto& l : layers)
    for (bool c : l.capped) n += c ? 1 : 0;
  return n;
}

double aggregate(const DgeReport& report) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& l : report.layers)
    for (double v : l.logmse) {
      sum += v;
      ++n;
    }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

void write_report(std::ostream& out, const DgeReport& report) {
  out << "# genefx reset report\n";
  out << "# term <layer> <image> <mse> <logmse_db> <capped>\n";
  out << "i_max=" << num(report.i_max) << '\n';
  for (const auto& l : report.layers)
    for (std::size_t j = 0; j < l.logmse.size(); ++j)
      out << "term " << l.layer << ' ' << j << ' ' << num(l.mse[j]) << ' ' << num(l.logmse[j])
          << ' ' << (l.capped[j] ? 1 : 0) << '\n';
  if (report.has_delta_psnr)
    for (const auto& l : report.layers)
      out << "delta_psnr " << l.layer << ' ' << num(l.delta_psnr) << '\n';
  out << "summary layers=" << report.layers.size() << " images=" << report.image_count
      << " terms=" << report.layers.size() * report.image_count
      << " capped=" << report.capped_terms() << " dge=" << num(report.dge) << '\n';
}

DgeReport read_report(std::istream& in) {
  DgeReport r;
  std::string line;
  bool summary = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    std::string kind;
    is >> kind;
    if (kind.rfind("i_max=", 0) == 0) {
      r.i_max = std::stod(kind.substr(6));
    } else if (kind == "term") {
      std::string layer;
      std::size_t image = 0;
      double mse = 0, logmse = 0;
      int capped = 0;
      if (!(is >> layer >> image >> mse >> logmse >> capped))
        throw FormatError("report: malformed term line '" + line + "'");
      if (r.layers.empty() || r.layers.back().layer != layer) r.layers.push_back({layer, {}, {}, {}, 0.0});
      auto& l = r.layers.back();
      if (image != l.logmse.size()) throw FormatError("report: terms out of order at '" + line + "'");
      l.mse.push_back(mse);
      l.logmse.push_back(logmse);
      l.capped.push_back(capped != 0);
    } else if (kind == "delta_psnr") {
      std::string layer;
      double v = 0;
      if (!(is >> layer >> v)) throw FormatError("report: malformed delta_psnr line");
      for (auto& l : r.layers)
        if (l.layer == layer) l.delta_psnr = v;
      r.has_delta_psnr = true;
    } else if (kind == "summary") {
      for (std::string field; is >> field;) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = field.substr(0, eq), value = field.substr(eq + 1);
        if (key == "images") r.image_count = std::stoul(value);
        if (key == "dge") r.dge = std::stod(value);
      }
      summary = true;
    } else {
      throw FormatError("report: unknown record '" + kind + "'");
    }
  }
  if (!summary) throw FormatError("report: missing summary line");
  return r;
}

void write_table(std::ostream& out, const ComparisonTable& table) {
  out << "| NOL |";
  for (std::size_t i = 0; i < table.layers.size(); ++i) out << ' ' << table.layers[i] << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < table.layers.size(); ++i) out << "---|";
  auto row = [&](const char* name, const std::vector<double>& values) {
    out << "\n| " << name << " |";
    char buf[32];
    for (double v : values) {
      std::snprintf(buf, sizeof buf, " %.4f |", v);
      out << buf;
    }
  };
  row("Static", table.static_row);
  row("Dynamic", table.dynamic_row);
  out << '\n';
}

}  // namespace genefx::gene
