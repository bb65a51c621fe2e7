// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <sstream>

#include "entrolim/simulator.hpp"
#include "json.hpp"

namespace entrolim {
namespace {

std::vector<std::string> trace_columns(std::size_t m) {
  std::vector<std::string> cols{"k"};
  for (const char* name : {"d", "z", "e"}) {
    if (m == 1) {
      cols.emplace_back(name);
    } else {
      for (std::size_t i = 0; i < m; ++i) cols.push_back(std::string(name) + "_" + std::to_string(i));
    }
  }
  return cols;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

void write_trace_csv(const SimulationTrace& trace, const std::string& path) {
  auto out = open_for_write(path);
  const auto cols = trace_columns(trace.dim());
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (std::size_t k = 0; k < trace.length(); ++k) {
    out << k;
    for (const Signal* s : {&trace.d, &trace.z, &trace.e})
      for (double x : s->at(k)) out << ',' << format_double(x);
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

void write_trace_sidecar(const SimulationTrace& trace, const std::string& path) {
  auto out = open_for_write(path);
  nlohmann::ordered_json j;
  j["seed"] = trace.seed;
  j["model"] = trace.model_descriptor;
  j["controller"] = trace.controller_descriptor;
  j["length"] = trace.length();
  j["dim"] = trace.dim();
  j["columns"] = trace_columns(trace.dim());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

SimulationTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty trace file '" + path + "'");
  const auto ncols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (ncols < 4 || (ncols - 1) % 3 != 0) throw IoError("malformed trace header in '" + path + "'");
  const std::size_t m = (ncols - 1) / 3;
  std::vector<double> d;
  std::vector<double> z;
  std::vector<double> e;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    for (auto* dst : {&d, &z, &e}) {
      for (std::size_t i = 0; i < m; ++i) {
        if (!std::getline(row, cell, ',')) throw IoError("short row in '" + path + "'");
        dst->push_back(std::stod(cell));
      }
    }
  }
  SimulationTrace t;
  t.d = Signal(m, std::move(d));
  t.z = Signal(m, std::move(z));
  t.e = Signal(m, std::move(e));
  return t;
}

}  // namespace entrolim
