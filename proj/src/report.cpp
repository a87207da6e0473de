// Copyright (c) 2026 the hnmpgd authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hnmpgd/report.hpp"

#include <charconv>

namespace hnmpgd {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void KvWriter::add(const std::string& name, const std::string& value) {
  entries_.emplace_back(name, value);
}

void KvWriter::add(const std::string& name, const std::vector<double>& values) {
  std::string joined;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) joined += ',';
    joined += format_double(values[i]);
  }
  add(name, joined);
}

std::string KvWriter::str() const {
  std::string out;
  for (const auto& [name, value] : entries_) {
    out += name;
    out += '=';
    out += value;
    out += '\n';
  }
  return out;
}

void append_report(KvWriter& kv, const ConstraintReport& report, const std::string& prefix) {
  kv.add(prefix + "pixel_count", report.pixel_count);
  kv.add(prefix + "pixel_budget", report.pixel_budget);
  kv.add(prefix + "region_count", report.region_count);
  kv.add(prefix + "region_budget", report.region_budget);
  kv.add(prefix + "min_pixels", report.min_pixels);
  kv.add(prefix + "passed", report.passed);
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

}  // namespace hnmpgd
