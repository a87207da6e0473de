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

#ifndef HNMPGD_REPORT_HPP_
#define HNMPGD_REPORT_HPP_

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hnmpgd/maskgen.hpp"

namespace hnmpgd {

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Flat name=value lines, emitted in insertion order.
class KvWriter {
 public:
  void add(const std::string& name, const std::string& value);
  void add(const std::string& name, const char* value) { add(name, std::string(value)); }
  void add(const std::string& name, double value) { add(name, format_double(value)); }
  void add(const std::string& name, bool value) { add(name, std::string(value ? "true" : "false")); }

  template <class T>
    requires std::is_integral_v<T>
  void add(const std::string& name, T value) {
    add(name, std::to_string(value));
  }

  void add(const std::string& name, const std::vector<double>& values);

  std::string str() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

void append_report(KvWriter& kv, const ConstraintReport& report, const std::string& prefix = "");

/// Parses name=value lines; blank lines and lines starting with '#' are
/// skipped. Later duplicates win.
std::map<std::string, std::string> parse_kv(const std::string& text);

}  // namespace hnmpgd

#endif  // HNMPGD_REPORT_HPP_
