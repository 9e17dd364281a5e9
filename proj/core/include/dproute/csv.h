//
// Copyright 2026 The dproute Authors
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
//

#ifndef DPROUTE_CSV_H_
#define DPROUTE_CSV_H_

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>

namespace dproute {

// Shortest decimal text that round-trips a double: 17 significant digits.
std::string FormatDouble(double value);

// Minimal CSV writer. Fields are written verbatim; callers only emit numbers
// and identifiers, so no quoting is performed.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            std::initializer_list<std::string_view> header);

  CsvWriter& operator<<(double value);
  CsvWriter& operator<<(long long value);
  CsvWriter& operator<<(unsigned long long value);
  CsvWriter& operator<<(int value) { return *this << static_cast<long long>(value); }
  CsvWriter& operator<<(std::size_t value) {
    return *this << static_cast<unsigned long long>(value);
  }
  CsvWriter& operator<<(std::string_view field);
  CsvWriter& operator<<(const char* field) { return *this << std::string_view(field); }
  CsvWriter& operator<<(const std::string& field) {
    return *this << std::string_view(field);
  }

  // Terminates the current row.
  void EndRow();

 private:
  void Separator();

  std::ofstream out_;
  bool row_started_ = false;
};

}  // namespace dproute

#endif  // DPROUTE_CSV_H_
