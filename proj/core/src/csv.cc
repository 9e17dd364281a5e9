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

#include "dproute/csv.h"

#include <cstdio>

#include "dproute/error.h"

namespace dproute {

std::string FormatDouble(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     std::initializer_list<std::string_view> header)
    : out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw InputError("cannot open " + path.string() + " for writing");
  for (std::string_view column : header) *this << column;
  EndRow();
}

void CsvWriter::Separator() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

CsvWriter& CsvWriter::operator<<(double value) {
  Separator();
  out_ << FormatDouble(value);
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long value) {
  Separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::operator<<(unsigned long long value) {
  Separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view field) {
  Separator();
  out_ << field;
  return *this;
}

void CsvWriter::EndRow() {
  out_ << '\n';
  row_started_ = false;
}

}  // namespace dproute
