// Copyright 2026 The qscatter Authors
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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "qscatter/numerics.hpp"

namespace qscatter::io {

// Complex-matrix CSV: first line "rows,cols", then one "i,j,re,im" line per
// entry in row-major order, doubles printed with 17 significant digits.

void write_matrix_csv(std::ostream& out, const ComplexMatrix& m);
void write_matrix_csv(const std::filesystem::path& path, const ComplexMatrix& m);

ComplexMatrix read_matrix_csv(std::istream& in);
ComplexMatrix read_matrix_csv(const std::filesystem::path& path);

/// Shortest round-trip-safe rendering used by every writer.
std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace qscatter::io
