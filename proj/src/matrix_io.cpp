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

#include "qscatter/matrix_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "qscatter/error.hpp"

namespace qscatter::io {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_matrix_csv(std::ostream& out, const ComplexMatrix& m) {
    out << m.rows() << ',' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out << i << ',' << j << ',' << format_double(m(i, j).real()) << ','
                << format_double(m(i, j).imag()) << '\n';
        }
    }
}

void write_matrix_csv(const std::filesystem::path& path, const ComplexMatrix& m) {
    std::ostringstream ss;
    write_matrix_csv(ss, m);
    write_text(path, ss.str());
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

double parse_double(const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::kIo, "matrix csv: bad number '" + s + "'");
    }
}

long parse_index(const std::string& s) {
    try {
        return std::stol(s);
    } catch (const std::exception&) {
        throw Error(ErrorCode::kIo, "matrix csv: bad index '" + s + "'");
    }
}

}  // namespace

ComplexMatrix read_matrix_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::kIo, "matrix csv: missing header");
    }
    const auto header = split_csv(line);
    if (header.size() != 2) {
        throw Error(ErrorCode::kIo, "matrix csv: header must be 'rows,cols'");
    }
    const long rows = parse_index(header[0]);
    const long cols = parse_index(header[1]);
    if (rows < 0 || cols < 0) {
        throw Error(ErrorCode::kIo, "matrix csv: negative shape");
    }
    ComplexMatrix m = ComplexMatrix::Zero(rows, cols);
    std::vector<bool> seen(static_cast<std::size_t>(rows * cols), false);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv(line);
        if (f.size() != 4) {
            throw Error(ErrorCode::kIo, "matrix csv: expected 'i,j,re,im'");
        }
        const long i = parse_index(f[0]);
        const long j = parse_index(f[1]);
        if (i < 0 || i >= rows || j < 0 || j >= cols) {
            throw Error(ErrorCode::kIo, "matrix csv: index out of range");
        }
        m(i, j) = Complex(parse_double(f[2]), parse_double(f[3]));
        seen[static_cast<std::size_t>(i * cols + j)] = true;
    }
    for (bool s : seen) {
        if (!s) throw Error(ErrorCode::kIo, "matrix csv: missing entries");
    }
    return m;
}

ComplexMatrix read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
    return read_matrix_csv(in);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace qscatter::io
