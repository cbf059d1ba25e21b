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

#include "qscatter/measure.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string_view>
#include <vector>

#include "qscatter/error.hpp"
#include "qscatter/matrix_io.hpp"

namespace qscatter {

double PhaseStepRecord::theta() const { return 0.5 * std::numbers::pi * step; }

namespace measure {

double coincidence_prob(const BipartiteState& state, const ComplexVector& ket_a,
                        const ComplexVector& ket_b) {
    return std::norm(states::project(state, ket_a, ket_b));
}

RealMatrix probability_table(const BipartiteState& state, const ComplexMatrix& kets_a,
                             const ComplexMatrix& kets_b) {
    if (kets_a.cols() != state.dim() || kets_b.cols() != state.dim()) {
        throw Error(ErrorCode::kDimensionMismatch, "probability_table: ket length differs from d");
    }
    // amplitude(a, b) = sum_ij conj(A_ai) conj(B_bj) C_ij
    const ComplexMatrix amp = kets_a.conjugate() * state.coeffs() * kets_b.adjoint();
    return amp.cwiseAbs2();
}

RealMatrix probability_table(const BipartiteState& state, const BasisFamily& basis) {
    return probability_table(state, basis.vectors, basis.vectors.conjugate());
}

CountTable sample_counts(const RealMatrix& probs, double exposure, std::uint64_t seed,
                         double dark_rate, const ToleranceConfig& cfg) {
    if (!(exposure >= 0.0)) {
        throw Error(ErrorCode::kInvalidArgument, "sample_counts: exposure must be >= 0");
    }
    if (!(dark_rate >= 0.0) || !std::isfinite(dark_rate)) {
        throw Error(ErrorCode::kInvalidArgument, "sample_counts: dark rate must be >= 0");
    }
    if (probs.size() > 0 && probs.minCoeff() < -cfg.prob_tol) {
        throw Error(ErrorCode::kInvalidArgument, "sample_counts: negative probability");
    }
    CountTable t;
    t.exposure = exposure;
    t.seed = seed;
    const RealMatrix clipped = probs.cwiseMax(0.0);
    if (exposure == kNoiseless) {
        t.values = clipped;
        return t;
    }
    t.values = RealMatrix::Zero(probs.rows(), probs.cols());
    std::mt19937_64 gen(seed);
    for (Eigen::Index a = 0; a < probs.rows(); ++a) {
        for (Eigen::Index b = 0; b < probs.cols(); ++b) {
            const double mean = exposure * clipped(a, b) + dark_rate;
            if (mean <= 0.0) continue;
            std::poisson_distribution<long long> poisson(mean);
            t.values(a, b) = static_cast<double>(poisson(gen));
        }
    }
    return t;
}

namespace {

// Pads logical-mode kets (rows) with a leading reference slot.
ComplexMatrix embed_after_reference(const ComplexMatrix& kets) {
    ComplexMatrix out = ComplexMatrix::Zero(kets.rows(), kets.cols() + 1);
    out.rightCols(kets.cols()) = kets;
    return out;
}

void check_scan_inputs(const BipartiteState& state, const BasisFamily& basis) {
    if (state.dim() != basis.dim + 1) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "phase-step scan: state must span the reference plus d modes");
    }
    if (state.coeffs().row(0).norm() <= 0.0) {
        throw Error(ErrorCode::kDegenerateReference,
                    "phase-step scan: reference mode carries no amplitude");
    }
}

// Samples the four theta tables with one common scale so that the mean
// table total equals the exposure.
PhaseStepScan sample_scan(const std::array<RealMatrix, 4>& probs, double exposure,
                          std::uint64_t seed, std::string_view stream, double dark_rate) {
    double mean_total = 0.0;
    for (const auto& p : probs) mean_total += 0.25 * p.cwiseMax(0.0).sum();
    const double scale =
        (exposure == kNoiseless || !(mean_total > 0.0)) ? 1.0 : 1.0 / mean_total;
    PhaseStepScan scan;
    for (int step = 0; step < 4; ++step) {
        const double e = (exposure == kNoiseless) ? kNoiseless : exposure * scale;
        CountTable table =
            sample_counts(probs[step], e, derive_seed(seed, stream, step), dark_rate);
        table.exposure = exposure;
        scan[step] = PhaseStepRecord{step, std::move(table)};
    }
    return scan;
}

}  // namespace

PhaseStepScan phase_step_scan_s(const BipartiteState& state, const BasisFamily& basis,
                                double exposure, std::uint64_t seed, double dark_rate) {
    check_scan_inputs(state, basis);
    const ComplexMatrix signal = embed_after_reference(basis.vectors);
    const ComplexMatrix bob = embed_after_reference(basis.vectors.conjugate());
    std::array<RealMatrix, 4> probs;
    for (int step = 0; step < 4; ++step) {
        ComplexMatrix alice = signal;
        alice.col(0).setConstant(std::polar(1.0, 0.5 * std::numbers::pi * step));
        probs[step] = measure::probability_table(state, alice, bob);
    }
    PhaseStepScan scan = sample_scan(probs, exposure, seed, "scan-s", dark_rate);
    for (auto& rec : scan) {
        rec.table.basis_a = "ref+" + basis.label();
        rec.table.basis_b = basis.label() + "*";
    }
    return scan;
}

PhaseStepScan phase_step_scan_e(const BipartiteState& state, const BasisFamily& basis,
                                double exposure, std::uint64_t seed, double dark_rate) {
    check_scan_inputs(state, basis);
    ComplexMatrix alice = ComplexMatrix::Zero(1, basis.dim + 1);
    alice(0, 0) = 1.0;
    const ComplexMatrix signal = embed_after_reference(basis.vectors.conjugate());
    std::array<RealMatrix, 4> probs;
    for (int step = 0; step < 4; ++step) {
        ComplexMatrix bob = signal;
        bob.col(0).setConstant(std::polar(1.0, 0.5 * std::numbers::pi * step));
        probs[step] = measure::probability_table(state, alice, bob);
    }
    PhaseStepScan scan = sample_scan(probs, exposure, seed, "scan-e", dark_rate);
    for (auto& rec : scan) {
        rec.table.basis_a = "ref";
        rec.table.basis_b = "ref+" + basis.label() + "*";
    }
    return scan;
}

}  // namespace measure

namespace io {

void write_count_table(std::ostream& out, const CountTable& t) {
    out << t.basis_a << ',' << t.basis_b << ',' << format_double(t.exposure) << ',' << t.seed
        << '\n';
    for (Eigen::Index a = 0; a < t.values.rows(); ++a) {
        for (Eigen::Index b = 0; b < t.values.cols(); ++b) {
            out << a << ',' << b << ',' << format_double(t.values(a, b)) << '\n';
        }
    }
}

void write_count_table(const std::filesystem::path& path, const CountTable& t) {
    std::ostringstream ss;
    write_count_table(ss, t);
    write_text(path, ss.str());
}

CountTable read_count_table(std::istream& in) {
    auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        return out;
    };
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::kIo, "count table: missing header");
    const auto h = split(line);
    if (h.size() != 4) {
        throw Error(ErrorCode::kIo, "count table: header must be 'basisA,basisB,exposure,seed'");
    }
    CountTable t;
    struct Cell {
        long a, b;
        double v;
    };
    std::vector<Cell> cells;
    long rows = 0;
    long cols = 0;
    try {
        t.basis_a = h[0];
        t.basis_b = h[1];
        t.exposure = (h[2] == "inf") ? kNoiseless : std::stod(h[2]);
        t.seed = std::stoull(h[3]);
        while (std::getline(in, line)) {
            if (line.empty() || line == "\r") continue;
            const auto f = split(line);
            if (f.size() != 3) throw Error(ErrorCode::kIo, "count table: expected 'a,b,count'");
            Cell c{std::stol(f[0]), std::stol(f[1]), std::stod(f[2])};
            if (c.a < 0 || c.b < 0 || c.v < 0.0) {
                throw Error(ErrorCode::kIo, "count table: negative index or count");
            }
            rows = std::max(rows, c.a + 1);
            cols = std::max(cols, c.b + 1);
            cells.push_back(c);
        }
    } catch (const std::invalid_argument&) {
        throw Error(ErrorCode::kIo, "count table: malformed number");
    } catch (const std::out_of_range&) {
        throw Error(ErrorCode::kIo, "count table: number out of range");
    }
    if (static_cast<long>(cells.size()) != rows * cols) {
        throw Error(ErrorCode::kIo, "count table: missing or repeated cells");
    }
    t.values = RealMatrix::Zero(rows, cols);
    for (const auto& c : cells) t.values(c.a, c.b) = c.v;
    return t;
}

CountTable read_count_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
    return read_count_table(in);
}

}  // namespace io
}  // namespace qscatter
