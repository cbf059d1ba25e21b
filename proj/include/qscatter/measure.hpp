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

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>

#include "qscatter/bases.hpp"
#include "qscatter/numerics.hpp"
#include "qscatter/states.hpp"

namespace qscatter {

/// Exposure value that switches sampling off and keeps exact probabilities.
inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

/// Coincidence table for one (Alice setting, Bob setting) pair. Sampled
/// tables hold Poisson counts; noiseless tables hold the probabilities.
struct CountTable {
    RealMatrix values;  // values(a, b)
    std::string basis_a = "standard";
    std::string basis_b = "standard";
    double exposure = kNoiseless;
    std::uint64_t seed = 0;
    bool zeta_corrected = false;

    Eigen::Index dim_a() const { return values.rows(); }
    Eigen::Index dim_b() const { return values.cols(); }
    bool noiseless() const { return exposure == kNoiseless; }
    double total() const { return values.sum(); }
};

/// One phase setting of a four-step scan.
struct PhaseStepRecord {
    int step = 0;  // theta = step * pi / 2
    CountTable table;

    double theta() const;
};

using PhaseStepScan = std::array<PhaseStepRecord, 4>;

namespace measure {

/// |<ket_a, ket_b|state>|^2.
double coincidence_prob(const BipartiteState& state, const ComplexVector& ket_a,
                        const ComplexVector& ket_b);

/// P(a, b) = |<a_row, b_row|state>|^2 for kets given as matrix rows.
RealMatrix probability_table(const BipartiteState& state, const ComplexMatrix& kets_a,
                             const ComplexMatrix& kets_b);

/// Alice in `basis`, Bob in its conjugate.
RealMatrix probability_table(const BipartiteState& state, const BasisFamily& basis);

/// Each cell ~ Poisson(exposure * prob + dark_rate), independently. An
/// exposure of kNoiseless returns the probabilities unchanged.
CountTable sample_counts(const RealMatrix& probs, double exposure, std::uint64_t seed,
                         double dark_rate = 0.0,
                         const ToleranceConfig& cfg = default_tolerances());

/// Four-step scan for S. `state` lives on d + 1 modes with the reference as
/// mode 0; `basis` acts on the d logical modes. Alice measures
/// e^{i theta}|0> + |f_m>, Bob measures |f_n^*>.
PhaseStepScan phase_step_scan_s(const BipartiteState& state, const BasisFamily& basis,
                                double exposure, std::uint64_t seed, double dark_rate = 0.0);

/// Four-step scan for E: Alice measures the reference |0>, Bob measures
/// e^{i theta}|0> + |f_m^*>. Tables are 1 x d.
PhaseStepScan phase_step_scan_e(const BipartiteState& state, const BasisFamily& basis,
                                double exposure, std::uint64_t seed, double dark_rate = 0.0);

}  // namespace measure

namespace io {

// CountTable CSV: first line "basisA,basisB,exposure,seed" (values), then one
// "a,b,count" line per cell in row-major order.
void write_count_table(std::ostream& out, const CountTable& table);
void write_count_table(const std::filesystem::path& path, const CountTable& table);
CountTable read_count_table(std::istream& in);
CountTable read_count_table(const std::filesystem::path& path);

}  // namespace io
}  // namespace qscatter
