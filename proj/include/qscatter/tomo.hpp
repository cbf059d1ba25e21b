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
#include <span>
#include <string>

#include "qscatter/bases.hpp"
#include "qscatter/channel.hpp"
#include "qscatter/measure.hpp"

namespace qscatter {

/// S_mn = t_n0 conj(t_nm), i.e. S = T^dagger E.
struct SMatrix {
    ComplexMatrix entries;
};

/// Diagonal of E~, E~_m = t_00 conj(t_m0).
struct EMatrix {
    ComplexVector diagonal;
};

struct TomographyReport {
    double condition_number = 0.0;  // of the reconstructed T
    double e_min_over_max = 0.0;    // min |E~_m| / max |E~_m|
};

namespace tomo {

/// S_mn = (R^0 - R^pi + i (R^{pi/2} - R^{3pi/2})) / 4. Throws
/// kMissingPhaseStep unless each of the four steps appears exactly once.
SMatrix extract_s(std::span<const PhaseStepRecord> records);

/// Same four-step formula on the 1 x d reference scan. Throws
/// kIllConditioned when some |E~_m| < pinv_rcond * max |E~|.
EMatrix extract_e(std::span<const PhaseStepRecord> records,
                  const ToleranceConfig& cfg = default_tolerances());

/// T = (S E^{-1})^dagger with E = conj(E~); the dropped t_00 factor is a
/// global scalar. The result is gauge-fixed (see gauge_fix).
EffectiveT assemble_t(const SMatrix& s, const EMatrix& e,
                      const ToleranceConfig& cfg = default_tolerances());

/// Unit Frobenius norm, first entry (row-major) above 1e-12 of the largest
/// made real-positive.
ComplexMatrix gauge_fix(const ComplexMatrix& t);

/// Marks `t` as expressed in `basis` (T_M = M^* T M^T). Re-tagging with the
/// same basis is a no-op; a different basis raises kTagConflict.
EffectiveT scan_basis_tag(const EffectiveT& t, const BasisFamily& basis);

/// Rotates a tagged matrix back to the standard basis and clears the tag.
EffectiveT untag(const EffectiveT& t);

TomographyReport report(const EffectiveT& t, const EMatrix& e);

/// extract_s + extract_e + assemble_t + scan_basis_tag.
EffectiveT reconstruct(std::span<const PhaseStepRecord> s_records,
                       std::span<const PhaseStepRecord> e_records, const BasisFamily& basis,
                       const ToleranceConfig& cfg = default_tolerances());

}  // namespace tomo

namespace io {

struct ScanBundle {
    std::string basis_label;
    PhaseStepScan s_scan;
    PhaseStepScan e_scan;
};

/// Directory holding manifest.json plus s_step{0..3}.csv and e_step{0..3}.csv.
void write_scan_bundle(const std::filesystem::path& dir, const ScanBundle& bundle);
ScanBundle read_scan_bundle(const std::filesystem::path& dir);

}  // namespace io
}  // namespace qscatter
