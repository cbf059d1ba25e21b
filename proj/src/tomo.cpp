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

#include "qscatter/tomo.hpp"

#include <array>
#include <cmath>

#include <json.hpp>

#include "qscatter/error.hpp"
#include "qscatter/matrix_io.hpp"

namespace qscatter {
namespace tomo {
namespace {

// Orders the records by step, rejecting gaps, repeats and shape mismatches.
std::array<const RealMatrix*, 4> by_step(std::span<const PhaseStepRecord> records) {
    std::array<const RealMatrix*, 4> out{};
    for (const auto& rec : records) {
        if (rec.step < 0 || rec.step > 3) {
            throw Error(ErrorCode::kMissingPhaseStep, "phase step outside the 4-step grid");
        }
        if (out[rec.step] != nullptr) {
            throw Error(ErrorCode::kMissingPhaseStep, "phase step recorded twice");
        }
        out[rec.step] = &rec.table.values;
    }
    for (const auto* m : out) {
        if (m == nullptr) throw Error(ErrorCode::kMissingPhaseStep, "missing phase step");
    }
    for (const auto* m : out) {
        if (m->rows() != out[0]->rows() || m->cols() != out[0]->cols()) {
            throw Error(ErrorCode::kDimensionMismatch, "phase-step tables differ in shape");
        }
    }
    return out;
}

ComplexMatrix four_step(std::span<const PhaseStepRecord> records) {
    const auto r = by_step(records);
    ComplexMatrix out(r[0]->rows(), r[0]->cols());
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.cols(); ++j) {
            out(i, j) = 0.25 * Complex((*r[0])(i, j) - (*r[2])(i, j),
                                       (*r[1])(i, j) - (*r[3])(i, j));
        }
    }
    return out;
}

void check_conditioning(const ComplexVector& e, const ToleranceConfig& cfg) {
    const double emax = e.cwiseAbs().maxCoeff();
    const double floor = cfg.pinv_rcond * emax;
    for (Eigen::Index m = 0; m < e.size(); ++m) {
        if (!(std::abs(e(m)) > floor) || emax == 0.0) {
            throw Error(ErrorCode::kIllConditioned,
                        "reference barely couples to output mode " + std::to_string(m));
        }
    }
}

}  // namespace

SMatrix extract_s(std::span<const PhaseStepRecord> records) {
    return SMatrix{four_step(records)};
}

EMatrix extract_e(std::span<const PhaseStepRecord> records, const ToleranceConfig& cfg) {
    const ComplexMatrix raw = four_step(records);
    if (raw.rows() != 1) {
        throw Error(ErrorCode::kDimensionMismatch, "extract_e: reference scan must be 1 x d");
    }
    EMatrix e{raw.row(0).transpose()};
    check_conditioning(e.diagonal, cfg);
    return e;
}

ComplexMatrix gauge_fix(const ComplexMatrix& t) {
    const double norm = t.norm();
    if (!(norm > 0.0)) throw Error(ErrorCode::kSingular, "gauge_fix: zero matrix");
    ComplexMatrix out = t / norm;
    const double cut = 1e-12 * out.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.cols(); ++j) {
            const double mag = std::abs(out(i, j));
            if (mag > cut) {
                out *= std::conj(out(i, j)) / mag;
                return out;
            }
        }
    }
    return out;
}

EffectiveT assemble_t(const SMatrix& s, const EMatrix& e, const ToleranceConfig& cfg) {
    const Eigen::Index d = s.entries.rows();
    if (s.entries.cols() != d || e.diagonal.size() != d) {
        throw Error(ErrorCode::kDimensionMismatch, "assemble_t: S and E sizes differ");
    }
    check_conditioning(e.diagonal, cfg);
    // S E^{-1}: divide column n by E_n = conj(E~_n).
    ComplexMatrix se = s.entries;
    for (Eigen::Index n = 0; n < d; ++n) se.col(n) /= std::conj(e.diagonal(n));
    ComplexMatrix t = se.adjoint();
    if (!numerics::all_finite(t)) {
        throw Error(ErrorCode::kIllConditioned, "assemble_t: non-finite reconstruction");
    }
    return EffectiveT{gauge_fix(t), false, std::nullopt};
}

EffectiveT scan_basis_tag(const EffectiveT& t, const BasisFamily& basis) {
    if (basis.dim != t.dim()) {
        throw Error(ErrorCode::kDimensionMismatch, "scan_basis_tag: dimension mismatch");
    }
    if (t.tag && t.tag->label != basis.label()) {
        throw Error(ErrorCode::kTagConflict, "matrix already tagged as " + t.tag->label +
                                                 ", cannot re-tag as " + basis.label());
    }
    EffectiveT out = t;
    out.tag = BasisTag{basis.label(), basis.transform()};
    return out;
}

EffectiveT untag(const EffectiveT& t) {
    EffectiveT out = t;
    if (t.tag) {
        const ComplexMatrix& m = t.tag->transform;
        out.matrix = m.transpose() * t.matrix * m.conjugate();
        out.tag.reset();
    }
    return out;
}

TomographyReport report(const EffectiveT& t, const EMatrix& e) {
    TomographyReport r;
    r.condition_number = numerics::condition_number(t.matrix);
    const auto mags = e.diagonal.cwiseAbs();
    r.e_min_over_max = mags.minCoeff() / mags.maxCoeff();
    return r;
}

EffectiveT reconstruct(std::span<const PhaseStepRecord> s_records,
                       std::span<const PhaseStepRecord> e_records, const BasisFamily& basis,
                       const ToleranceConfig& cfg) {
    const SMatrix s = extract_s(s_records);
    const EMatrix e = extract_e(e_records, cfg);
    return scan_basis_tag(assemble_t(s, e, cfg), basis);
}

}  // namespace tomo

namespace io {

void write_scan_bundle(const std::filesystem::path& dir, const ScanBundle& bundle) {
    std::filesystem::create_directories(dir);
    nlohmann::json manifest;
    manifest["schema"] = "scan_bundle_v1";
    manifest["basis"] = bundle.basis_label;
    manifest["d"] = bundle.s_scan[0].table.dim_a();
    for (int k = 0; k < 4; ++k) {
        const std::string s_name = "s_step" + std::to_string(k) + ".csv";
        const std::string e_name = "e_step" + std::to_string(k) + ".csv";
        write_count_table(dir / s_name, bundle.s_scan[k].table);
        write_count_table(dir / e_name, bundle.e_scan[k].table);
        manifest["s_files"].push_back({{"step", bundle.s_scan[k].step}, {"file", s_name}});
        manifest["e_files"].push_back({{"step", bundle.e_scan[k].step}, {"file", e_name}});
    }
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

ScanBundle read_scan_bundle(const std::filesystem::path& dir) {
    ScanBundle b;
    try {
        const auto manifest = nlohmann::json::parse(read_text(dir / "manifest.json"));
        b.basis_label = manifest.at("basis").get<std::string>();
        const auto& s_files = manifest.at("s_files");
        const auto& e_files = manifest.at("e_files");
        if (s_files.size() != 4 || e_files.size() != 4) {
            throw Error(ErrorCode::kMissingPhaseStep, "scan bundle needs four steps per scan");
        }
        for (std::size_t k = 0; k < 4; ++k) {
            b.s_scan[k].step = s_files[k].at("step").get<int>();
            b.s_scan[k].table = read_count_table(dir / s_files[k].at("file").get<std::string>());
            b.e_scan[k].step = e_files[k].at("step").get<int>();
            b.e_scan[k].table = read_count_table(dir / e_files[k].at("file").get<std::string>());
        }
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::kIo, std::string("scan bundle manifest: ") + ex.what());
    }
    return b;
}

}  // namespace io
}  // namespace qscatter
