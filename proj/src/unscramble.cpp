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

#include "qscatter/unscramble.hpp"

#include <cmath>

#include "qscatter/error.hpp"

namespace qscatter {

ComplexMatrix UnscrambleOperators::alice() const {
    if (!use_eta) return w_raw;
    return eta.cwiseInverse().asDiagonal() * w_raw;
}

namespace unscramble {

RealVector slm_eta(const ComplexMatrix& w) {
    RealVector eta(w.rows());
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        eta(i) = w.row(i).cwiseAbs().maxCoeff();
        if (!(eta(i) > 0.0)) {
            throw Error(ErrorCode::kSingular, "slm normalization: row " + std::to_string(i) +
                                                  " of the unscrambler is zero");
        }
    }
    return eta;
}

UnscrambleOperators build_w(const EffectiveT& t_tagged, bool use_eta,
                            const ToleranceConfig& cfg) {
    const ComplexMatrix& t = t_tagged.matrix;
    const Eigen::Index d = t.rows();
    if (t.cols() != d) throw Error(ErrorCode::kDimensionMismatch, "build_w: T must be square");
    const RealVector s = numerics::singular_values(t);
    if (!(s(d - 1) > cfg.pinv_rcond * s(0))) {
        throw Error(ErrorCode::kSingular, "build_w: transmission matrix is singular");
    }
    const ComplexMatrix m =
        t_tagged.tag ? t_tagged.tag->transform : ComplexMatrix::Identity(d, d);
    UnscrambleOperators ops;
    ops.w_raw = numerics::pinv(t, cfg).transpose() * m;
    ops.bob = m.conjugate();
    ops.eta = slm_eta(ops.w_raw);
    ops.use_eta = use_eta;
    ops.condition_number = s(0) / s(d - 1);
    return ops;
}

VOperator build_v(const UnscrambleOperators& w, const BasisFamily& basis) {
    if (basis.dim != w.w_raw.rows()) {
        throw Error(ErrorCode::kDimensionMismatch, "build_v: basis dimension mismatch");
    }
    const ComplexMatrix mr = basis.transform();
    VOperator v;
    v.basis = basis;
    v.alice = mr * w.alice();
    v.bob = mr.conjugate() * w.bob;
    v.zeta = slm_eta(v.alice);
    return v;
}

RealMatrix operator_probabilities(const BipartiteState& state, const ComplexMatrix& alice,
                                  const ComplexMatrix& bob) {
    if (alice.cols() != state.dim() || bob.cols() != state.dim()) {
        throw Error(ErrorCode::kDimensionMismatch, "operator_probabilities: dimension mismatch");
    }
    return (alice * state.coeffs() * bob.transpose()).cwiseAbs2();
}

RealMatrix physical_probabilities(const BipartiteState& state, const UnscrambleOperators& w) {
    return operator_probabilities(state, w.alice(), w.bob);
}

RealMatrix physical_probabilities(const BipartiteState& state, const VOperator& v) {
    return operator_probabilities(state, v.zeta.cwiseInverse().asDiagonal() * v.alice, v.bob);
}

CountTable correct_zeta(const CountTable& table, const RealVector& zeta) {
    if (table.zeta_corrected) return table;
    if (zeta.size() != table.dim_a()) {
        throw Error(ErrorCode::kDimensionMismatch, "correct_zeta: zeta length mismatch");
    }
    CountTable out = table;
    out.values = zeta.cwiseAbs2().asDiagonal() * table.values;
    out.zeta_corrected = true;
    return out;
}

CountTable normalized(const CountTable& table) {
    const double total = table.total();
    if (!(total > 0.0)) throw Error(ErrorCode::kInvalidArgument, "table has zero total");
    CountTable out = table;
    out.values /= total;
    return out;
}

CountTable predict_table(const BipartiteState& state, const UnscrambleOperators& w,
                         const std::optional<VOperator>& which) {
    CountTable t;
    t.exposure = kNoiseless;
    if (!which) {
        t.values = physical_probabilities(state, w);
        t.basis_a = "unscrambled:standard";
        t.basis_b = "standard*";
        t.zeta_corrected = true;
    } else {
        t.values = physical_probabilities(state, *which);
        t.basis_a = "unscrambled:" + which->basis.label();
        t.basis_b = which->basis.label() + "*";
        t = correct_zeta(t, which->zeta);
    }
    return normalized(t);
}

}  // namespace unscramble
}  // namespace qscatter
