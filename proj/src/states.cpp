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

#include "qscatter/states.hpp"

#include <cmath>

#include "qscatter/error.hpp"

namespace qscatter {

BipartiteState::BipartiteState(ComplexMatrix coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.rows() != coeffs_.cols() || coeffs_.rows() < 2) {
        throw Error(ErrorCode::kInvalidDimension,
                    "BipartiteState: coefficient matrix must be d x d with d >= 2");
    }
    if (!numerics::all_finite(coeffs_)) {
        throw Error(ErrorCode::kInvalidArgument, "BipartiteState: non-finite coefficients");
    }
    norm_sq_ = coeffs_.squaredNorm();
    if (!(norm_sq_ > 0.0)) {
        throw Error(ErrorCode::kInvalidArgument, "BipartiteState: zero state");
    }
}

bool BipartiteState::is_physical(const ToleranceConfig& cfg) const {
    return norm_sq_ <= 1.0 + cfg.prob_tol;
}

BipartiteState BipartiteState::normalized() const {
    return BipartiteState(coeffs_ / std::sqrt(norm_sq_));
}

namespace states {

BipartiteState max_entangled(Eigen::Index d) {
    if (d < 2) {
        throw Error(ErrorCode::kInvalidDimension, "max_entangled: d must be >= 2");
    }
    const double a = 1.0 / std::sqrt(static_cast<double>(d));
    return BipartiteState(ComplexMatrix::Identity(d, d) * a);
}

BipartiteState apply_one_sided(const BipartiteState& state,
                               const std::optional<ComplexMatrix>& op_a,
                               const std::optional<ComplexMatrix>& op_b) {
    const Eigen::Index d = state.dim();
    auto check = [d](const ComplexMatrix& op, const char* side) {
        if (op.rows() != d || op.cols() != d) {
            throw Error(ErrorCode::kDimensionMismatch,
                        std::string("apply_one_sided: ") + side + " operator is not d x d");
        }
    };
    ComplexMatrix c = state.coeffs();
    if (op_a) {
        check(*op_a, "Alice");
        c = (*op_a) * c;
    }
    if (op_b) {
        check(*op_b, "Bob");
        c = c * op_b->transpose();
    }
    return BipartiteState(std::move(c));
}

Complex project(const BipartiteState& state, const ComplexVector& ket_a,
                const ComplexVector& ket_b) {
    const Eigen::Index d = state.dim();
    if (ket_a.size() != d || ket_b.size() != d) {
        throw Error(ErrorCode::kDimensionMismatch, "project: ket length differs from d");
    }
    return (ket_a.adjoint() * state.coeffs() * ket_b.conjugate())(0, 0);
}

SchmidtSpectrum schmidt(const BipartiteState& state) {
    Eigen::JacobiSVD<ComplexMatrix> svd(state.coeffs(),
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
    ComplexMatrix u = svd.matrixU();
    ComplexMatrix v = svd.matrixV();
    for (Eigen::Index k = 0; k < u.cols(); ++k) {
        Eigen::Index imax = 0;
        u.col(k).cwiseAbs().maxCoeff(&imax);
        const Complex p = u(imax, k);
        const double mag = std::abs(p);
        if (mag > 0.0) {
            const Complex phase = std::conj(p) / mag;
            u.col(k) *= phase;
            v.col(k) *= phase;
        }
    }
    // C = sum_k s_k u_k v_k^dagger, so Bob's Schmidt vectors are conj(v_k).
    return SchmidtSpectrum{svd.singularValues(), u, v.conjugate()};
}

}  // namespace states
}  // namespace qscatter
