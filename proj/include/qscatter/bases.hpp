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

#include <string>

#include "qscatter/numerics.hpp"

namespace qscatter {

enum class BasisKind { kStandard, kMub, kTilted, kCustom };

/// d measurement kets, stored as the rows of `vectors`. Bob always measures
/// the complex conjugates of the rows.
struct BasisFamily {
    Eigen::Index dim = 0;
    BasisKind kind = BasisKind::kStandard;
    int index = 0;             // r for mub / tilted
    RealVector lambda;         // Schmidt weights for tilted, empty otherwise
    ComplexMatrix vectors;     // row k is ket k
    RealVector per_vector_norm;

    ComplexVector ket(Eigen::Index k) const { return vectors.row(k).transpose(); }

    /// Basis-change operator M with entries <f_k|m>, i.e. conj(vectors).
    /// Measuring Alice in this family and Bob in its conjugate is the
    /// operator M (x) M^* followed by a standard-basis readout.
    ComplexMatrix transform() const { return vectors.conjugate(); }

    /// "standard", "mub:r", "tilted:r" or "custom".
    std::string label() const;
};

struct BasisSpec {
    BasisKind kind = BasisKind::kStandard;
    int index = 0;
};

/// Parses "standard", "mub:r" or "tilted:r".
BasisSpec parse_basis_label(const std::string& label);

bool is_prime(long n);

namespace bases {

BasisFamily standard(Eigen::Index d);

/// Prime-dimension mutually unbiased bases, ket k of basis r having
/// components w^(k m + r m^2) / sqrt(d), w = exp(2 pi i / d). For d = 2 the
/// quadratic phase is i^(r m^2), which is what makes the two non-standard
/// qubit bases unbiased.
BasisFamily mub(Eigen::Index d, int r);

/// Tilted family: components w^(k m + r m^2) sqrt(lambda_m) / sum_n lambda_n.
/// The kets are not orthogonal in general and have squared norm
/// 1 / sum_n lambda_n; per_vector_norm records the norm.
BasisFamily tilted(Eigen::Index d, int r, const RealVector& lambda,
                   const ToleranceConfig& cfg = default_tolerances());

/// Wraps arbitrary kets (rows) as a custom family.
BasisFamily custom(ComplexMatrix vectors);

/// T_M = M^* T M^T with M = basis.transform().
ComplexMatrix rotate_matrix(const ComplexMatrix& t, const BasisFamily& basis);

/// Inverse direction, T = M^T T_M M^*. Exact only for unitary M.
ComplexMatrix unrotate_matrix(const ComplexMatrix& t_m, const BasisFamily& basis);

}  // namespace bases
}  // namespace qscatter
