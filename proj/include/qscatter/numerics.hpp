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

#include <complex>
#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

namespace qscatter {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Shared numerical tolerances. Modules take one of these instead of
/// hard-coding their own epsilons.
struct ToleranceConfig {
    double unitarity_tol = 1e-10;
    double pinv_rcond = 1e-12;  // relative to the largest singular value
    double prob_tol = 1e-9;

    /// Throws kInvalidArgument unless every tolerance is in (0, 1e-3).
    void validate() const;
};

const ToleranceConfig& default_tolerances();

namespace numerics {

/// Haar-distributed n x n unitary: QR of a complex Ginibre matrix with the
/// phases of diag(R) folded back into Q.
ComplexMatrix haar_unitary(Eigen::Index n, std::uint64_t seed);

/// Moore-Penrose pseudo-inverse via SVD. Singular values below
/// cfg.pinv_rcond * sigma_max are dropped.
ComplexMatrix pinv(const ComplexMatrix& m,
                   const ToleranceConfig& cfg = default_tolerances());

/// Ratio sigma_max / sigma_min; infinity for a singular matrix.
double condition_number(const ComplexMatrix& m);

RealVector singular_values(const ComplexMatrix& m);

/// max |U^dagger U - I|.
double unitarity_residual(const ComplexMatrix& u);

bool is_unitary(const ComplexMatrix& u,
                const ToleranceConfig& cfg = default_tolerances());

/// min over c of ||a - c b||_F / ||b||_F, with c = <b, a> / <b, b>.
double dist_up_to_scalar(const ComplexMatrix& a, const ComplexMatrix& b);

/// The minimizing c above.
Complex best_scalar(const ComplexMatrix& a, const ComplexMatrix& b);

bool all_finite(const ComplexMatrix& m);

/// max |a - b| over entries.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace numerics

/// Deterministic seed derivation: every random stream in a run is a named
/// child of one root seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                          std::uint64_t index = 0);

}  // namespace qscatter
