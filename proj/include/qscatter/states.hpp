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

#include <optional>

#include "qscatter/numerics.hpp"

namespace qscatter {

/// Pure two-party state of local dimension d stored as its coefficient
/// matrix: coeffs(i, j) multiplies |i>_A |j>_B. The state may be
/// sub-normalized; nothing here renormalizes implicitly.
class BipartiteState {
  public:
    /// Throws kInvalidDimension unless coeffs is square with d >= 2, and
    /// kInvalidArgument for a zero or non-finite state.
    explicit BipartiteState(ComplexMatrix coeffs);

    Eigen::Index dim() const { return coeffs_.rows(); }
    const ComplexMatrix& coeffs() const { return coeffs_; }
    double norm_sq() const { return norm_sq_; }

    /// True when norm_sq <= 1 + prob_tol, i.e. reachable from a normalized
    /// source by postselection.
    bool is_physical(const ToleranceConfig& cfg = default_tolerances()) const;

    BipartiteState normalized() const;

  private:
    ComplexMatrix coeffs_;
    double norm_sq_;
};

struct SchmidtSpectrum {
    RealVector values;      // descending
    ComplexMatrix basis_a;  // columns: Alice Schmidt vectors
    ComplexMatrix basis_b;  // columns: Bob Schmidt vectors
};

namespace states {

/// (1/sqrt(d)) sum_i |ii>.
BipartiteState max_entangled(Eigen::Index d);

/// Applies op_a (x) op_b: coeffs' = op_a * C * op_b^T. A missing operator is
/// the identity.
BipartiteState apply_one_sided(const BipartiteState& state,
                               const std::optional<ComplexMatrix>& op_a,
                               const std::optional<ComplexMatrix>& op_b);

/// <ket_a, ket_b | state> = sum_ij conj(a_i) conj(b_j) C_ij. Kets need not be
/// normalized.
Complex project(const BipartiteState& state, const ComplexVector& ket_a,
                const ComplexVector& ket_b);

/// SVD of the coefficient matrix. The largest-magnitude entry of each Alice
/// vector is made real-positive.
SchmidtSpectrum schmidt(const BipartiteState& state);

}  // namespace states
}  // namespace qscatter
