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

#include <cstdint>
#include <map>
#include <string>

#include "qscatter/measure.hpp"
#include "qscatter/numerics.hpp"

namespace qscatter {

/// Target |Phi> = sum_m lambda_m |mm>. Index order is the pixel order; B_k
/// sorts internally.
struct TargetState {
    RealVector lambda;

    Eigen::Index dim() const { return lambda.size(); }

    static TargetState max_entangled(Eigen::Index d);

    /// Rescales to sum lambda^2 = 1. Throws on negative or all-zero input.
    static TargetState from_amplitudes(const RealVector& lambda);

    bool is_uniform(double tol = 1e-12) const;
};

enum class FidelityMethod { kTwoBasisLowerBound, kAllBasesExact };

const char* to_string(FidelityMethod m);

/// Standard-basis table plus rotated tables keyed by basis index r. The
/// rotated tables are MUB tables for a maximally entangled target and tilted
/// tables otherwise, already zeta-corrected.
struct CertificationInputs {
    CountTable standard;
    std::map<int, CountTable> rotated;
};

struct CertificationReport {
    double fidelity = 0.0;
    double fidelity_sigma = 0.0;
    RealVector bounds;  // B_1 .. B_d
    int d_ent = 0;
    FidelityMethod method = FidelityMethod::kAllBasesExact;
    int n_mc = 0;
    bool robust_3sigma = false;
    bool fell_back = false;  // exact requested but bases were missing
    double lower_bound = 0.0;  // two-basis value, always reported
};

namespace certify {

/// lambda_m = sqrt(N_mm / sum_n N_nn). Throws kInvalidArgument on an
/// all-zero diagonal.
TargetState estimate_lambda(const CountTable& standard);

/// B_k = sum of the k largest lambda^2, k = 1..d. Ties go to the lower index.
RealVector bounds(const TargetState& target);

/// <wv|rho|wv> = N_wv / sum N. Also used for MUB tables.
RealMatrix diagonal_elements(const CountTable& table);

/// c = d^2 / (sum lambda)^2 * sum_mn lambda_m lambda_n <mn|rho|mn>, with the
/// <mn|rho|mn> read from the standard-basis table.
double c_lambda(const TargetState& target, const CountTable& standard);

/// c * N_wv / sum N for a tilted table.
RealMatrix tilted_elements(const CountTable& table, double c);

/// Fidelity lower bound from the standard table and one rotated table:
///   (s^2/d) sum_k P(k,k) - sum_{m!=n} l_m l_n <mn|rho|mn>
///     - sum sqrt(l_m l_n l_m' l_n' <mn|rho|mn><m'n'|rho|m'n'>)
/// with s = sum lambda and the last sum over ordered off-diagonal pairs
/// (m,n) != (m',n') sharing m - n = m' - n' (mod d). Never exceeds
/// <Phi|rho|Phi> and equals it on the target itself.
double fidelity_lower_bound(const CountTable& standard, const CountTable& rotated,
                            const TargetState& target);

/// Exact fidelity from the standard table and all d rotated tables:
///   (s^2/d^2) sum_r sum_k P_r(k,k) - sum_{m!=n} l_m l_n <mn|rho|mn>.
/// Falls back to the lower bound (first available r) when a basis is
/// missing and sets fell_back.
double fidelity_exact(const CertificationInputs& inputs, const TargetState& target,
                      bool* fell_back = nullptr);

/// (sum over all d+1 bases of sum_k P_b(k,k) - 1) / d for a maximally
/// entangled target; `rotated` must hold every MUB r = 0..d-1.
double mub_closed_form_fidelity(const CertificationInputs& inputs);

/// d_ent = max{k : fidelity > B_{k-1}}, B_0 = 0.
int entanglement_dimension(double fidelity, const RealVector& bounds);

struct Options {
    FidelityMethod method = FidelityMethod::kAllBasesExact;
    int second_basis = 0;  // r used by the two-basis bound
    int n_mc = 1000;
    std::uint64_t seed = 0;
};

/// Point estimate, bounds, d_ent and a Monte-Carlo sigma from Poisson
/// resamples of every input table. Noiseless inputs skip the resampling.
CertificationReport dimensionality(const CertificationInputs& inputs, const TargetState& target,
                                   const Options& options);

}  // namespace certify
}  // namespace qscatter
