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
#include <string>

#include "qscatter/bases.hpp"
#include "qscatter/channel.hpp"
#include "qscatter/measure.hpp"
#include "qscatter/states.hpp"

namespace qscatter {

/// Alice-side inversion of a (possibly basis-tagged) transmission matrix.
/// With T tagged in basis M the pair is W = (T_M^{-1})^T M on Alice and M^*
/// on Bob; untagged, M = I.
struct UnscrambleOperators {
    ComplexMatrix w_raw;
    ComplexMatrix bob;
    RealVector eta;        // row-max moduli of w_raw
    bool use_eta = true;   // whether holograms are scaled by eta^{-1}
    double condition_number = 0.0;

    /// The operator Alice actually displays: eta^{-1} W (or W).
    ComplexMatrix alice() const;
};

/// Unscrambler for one rotated basis: Alice V = M_r eta^{-1} W, Bob
/// M_r^* M^*. zeta holds the row-max moduli of V.
struct VOperator {
    BasisFamily basis;
    ComplexMatrix alice;
    ComplexMatrix bob;
    RealVector zeta;
};

namespace unscramble {

/// Row-wise largest modulus. Throws kSingular for an all-zero row.
RealVector slm_eta(const ComplexMatrix& w);

/// Inverts T through pinv. Throws kSingular when T has rank < d at the
/// configured cutoff; otherwise a poorly conditioned T still yields a
/// best-effort unscrambler and the condition number is recorded.
UnscrambleOperators build_w(const EffectiveT& t_tagged, bool use_eta = true,
                            const ToleranceConfig& cfg = default_tolerances());

/// `basis` is the mub(d, r) or tilted(d, r, lambda) family to recover.
VOperator build_v(const UnscrambleOperators& w, const BasisFamily& basis);

/// |(A C B^T)_{wv}|^2 for operators A on Alice and B on Bob.
RealMatrix operator_probabilities(const BipartiteState& state, const ComplexMatrix& alice,
                                  const ComplexMatrix& bob);

/// What the detectors see for the standard-basis unscrambler.
RealMatrix physical_probabilities(const BipartiteState& state, const UnscrambleOperators& w);

/// What the detectors see for a rotated-basis unscrambler: every Alice
/// hologram carries its own 1/zeta_w.
RealMatrix physical_probabilities(const BipartiteState& state, const VOperator& v);

/// Multiplies row w by zeta_w^2 and marks the table corrected; a table that
/// is already corrected comes back unchanged.
CountTable correct_zeta(const CountTable& table, const RealVector& zeta);

/// Noiseless predicted tables normalized to unit sum. `which` empty means the
/// standard-basis unscrambler; otherwise the given rotated-basis unscrambler,
/// with zeta divided out.
CountTable predict_table(const BipartiteState& state, const UnscrambleOperators& w,
                         const std::optional<VOperator>& which = std::nullopt);

/// Divides by the sum. Throws kInvalidArgument on an all-zero table.
CountTable normalized(const CountTable& table);

}  // namespace unscramble
}  // namespace qscatter
