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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qscatter/certify.hpp"
#include "qscatter/channel.hpp"
#include "qscatter/matrix_io.hpp"
#include "qscatter/tomo.hpp"
#include "qscatter/unscramble.hpp"
#include "test_util.hpp"

namespace qscatter {
namespace {

ComplexMatrix table_a1() {
    return io::read_matrix_csv(std::string(QSCATTER_FIXTURE_DIR) + "/table_a1_tm0.csv");
}

RealVector table_a2_normalized() {
    RealVector l(7);
    l << 0.4079, 0.2930, 0.3118, 0.3553, 0.3596, 0.4329, 0.4556;
    return l / l.norm();
}

EffectiveT tagged(const ComplexMatrix& t_m, const BasisFamily& basis) {
    return tomo::scan_basis_tag(EffectiveT{t_m}, basis);
}

// Random well-conditioned T and its MUB-0 tagged rotation.
ComplexMatrix random_t(int d, std::mt19937_64& gen) {
    while (true) {
        const ComplexMatrix t = testing::ginibre(d, d, gen);
        if (numerics::condition_number(t) < 100.0) return t;
    }
}

bool diagonal_dominant(const RealMatrix& p) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            if (i == j) continue;
            if (!(p(i, i) > p(i, j) && p(i, i) > p(j, i))) return false;
        }
    }
    return true;
}

TEST(SlmEta, RowMaxima) {
    EXPECT_EQ(unscramble::slm_eta(ComplexMatrix::Identity(4, 4)), RealVector::Ones(4));
    ComplexMatrix w(1, 2);
    w << 0.5, Complex(0.0, -2.0);
    EXPECT_NEAR(unscramble::slm_eta(w)(0), 2.0, 1e-15);
    ComplexMatrix z = ComplexMatrix::Identity(3, 3);
    z.row(1).setZero();
    EXPECT_ERROR_CODE(unscramble::slm_eta(z), ErrorCode::kSingular);
}

TEST(SlmEta, TableA1MatchesIndependentRowMax) {
    const BasisFamily m0 = bases::mub(7, 0);
    const UnscrambleOperators w = unscramble::build_w(tagged(table_a1(), m0));
    const ComplexMatrix oracle = table_a1().inverse().transpose() * m0.transform();
    for (int i = 0; i < 7; ++i) {
        double mx = 0.0;
        for (int j = 0; j < 7; ++j) mx = std::max(mx, std::abs(oracle(i, j)));
        EXPECT_NEAR(w.eta(i), mx, 1e-12);
    }
    EXPECT_LE(w.alice().cwiseAbs().maxCoeff(), 1.0 + 1e-15);
}

TEST(BuildW, IdentityChannel) {
    const UnscrambleOperators w = unscramble::build_w(EffectiveT{ComplexMatrix::Identity(5, 5)});
    EXPECT_LE(numerics::max_abs_diff(w.alice(), ComplexMatrix::Identity(5, 5)), 1e-15);
    const CountTable p = unscramble::predict_table(states::max_entangled(5), w);
    EXPECT_LE((p.values - RealMatrix::Identity(5, 5) / 5.0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BuildW, QubitPhaseChannelWithoutEta) {
    ComplexMatrix t = ComplexMatrix::Zero(2, 2);
    t(0, 0) = 1.0;
    t(1, 1) = Complex(0.0, 1.0);
    const UnscrambleOperators w = unscramble::build_w(EffectiveT{t}, false);
    const BipartiteState out = states::apply_one_sided(channel::choi_state(EffectiveT{t}), w.alice(), w.bob);
    EXPECT_NEAR(std::abs(out.coeffs()(0, 1)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(out.coeffs()(1, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(out.coeffs()(0, 0)), std::abs(out.coeffs()(1, 1)), 1e-15);
}

TEST(BuildW, OneSidedInversionMasterProperty) {
    std::mt19937_64 gen(61);
    const BasisFamily m0 = bases::mub(7, 0);
    for (int trial = 0; trial < 30; ++trial) {
        const ComplexMatrix t = random_t(7, gen);
        const UnscrambleOperators w = unscramble::build_w(tagged(bases::rotate_matrix(t, m0), m0));
        const ComplexMatrix out =
            states::apply_one_sided(channel::choi_state(EffectiveT{t}), w.alice(), w.bob).coeffs();
        const double scale = out.cwiseAbs().maxCoeff();
        RealVector diag(7);
        for (int i = 0; i < 7; ++i) {
            diag(i) = std::abs(out(i, i));
            for (int j = 0; j < 7; ++j) {
                if (i != j) EXPECT_LE(std::abs(out(i, j)), 1e-10 * scale);
            }
        }
        // diagonal proportional to eta^{-1}, with a common phase
        const RealVector expect = w.eta.cwiseInverse();
        EXPECT_LE((diag / diag.norm() - expect / expect.norm()).cwiseAbs().maxCoeff(), 1e-10);
        for (int i = 1; i < 7; ++i) EXPECT_NEAR(std::abs(out(i, i) / out(0, 0) - std::abs(out(i, i) / out(0, 0))), 0.0, 1e-10);

        const UnscrambleOperators flat = unscramble::build_w(tagged(bases::rotate_matrix(t, m0), m0), false);
        const ComplexMatrix phi =
            states::apply_one_sided(channel::choi_state(EffectiveT{t}), flat.alice(), flat.bob).coeffs();
        EXPECT_LE(numerics::dist_up_to_scalar(phi, ComplexMatrix::Identity(7, 7)), 1e-10);
    }
}

TEST(BuildW, RecoveredSchmidtSpectrumFollowsEta) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const ChannelModel ch = channel::random_channel(60, 7, seed);
        const ComplexMatrix t = channel::effective_t(ch, false).matrix;
        const BasisFamily m0 = bases::mub(7, 0);
        const UnscrambleOperators w = unscramble::build_w(tagged(bases::rotate_matrix(t, m0), m0));
        const BipartiteState rec =
            states::apply_one_sided(channel::choi_state(EffectiveT{t}), w.alice(), w.bob).normalized();
        const RealVector sv = states::schmidt(rec).values;
        RealVector expect = w.eta.cwiseInverse().normalized();
        std::sort(expect.data(), expect.data() + 7, std::greater<double>());
        EXPECT_LE((sv - expect).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(BuildW, SingularAndShapeErrors) {
    ComplexMatrix s = ComplexMatrix::Identity(3, 3);
    s(2, 2) = 0.0;
    EXPECT_ERROR_CODE(unscramble::build_w(EffectiveT{s}), ErrorCode::kSingular);
    EXPECT_ERROR_CODE(unscramble::build_w(EffectiveT{ComplexMatrix::Identity(2, 3)}), ErrorCode::kDimensionMismatch);
}

TEST(BuildW, IllConditionedIsBestEffort) {
    ComplexMatrix t = ComplexMatrix::Identity(3, 3);
    t(2, 2) = 1e-9;
    const UnscrambleOperators w = unscramble::build_w(EffectiveT{t});
    EXPECT_NEAR(w.condition_number, 1e9, 1.0);
    EXPECT_TRUE(numerics::all_finite(w.alice()));
}

TEST(BuildW, TableA1StandardPredictionDiagonalDominant) {
    const BasisFamily m0 = bases::mub(7, 0);
    const ComplexMatrix t = bases::unrotate_matrix(table_a1(), m0);
    const UnscrambleOperators w = unscramble::build_w(tagged(table_a1(), m0));
    const CountTable p = unscramble::predict_table(channel::choi_state(EffectiveT{t}), w);
    EXPECT_TRUE(diagonal_dominant(p.values));
    EXPECT_NEAR(p.total(), 1.0, 1e-12);
}

TEST(BuildV, IdentityGivesMubCorrelations) {
    const UnscrambleOperators w = unscramble::build_w(EffectiveT{ComplexMatrix::Identity(5, 5)});
    for (int r = 0; r < 5; ++r) {
        const BasisFamily b = bases::mub(5, r);
        const VOperator v = unscramble::build_v(w, b);
        EXPECT_LE(numerics::max_abs_diff(v.alice, b.transform()), 1e-15);
        const CountTable p = unscramble::predict_table(states::max_entangled(5), w, v);
        EXPECT_LE((p.values - RealMatrix::Identity(5, 5) / 5.0).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(BuildV, QubitPhaseChannelBalancedOutcomes) {
    ComplexMatrix t = ComplexMatrix::Zero(2, 2);
    t(0, 0) = 1.0;
    t(1, 1) = Complex(0.0, 1.0);
    const BipartiteState post = channel::choi_state(EffectiveT{t});
    const UnscrambleOperators w = unscramble::build_w(EffectiveT{t});
    for (int r = 0; r < 2; ++r) {
        const CountTable p = unscramble::predict_table(post, w, unscramble::build_v(w, bases::mub(2, r)));
        EXPECT_NEAR(p.values(0, 0), p.values(1, 1), 1e-14);
        EXPECT_NEAR(p.values(0, 0), 0.5, 1e-14);
    }
}

TEST(BuildV, UniformTargetGivesOneOverDPerOutcome) {
    std::mt19937_64 gen(62);
    const BasisFamily m0 = bases::mub(7, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix t = random_t(7, gen);
        const BipartiteState post = channel::choi_state(EffectiveT{t});
        const UnscrambleOperators w = unscramble::build_w(tagged(bases::rotate_matrix(t, m0), m0), false);
        for (int r = 0; r < 7; ++r) {
            const CountTable p = unscramble::predict_table(post, w, unscramble::build_v(w, bases::mub(7, r)));
            for (int k = 0; k < 7; ++k) EXPECT_NEAR(p.values(k, k), 1.0 / 7.0, 1e-10);
        }
    }
}

TEST(BuildV, TableA1TiltedPredictionsDiagonalDominant) {
    const BasisFamily m0 = bases::mub(7, 0);
    const ComplexMatrix t = bases::unrotate_matrix(table_a1(), m0);
    const BipartiteState post = channel::choi_state(EffectiveT{t});
    const UnscrambleOperators w = unscramble::build_w(tagged(table_a1(), m0));
    for (int r = 0; r < 7; ++r) {
        const VOperator v = unscramble::build_v(w, bases::tilted(7, r, table_a2_normalized()));
        EXPECT_TRUE((v.zeta.array() > 0.0).all());
        EXPECT_TRUE(diagonal_dominant(unscramble::predict_table(post, w, v).values)) << "r=" << r;
    }
}

TEST(BuildV, DimensionMismatch) {
    const UnscrambleOperators w = unscramble::build_w(EffectiveT{ComplexMatrix::Identity(3, 3)});
    EXPECT_ERROR_CODE(unscramble::build_v(w, bases::mub(5, 0)), ErrorCode::kDimensionMismatch);
}

TEST(GaugeInvariance, ScalarMultipleOfT) {
    std::mt19937_64 gen(63);
    const BasisFamily m0 = bases::mub(5, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix t = random_t(5, gen);
        const BipartiteState post = channel::choi_state(EffectiveT{t}).normalized();
        const ComplexMatrix tm = bases::rotate_matrix(t, m0);
        const UnscrambleOperators a = unscramble::build_w(tagged(tm, m0));
        const UnscrambleOperators b = unscramble::build_w(tagged(Complex(-0.3, 2.2) * tm, m0));
        EXPECT_LE((unscramble::predict_table(post, a).values - unscramble::predict_table(post, b).values)
                      .cwiseAbs()
                      .maxCoeff(),
                  1e-10);
        const RealVector l = testing::random_lambda(5, gen);
        for (int r = 0; r < 5; ++r) {
            const BasisFamily tb = bases::tilted(5, r, l);
            const CountTable pa = unscramble::predict_table(post, a, unscramble::build_v(a, tb));
            const CountTable pb = unscramble::predict_table(post, b, unscramble::build_v(b, tb));
            EXPECT_LE((pa.values - pb.values).cwiseAbs().maxCoeff(), 1e-10);
        }
    }
}

TEST(CorrectZeta, IdempotentAndChecked) {
    CountTable t;
    t.values = RealMatrix::Constant(3, 3, 2.0);
    RealVector z(3);
    z << 0.5, 1.0, 2.0;
    const CountTable once = unscramble::correct_zeta(t, z);
    EXPECT_TRUE(once.zeta_corrected);
    EXPECT_NEAR(once.values(0, 1), 0.5, 1e-15);
    EXPECT_NEAR(once.values(2, 0), 8.0, 1e-15);
    EXPECT_EQ(unscramble::correct_zeta(once, z).values, once.values);
    EXPECT_ERROR_CODE(unscramble::correct_zeta(t, RealVector::Ones(2)), ErrorCode::kDimensionMismatch);
}

TEST(CorrectZeta, UndoesHologramScaling) {
    // zeta-scaled physical probabilities, corrected, equal the unscaled operator's
    std::mt19937_64 gen(64);
    const ComplexMatrix t = random_t(5, gen);
    const BipartiteState post = channel::choi_state(EffectiveT{t});
    const UnscrambleOperators w = unscramble::build_w(EffectiveT{t});
    const VOperator v = unscramble::build_v(w, bases::mub(5, 2));
    CountTable phys;
    phys.values = unscramble::physical_probabilities(post, v);
    const CountTable fixed = unscramble::correct_zeta(phys, v.zeta);
    const RealMatrix direct = unscramble::operator_probabilities(post, v.alice, v.bob);
    EXPECT_LE((fixed.values - direct).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE(unscramble::slm_eta(ComplexMatrix(v.zeta.cwiseInverse().asDiagonal() * v.alice)).maxCoeff(), 1.0 + 1e-14);
}

TEST(Normalized, ZeroTableRejected) {
    CountTable t;
    t.values = RealMatrix::Zero(2, 2);
    EXPECT_ERROR_CODE(unscramble::normalized(t), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace qscatter
