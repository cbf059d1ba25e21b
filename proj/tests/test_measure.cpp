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
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "qscatter/channel.hpp"
#include "qscatter/matrix_io.hpp"
#include "qscatter/measure.hpp"
#include "test_util.hpp"

namespace qscatter {
namespace {

// Extended 2-mode state (reference + one pixel) whose Bob-side transmission
// is t_ext; source is the unnormalized identity.
BipartiteState one_pixel_state(Complex t00, Complex t10, Complex t11) {
    ComplexMatrix t(2, 2);
    t << t00, 0.0, t10, t11;
    return states::apply_one_sided(BipartiteState(ComplexMatrix::Identity(2, 2)), std::nullopt, t);
}

std::array<double, 4> cell(const PhaseStepScan& scan, int a, int b) {
    return {scan[0].table.values(a, b), scan[1].table.values(a, b), scan[2].table.values(a, b),
            scan[3].table.values(a, b)};
}

TEST(CoincidenceProb, PhiPlusStandard) {
    const BipartiteState phi = states::max_entangled(5);
    for (int m = 0; m < 5; ++m) {
        for (int n = 0; n < 5; ++n) {
            EXPECT_NEAR(measure::coincidence_prob(phi, bases::standard(5).ket(m), bases::standard(5).ket(n)),
                        m == n ? 0.2 : 0.0, 1e-15);
        }
    }
}

TEST(CoincidenceProb, PhiPlusMatchedFourier) {
    const RealMatrix p = measure::probability_table(states::max_entangled(7), bases::mub(7, 0));
    for (int k = 0; k < 7; ++k) EXPECT_NEAR(p(k, k), 1.0 / 7.0, 1e-12);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
}

TEST(ProbabilityTable, ScrambledStateFollowsTransmissionMagnitudes) {
    const ComplexMatrix t = io::read_matrix_csv(std::string(QSCATTER_FIXTURE_DIR) + "/table_a1_tm0.csv");
    const BipartiteState s = channel::choi_state(EffectiveT{t});
    const RealMatrix p = measure::probability_table(s, bases::standard(7));
    EXPECT_LE((p - RealMatrix(t.transpose().cwiseAbs2() / 7.0)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ProbabilityTable, CompleteBasisSumsToNorm) {
    std::mt19937_64 gen(41);
    for (int t = 0; t < 20; ++t) {
        const BipartiteState s(0.6 * testing::random_state(5, gen).coeffs());
        for (int r : {-1, 0, 2}) {
            const BasisFamily b = r < 0 ? bases::standard(5) : bases::mub(5, r);
            EXPECT_NEAR(measure::probability_table(s, b).sum(), s.norm_sq(), 1e-9);
        }
    }
}

TEST(ProbabilityTable, KetLengthMismatch) {
    EXPECT_ERROR_CODE(measure::probability_table(states::max_entangled(3), ComplexMatrix::Identity(2, 2),
                                                 ComplexMatrix::Identity(3, 3)),
                      ErrorCode::kDimensionMismatch);
}

TEST(SampleCounts, ZeroExposureGivesZeros) {
    const CountTable t = measure::sample_counts(RealMatrix::Constant(3, 3, 1.0 / 9.0), 0.0, 1);
    EXPECT_EQ(t.total(), 0.0);
}

TEST(SampleCounts, CertainCellMean) {
    RealMatrix p = RealMatrix::Zero(2, 2);
    p(0, 0) = 1.0;
    double sum = 0.0;
    for (int i = 0; i < 100; ++i) sum += measure::sample_counts(p, 1e4, derive_seed(1, "t", i)).values(0, 0);
    EXPECT_NEAR(sum / 100.0, 1e4, 500.0);
}

TEST(SampleCounts, UniformTableMoments) {
    const RealMatrix p = RealMatrix::Constant(7, 7, 1.0 / 49.0);
    const int trials = 100;
    RealMatrix sum = RealMatrix::Zero(7, 7);
    RealMatrix sum_sq = RealMatrix::Zero(7, 7);
    for (int i = 0; i < trials; ++i) {
        const RealMatrix v = measure::sample_counts(p, 4.9e4, derive_seed(2, "t", i)).values;
        sum += v;
        sum_sq += v.cwiseAbs2();
    }
    const RealMatrix mean = sum / trials;
    const RealMatrix var = sum_sq / trials - mean.cwiseAbs2();
    EXPECT_NEAR(mean.mean(), 1000.0, 100.0);
    EXPECT_NEAR(var.mean(), 1000.0, 100.0);
}

TEST(SampleCounts, DeterministicAndNoiseless) {
    std::mt19937_64 gen(3);
    RealMatrix p = RealMatrix::Random(4, 4).cwiseAbs();
    p /= p.sum();
    EXPECT_EQ(measure::sample_counts(p, 1e3, 9).values, measure::sample_counts(p, 1e3, 9).values);
    const CountTable exact = measure::sample_counts(p, kNoiseless, 9);
    EXPECT_TRUE(exact.noiseless());
    EXPECT_EQ(exact.values, p);
}

TEST(SampleCounts, DarkRateAddsBackground) {
    const RealMatrix p = RealMatrix::Zero(5, 5);
    double total = 0.0;
    for (int i = 0; i < 50; ++i) total += measure::sample_counts(p, 1e4, derive_seed(4, "d", i), 10.0).total();
    EXPECT_NEAR(total / 50.0, 250.0, 5.0 * std::sqrt(250.0 / 50.0));
}

TEST(SampleCounts, Rejections) {
    RealMatrix p = RealMatrix::Constant(2, 2, 0.25);
    p(0, 1) = -0.1;
    EXPECT_ERROR_CODE(measure::sample_counts(p, 10.0, 1), ErrorCode::kInvalidArgument);
    p(0, 1) = -1e-12;  // within prob_tol: clipped
    EXPECT_EQ(measure::sample_counts(p, kNoiseless, 1).values(0, 1), 0.0);
    EXPECT_ERROR_CODE(measure::sample_counts(p.cwiseAbs(), -1.0, 1), ErrorCode::kInvalidArgument);
    EXPECT_ERROR_CODE(measure::sample_counts(p.cwiseAbs(), 1.0, 1, -2.0), ErrorCode::kInvalidArgument);
}

TEST(PhaseStepScanS, HandComputedPattern) {
    // t_n0 = 1, t_nm = i: R(theta) = |e^{-i theta} + i|^2 = (2, 0, 2, 4)
    const BipartiteState s = one_pixel_state(0.3, 1.0, Complex(0.0, 1.0));
    const auto r = cell(measure::phase_step_scan_s(s, bases::standard(1), kNoiseless, 0), 0, 0);
    EXPECT_NEAR(r[0], 2.0, 1e-14);
    EXPECT_NEAR(r[1], 0.0, 1e-14);
    EXPECT_NEAR(r[2], 2.0, 1e-14);
    EXPECT_NEAR(r[3], 4.0, 1e-14);
}

TEST(PhaseStepScanS, IdentityChannelPattern) {
    // identity pixels, reference leaking delta into output pixel: |delta e^{-i theta} + 1|^2
    const Complex delta(0.2, 0.1);
    const BipartiteState s = one_pixel_state(1.0, delta, 1.0);
    const auto r = cell(measure::phase_step_scan_s(s, bases::standard(1), kNoiseless, 0), 0, 0);
    for (int k = 0; k < 4; ++k) {
        const Complex e = std::polar(1.0, -0.5 * std::numbers::pi * k);
        EXPECT_NEAR(r[k], std::norm(delta * e + 1.0), 1e-14);
    }
}

TEST(PhaseStepScanS, PhaseIndependentSum) {
    const ChannelModel ch = channel::random_channel(20, 3, 8);
    const ComplexMatrix t = channel::effective_t(ch, true).matrix;
    const BipartiteState s = states::apply_one_sided(BipartiteState(ComplexMatrix::Identity(4, 4)), std::nullopt, t);
    const PhaseStepScan scan = measure::phase_step_scan_s(s, bases::standard(3), kNoiseless, 0);
    for (int m = 0; m < 3; ++m) {
        for (int n = 0; n < 3; ++n) {
            const auto r = cell(scan, m, n);
            EXPECT_NEAR(r[0] + r[1] + r[2] + r[3], 4.0 * (std::norm(t(n + 1, 0)) + std::norm(t(n + 1, m + 1))),
                        1e-13);
        }
    }
}

TEST(PhaseStepScanE, HandComputedPatterns) {
    // Alice projects the reference; Bob steps: R = |t00 e^{-i theta} + t_m0|^2
    const BipartiteState s = one_pixel_state(1.0, Complex(0.0, 1.0), 0.4);
    const auto r = cell(measure::phase_step_scan_e(s, bases::standard(1), kNoiseless, 0), 0, 0);
    EXPECT_NEAR(r[0], 2.0, 1e-14);
    EXPECT_NEAR(r[1], 0.0, 1e-14);
    EXPECT_NEAR(r[2], 2.0, 1e-14);
    EXPECT_NEAR(r[3], 4.0, 1e-14);
    const Complex t00(0.5, -0.2);
    const Complex tm0(0.3, 0.7);
    const auto q = cell(measure::phase_step_scan_e(one_pixel_state(t00, tm0, 1.0), bases::standard(1), kNoiseless, 0),
                        0, 0);
    for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(q[k], std::norm(t00 * std::polar(1.0, -0.5 * std::numbers::pi * k) + tm0), 1e-14);
    }
    EXPECT_NEAR(q[0] + q[1] + q[2] + q[3], 4.0 * (std::norm(t00) + std::norm(tm0)), 1e-13);
}

TEST(PhaseStepScan, InputValidation) {
    ComplexMatrix c = ComplexMatrix::Identity(3, 3);
    c(0, 0) = 0.0;
    EXPECT_ERROR_CODE(measure::phase_step_scan_s(BipartiteState(c), bases::standard(2), kNoiseless, 0),
                      ErrorCode::kDegenerateReference);
    EXPECT_ERROR_CODE(measure::phase_step_scan_e(BipartiteState(c), bases::standard(2), kNoiseless, 0),
                      ErrorCode::kDegenerateReference);
    EXPECT_ERROR_CODE(measure::phase_step_scan_s(states::max_entangled(3), bases::standard(3), kNoiseless, 0),
                      ErrorCode::kDimensionMismatch);
}

TEST(PhaseStepScan, ExposureIsMeanTableTotal) {
    const ChannelModel ch = channel::random_channel(30, 5, 12);
    const BipartiteState s = states::apply_one_sided(states::max_entangled(6), std::nullopt,
                                                     channel::effective_t(ch, true).matrix)
                                 .normalized();
    double total = 0.0;
    const int trials = 40;
    for (int i = 0; i < trials; ++i) {
        const PhaseStepScan scan = measure::phase_step_scan_s(s, bases::mub(5, 0), 1e4, derive_seed(5, "x", i));
        for (const auto& rec : scan) {
            total += rec.table.total();
            EXPECT_EQ(rec.table.exposure, 1e4);
        }
    }
    EXPECT_NEAR(total / (4.0 * trials), 1e4, 5.0 * std::sqrt(1e4 / (4.0 * trials)));
}

TEST(PhaseStepScan, StepsAndLabels) {
    const BipartiteState s = states::max_entangled(4);
    const PhaseStepScan scan = measure::phase_step_scan_s(s, bases::mub(3, 1), kNoiseless, 0);
    for (int k = 0; k < 4; ++k) {
        EXPECT_EQ(scan[k].step, k);
        EXPECT_NEAR(scan[k].theta(), 0.5 * std::numbers::pi * k, 1e-15);
        EXPECT_EQ(scan[k].table.basis_a, "ref+mub:1");
    }
}

TEST(CountTableIo, RoundTrip) {
    CountTable t = measure::sample_counts(RealMatrix::Constant(3, 4, 0.1), 1e3, 77);
    t.basis_a = "mub:2";
    t.basis_b = "mub:2*";
    std::stringstream ss;
    io::write_count_table(ss, t);
    const CountTable back = io::read_count_table(ss);
    EXPECT_EQ(back.values, t.values);
    EXPECT_EQ(back.basis_a, "mub:2");
    EXPECT_EQ(back.exposure, 1e3);
    EXPECT_EQ(back.seed, 77u);

    CountTable exact = measure::sample_counts(RealMatrix::Constant(2, 2, 1.0 / 3.0), kNoiseless, 0);
    std::stringstream ss2;
    io::write_count_table(ss2, exact);
    const CountTable back2 = io::read_count_table(ss2);
    EXPECT_TRUE(back2.noiseless());
    EXPECT_EQ(back2.values, exact.values);
}

TEST(CountTableIo, MalformedInput) {
    std::stringstream missing("standard,standard*,inf,0\n0,0,1\n1,1,1\n");
    EXPECT_ERROR_CODE(io::read_count_table(missing), ErrorCode::kIo);
    std::stringstream header("standard,1\n");
    EXPECT_ERROR_CODE(io::read_count_table(header), ErrorCode::kIo);
    std::stringstream neg("a,b,1,0\n0,0,-1\n");
    EXPECT_ERROR_CODE(io::read_count_table(neg), ErrorCode::kIo);
}

}  // namespace
}  // namespace qscatter
