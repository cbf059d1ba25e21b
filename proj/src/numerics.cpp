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

#include "qscatter/numerics.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "qscatter/error.hpp"

namespace qscatter {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::kInvalidDimension: return "invalid-dimension";
        case ErrorCode::kUnsupportedDimension: return "unsupported-dimension";
        case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
        case ErrorCode::kInvalidArgument: return "invalid-argument";
        case ErrorCode::kIllConditioned: return "ill-conditioned";
        case ErrorCode::kSingular: return "singular";
        case ErrorCode::kDegenerateReference: return "degenerate-reference";
        case ErrorCode::kTagConflict: return "tag-conflict";
        case ErrorCode::kMissingPhaseStep: return "missing-phase-step";
        case ErrorCode::kIo: return "io";
        case ErrorCode::kConfig: return "config";
    }
    return "unknown";
}

void ToleranceConfig::validate() const {
    for (double v : {unitarity_tol, pinv_rcond, prob_tol}) {
        if (!(v > 0.0 && v < 1e-3)) {
            throw Error(ErrorCode::kInvalidArgument,
                        "tolerances must lie in (0, 1e-3)");
        }
    }
}

const ToleranceConfig& default_tolerances() {
    static const ToleranceConfig cfg{};
    return cfg;
}

namespace numerics {

ComplexMatrix haar_unitary(Eigen::Index n, std::uint64_t seed) {
    if (n < 1) {
        throw Error(ErrorCode::kInvalidDimension, "haar_unitary: n must be >= 1");
    }
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double re = normal(gen);
            const double im = normal(gen);
            g(i, j) = Complex(re, im);
        }
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix& r = qr.matrixQR();
    for (Eigen::Index k = 0; k < n; ++k) {
        const Complex rkk = r(k, k);
        const double mag = std::abs(rkk);
        q.col(k) *= (mag > 0.0) ? rkk / mag : Complex(1.0, 0.0);
    }
    return q;
}

ComplexMatrix pinv(const ComplexMatrix& m, const ToleranceConfig& cfg) {
    if (m.size() == 0) {
        throw Error(ErrorCode::kInvalidDimension, "pinv: empty matrix");
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& s = svd.singularValues();
    const double cutoff = cfg.pinv_rcond * (s.size() > 0 ? s(0) : 0.0);
    RealVector inv = RealVector::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff && s(i) > 0.0) inv(i) = 1.0 / s(i);
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

RealVector singular_values(const ComplexMatrix& m) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues();
}

double condition_number(const ComplexMatrix& m) {
    const RealVector s = singular_values(m);
    if (s.size() == 0) return std::numeric_limits<double>::infinity();
    const double smin = s(s.size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

double unitarity_residual(const ComplexMatrix& u) {
    if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
    const ComplexMatrix r = u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols());
    return r.cwiseAbs().maxCoeff();
}

bool is_unitary(const ComplexMatrix& u, const ToleranceConfig& cfg) {
    return unitarity_residual(u) <= cfg.unitarity_tol;
}

Complex best_scalar(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorCode::kDimensionMismatch, "best_scalar: shape mismatch");
    }
    const double bb = b.squaredNorm();
    if (bb == 0.0) return Complex(0.0, 0.0);
    // <b, a> = sum conj(b) a
    const Complex ba = (b.conjugate().cwiseProduct(a)).sum();
    return ba / bb;
}

double dist_up_to_scalar(const ComplexMatrix& a, const ComplexMatrix& b) {
    const double nb = b.norm();
    if (nb == 0.0) {
        throw Error(ErrorCode::kInvalidArgument, "dist_up_to_scalar: zero reference");
    }
    const Complex c = best_scalar(a, b);
    return (a - c * b).norm() / nb;
}

bool all_finite(const ComplexMatrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) {
                return false;
            }
        }
    }
    return true;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorCode::kDimensionMismatch, "max_abs_diff: shape mismatch");
    }
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace numerics

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                          std::uint64_t index) {
    // FNV-1a over the stream name keeps derivation stable across platforms.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : stream) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return splitmix64(splitmix64(root ^ h) + index);
}

}  // namespace qscatter
