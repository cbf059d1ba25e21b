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

#include "qscatter/bases.hpp"

#include <cmath>
#include <numbers>

#include "qscatter/error.hpp"

namespace qscatter {

std::string BasisFamily::label() const {
    switch (kind) {
        case BasisKind::kStandard: return "standard";
        case BasisKind::kMub: return "mub:" + std::to_string(index);
        case BasisKind::kTilted: return "tilted:" + std::to_string(index);
        case BasisKind::kCustom: return "custom";
    }
    return "custom";
}

BasisSpec parse_basis_label(const std::string& label) {
    if (label == "standard") return {BasisKind::kStandard, 0};
    const auto colon = label.find(':');
    if (colon != std::string::npos) {
        const std::string head = label.substr(0, colon);
        const std::string tail = label.substr(colon + 1);
        int r = 0;
        try {
            std::size_t pos = 0;
            r = std::stoi(tail, &pos);
            if (pos != tail.size()) throw std::invalid_argument(tail);
        } catch (const std::exception&) {
            throw Error(ErrorCode::kInvalidArgument, "bad basis index in '" + label + "'");
        }
        if (r < 0) throw Error(ErrorCode::kInvalidArgument, "negative basis index");
        if (head == "mub") return {BasisKind::kMub, r};
        if (head == "tilted") return {BasisKind::kTilted, r};
    }
    throw Error(ErrorCode::kInvalidArgument,
                "basis must be standard, mub:r or tilted:r (got '" + label + "')");
}

bool is_prime(long n) {
    if (n < 2) return false;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p == 0) return false;
    }
    return true;
}

namespace bases {
namespace {

void require_prime(Eigen::Index d, int r) {
    if (!is_prime(static_cast<long>(d))) {
        throw Error(ErrorCode::kUnsupportedDimension,
                    "MUB construction needs a prime dimension, got " + std::to_string(d));
    }
    if (r < 0 || r >= d) {
        throw Error(ErrorCode::kInvalidArgument, "basis index r must be in [0, d)");
    }
}

// Phase of component m of ket k in basis r.
Complex mub_phase(Eigen::Index d, int r, Eigen::Index k, Eigen::Index m) {
    const double pi = std::numbers::pi;
    double angle = 0.0;
    if (d == 2) {
        angle = pi * static_cast<double>(k * m) + 0.5 * pi * static_cast<double>(r * m * m);
    } else {
        const long e = (static_cast<long>(k) * m + static_cast<long>(r) * m * m) % d;
        angle = 2.0 * pi * static_cast<double>(e) / static_cast<double>(d);
    }
    return std::polar(1.0, angle);
}

}  // namespace

BasisFamily standard(Eigen::Index d) {
    if (d < 1) throw Error(ErrorCode::kInvalidDimension, "standard basis: d must be >= 1");
    BasisFamily b;
    b.dim = d;
    b.kind = BasisKind::kStandard;
    b.vectors = ComplexMatrix::Identity(d, d);
    b.per_vector_norm = RealVector::Ones(d);
    return b;
}

BasisFamily mub(Eigen::Index d, int r) {
    require_prime(d, r);
    BasisFamily b;
    b.dim = d;
    b.kind = BasisKind::kMub;
    b.index = r;
    b.vectors.resize(d, d);
    const double amp = 1.0 / std::sqrt(static_cast<double>(d));
    for (Eigen::Index k = 0; k < d; ++k) {
        for (Eigen::Index m = 0; m < d; ++m) b.vectors(k, m) = amp * mub_phase(d, r, k, m);
    }
    b.per_vector_norm = RealVector::Ones(d);
    return b;
}

BasisFamily tilted(Eigen::Index d, int r, const RealVector& lambda,
                   const ToleranceConfig& cfg) {
    require_prime(d, r);
    if (lambda.size() != d) {
        throw Error(ErrorCode::kDimensionMismatch, "tilted: lambda must have d entries");
    }
    if ((lambda.array() < 0.0).any()) {
        throw Error(ErrorCode::kInvalidArgument, "tilted: negative Schmidt weight");
    }
    if (std::abs(lambda.squaredNorm() - 1.0) > cfg.prob_tol) {
        throw Error(ErrorCode::kInvalidArgument, "tilted: sum of lambda^2 must be 1");
    }
    const double sum = lambda.sum();
    BasisFamily b;
    b.dim = d;
    b.kind = BasisKind::kTilted;
    b.index = r;
    b.lambda = lambda;
    b.vectors.resize(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        for (Eigen::Index m = 0; m < d; ++m) {
            b.vectors(k, m) = mub_phase(d, r, k, m) * (std::sqrt(lambda(m)) / sum);
        }
    }
    b.per_vector_norm = RealVector::Constant(d, std::sqrt(sum) / sum);
    return b;
}

BasisFamily custom(ComplexMatrix vectors) {
    if (vectors.rows() != vectors.cols() || vectors.rows() < 1) {
        throw Error(ErrorCode::kInvalidDimension, "custom basis: need d kets of length d");
    }
    BasisFamily b;
    b.dim = vectors.rows();
    b.kind = BasisKind::kCustom;
    b.per_vector_norm = vectors.rowwise().norm();
    b.vectors = std::move(vectors);
    return b;
}

ComplexMatrix rotate_matrix(const ComplexMatrix& t, const BasisFamily& basis) {
    if (t.rows() != basis.dim || t.cols() != basis.dim) {
        throw Error(ErrorCode::kDimensionMismatch, "rotate_matrix: dimension mismatch");
    }
    const ComplexMatrix m = basis.transform();
    return m.conjugate() * t * m.transpose();
}

ComplexMatrix unrotate_matrix(const ComplexMatrix& t_m, const BasisFamily& basis) {
    if (t_m.rows() != basis.dim || t_m.cols() != basis.dim) {
        throw Error(ErrorCode::kDimensionMismatch, "unrotate_matrix: dimension mismatch");
    }
    const ComplexMatrix m = basis.transform();
    return m.transpose() * t_m * m.conjugate();
}

}  // namespace bases
}  // namespace qscatter
