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

#include "qscatter/certify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qscatter/error.hpp"

namespace qscatter {

TargetState TargetState::max_entangled(Eigen::Index d) {
    if (d < 2) throw Error(ErrorCode::kInvalidDimension, "target: d must be >= 2");
    return TargetState{RealVector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)))};
}

TargetState TargetState::from_amplitudes(const RealVector& lambda) {
    if (lambda.size() < 2) throw Error(ErrorCode::kInvalidDimension, "target: d must be >= 2");
    if (!lambda.allFinite() || lambda.minCoeff() < 0.0) {
        throw Error(ErrorCode::kInvalidArgument, "target: amplitudes must be finite and >= 0");
    }
    const double n = lambda.norm();
    if (!(n > 0.0)) throw Error(ErrorCode::kInvalidArgument, "target: amplitudes are all zero");
    return TargetState{lambda / n};
}

bool TargetState::is_uniform(double tol) const {
    return (lambda.array() - lambda.mean()).abs().maxCoeff() <= tol;
}

const char* to_string(FidelityMethod m) {
    switch (m) {
        case FidelityMethod::kTwoBasisLowerBound:
            return "two_basis_lower_bound";
        case FidelityMethod::kAllBasesExact:
            return "all_bases_exact";
    }
    return "unknown";
}

namespace certify {
namespace {

void check_table(const CountTable& t, Eigen::Index d, const char* what) {
    if (t.dim_a() != d || t.dim_b() != d) {
        throw Error(ErrorCode::kDimensionMismatch, std::string(what) + ": table is not d x d");
    }
    if (!(t.total() > 0.0)) {
        throw Error(ErrorCode::kInvalidArgument, std::string(what) + ": table has no counts");
    }
}

// sum_{m != n} l_m l_n <mn|rho|mn>
double off_diagonal_weight(const RealMatrix& rho, const RealVector& l) {
    double acc = 0.0;
    for (Eigen::Index m = 0; m < l.size(); ++m) {
        for (Eigen::Index n = 0; n < l.size(); ++n) {
            if (m != n) acc += l(m) * l(n) * rho(m, n);
        }
    }
    return acc;
}

double rotated_trace(const CountTable& t, double c) {
    return tilted_elements(t, c).trace();
}

CountTable resample(const CountTable& t, std::uint64_t seed) {
    CountTable out = measure::sample_counts(t.values, 1.0, seed);
    out.basis_a = t.basis_a;
    out.basis_b = t.basis_b;
    out.exposure = t.exposure;
    out.zeta_corrected = t.zeta_corrected;
    return out;
}

double point_estimate(const CertificationInputs& in, const TargetState& target,
                      const Options& opt, bool* fell_back) {
    if (opt.method == FidelityMethod::kAllBasesExact) {
        return fidelity_exact(in, target, fell_back);
    }
    if (fell_back) *fell_back = false;
    const auto it = in.rotated.find(opt.second_basis);
    if (it == in.rotated.end()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "certify: no table for basis r = " + std::to_string(opt.second_basis));
    }
    return fidelity_lower_bound(in.standard, it->second, target);
}

}  // namespace

TargetState estimate_lambda(const CountTable& standard) {
    if (standard.dim_a() != standard.dim_b()) {
        throw Error(ErrorCode::kDimensionMismatch, "estimate_lambda: table is not square");
    }
    const RealVector diag = standard.values.diagonal().cwiseMax(0.0);
    const double total = diag.sum();
    if (!(total > 0.0)) {
        throw Error(ErrorCode::kInvalidArgument, "estimate_lambda: diagonal has no counts");
    }
    return TargetState{(diag / total).cwiseSqrt()};
}

RealVector bounds(const TargetState& target) {
    const Eigen::Index d = target.dim();
    std::vector<Eigen::Index> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return target.lambda(a) > target.lambda(b);
    });
    RealVector b(d);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
        acc += target.lambda(order[k]) * target.lambda(order[k]);
        b(k) = acc;
    }
    return b;
}

RealMatrix diagonal_elements(const CountTable& table) {
    const double total = table.total();
    if (!(total > 0.0)) throw Error(ErrorCode::kInvalidArgument, "table has no counts");
    return table.values / total;
}

double c_lambda(const TargetState& target, const CountTable& standard) {
    const Eigen::Index d = target.dim();
    check_table(standard, d, "c_lambda");
    const RealMatrix rho = diagonal_elements(standard);
    const double s = target.lambda.sum();
    const double w = target.lambda.transpose() * rho * target.lambda;
    return static_cast<double>(d * d) / (s * s) * w;
}

RealMatrix tilted_elements(const CountTable& table, double c) {
    return c * diagonal_elements(table);
}

double fidelity_lower_bound(const CountTable& standard, const CountTable& rotated,
                            const TargetState& target) {
    const Eigen::Index d = target.dim();
    check_table(standard, d, "fidelity_lower_bound");
    check_table(rotated, d, "fidelity_lower_bound");
    const RealVector& l = target.lambda;
    const RealMatrix rho = diagonal_elements(standard);
    const double s = l.sum();
    const double c = c_lambda(target, standard);

    double coherence = 0.0;
    for (Eigen::Index m = 0; m < d; ++m) {
        for (Eigen::Index n = 0; n < d; ++n) {
            if (m == n) continue;
            const Eigen::Index diff = (m - n + d) % d;
            for (Eigen::Index mp = 0; mp < d; ++mp) {
                const Eigen::Index np = (mp - diff + d) % d;
                if (mp == m) continue;
                coherence += std::sqrt(l(m) * l(n) * l(mp) * l(np) * rho(m, n) * rho(mp, np));
            }
        }
    }
    return s * s / static_cast<double>(d) * rotated_trace(rotated, c) -
           off_diagonal_weight(rho, l) - coherence;
}

double fidelity_exact(const CertificationInputs& inputs, const TargetState& target,
                      bool* fell_back) {
    const Eigen::Index d = target.dim();
    check_table(inputs.standard, d, "fidelity_exact");
    if (inputs.rotated.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "fidelity_exact: no rotated tables");
    }
    bool complete = true;
    for (int r = 0; r < d; ++r) complete = complete && inputs.rotated.count(r) > 0;
    if (fell_back) *fell_back = !complete;
    if (!complete) {
        return fidelity_lower_bound(inputs.standard, inputs.rotated.begin()->second, target);
    }
    const RealVector& l = target.lambda;
    const RealMatrix rho = diagonal_elements(inputs.standard);
    const double s = l.sum();
    const double c = c_lambda(target, inputs.standard);
    double traces = 0.0;
    for (int r = 0; r < d; ++r) {
        const CountTable& t = inputs.rotated.at(r);
        check_table(t, d, "fidelity_exact");
        traces += rotated_trace(t, c);
    }
    return s * s / static_cast<double>(d * d) * traces - off_diagonal_weight(rho, l);
}

double mub_closed_form_fidelity(const CertificationInputs& inputs) {
    const Eigen::Index d = inputs.standard.dim_a();
    check_table(inputs.standard, d, "mub_closed_form_fidelity");
    double acc = diagonal_elements(inputs.standard).trace();
    for (int r = 0; r < d; ++r) {
        const auto it = inputs.rotated.find(r);
        if (it == inputs.rotated.end()) {
            throw Error(ErrorCode::kInvalidArgument,
                        "mub_closed_form_fidelity: missing basis r = " + std::to_string(r));
        }
        check_table(it->second, d, "mub_closed_form_fidelity");
        acc += diagonal_elements(it->second).trace();
    }
    return (acc - 1.0) / static_cast<double>(d);
}

int entanglement_dimension(double fidelity, const RealVector& b) {
    int k = 0;
    for (Eigen::Index j = 1; j <= b.size(); ++j) {
        const double below = (j == 1) ? 0.0 : b(j - 2);
        if (fidelity > below) k = static_cast<int>(j);
    }
    return k;
}

CertificationReport dimensionality(const CertificationInputs& inputs, const TargetState& target,
                                   const Options& opt) {
    if (opt.n_mc < 0) throw Error(ErrorCode::kInvalidArgument, "certify: n_mc must be >= 0");
    CertificationReport rep;
    rep.method = opt.method;
    rep.bounds = bounds(target);
    rep.fidelity = point_estimate(inputs, target, opt, &rep.fell_back);
    if (rep.fell_back) rep.method = FidelityMethod::kTwoBasisLowerBound;
    {
        const auto it = inputs.rotated.find(opt.second_basis);
        const CountTable& second =
            (it != inputs.rotated.end()) ? it->second : inputs.rotated.begin()->second;
        rep.lower_bound = fidelity_lower_bound(inputs.standard, second, target);
    }
    rep.d_ent = entanglement_dimension(rep.fidelity, rep.bounds);

    bool noiseless = inputs.standard.noiseless();
    for (const auto& [r, t] : inputs.rotated) noiseless = noiseless && t.noiseless();
    if (!noiseless && opt.n_mc > 1) {
        std::vector<double> samples;
        samples.reserve(opt.n_mc);
        for (int i = 0; i < opt.n_mc; ++i) {
            const std::uint64_t base = derive_seed(opt.seed, "mc", static_cast<std::uint64_t>(i));
            CertificationInputs re;
            re.standard = resample(inputs.standard, derive_seed(base, "standard"));
            for (const auto& [r, t] : inputs.rotated) {
                re.rotated.emplace(r, resample(t, derive_seed(base, "rotated", r)));
            }
            try {
                samples.push_back(point_estimate(re, target, opt, nullptr));
            } catch (const Error&) {
                // an empty resampled table carries no information
            }
        }
        rep.n_mc = static_cast<int>(samples.size());
        if (samples.size() > 1) {
            const double mean =
                std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
            double var = 0.0;
            for (double x : samples) var += (x - mean) * (x - mean);
            rep.fidelity_sigma = std::sqrt(var / (samples.size() - 1));
        }
    }
    const double below = (rep.d_ent <= 1) ? 0.0 : rep.bounds(rep.d_ent - 2);
    rep.robust_3sigma = rep.d_ent >= 1 && rep.fidelity - 3.0 * rep.fidelity_sigma > below;
    return rep;
}

}  // namespace certify
}  // namespace qscatter
