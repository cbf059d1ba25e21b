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

#include "qscatter/channel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "qscatter/error.hpp"
#include "qscatter/matrix_io.hpp"

namespace qscatter {

std::vector<Eigen::Index> ModeEmbedding::extended_indices() const {
    std::vector<Eigen::Index> idx;
    idx.reserve(logical_indices.size() + 1);
    idx.push_back(reference_index);
    idx.insert(idx.end(), logical_indices.begin(), logical_indices.end());
    return idx;
}

void ModeEmbedding::validate() const {
    const Eigen::Index d = logical_dim();
    if (d < 1 || d + 1 > total_modes) {
        throw Error(ErrorCode::kInvalidDimension,
                    "ModeEmbedding: need 1 <= d and d + 1 <= N");
    }
    std::set<Eigen::Index> seen;
    for (Eigen::Index i : extended_indices()) {
        if (i < 0 || i >= total_modes) {
            throw Error(ErrorCode::kInvalidArgument, "ModeEmbedding: index out of range");
        }
        if (!seen.insert(i).second) {
            throw Error(ErrorCode::kInvalidArgument, "ModeEmbedding: repeated index");
        }
    }
}

ModeEmbedding ModeEmbedding::standard(Eigen::Index n_modes, Eigen::Index d) {
    ModeEmbedding e;
    e.total_modes = n_modes;
    e.reference_index = 0;
    for (Eigen::Index i = 1; i <= d; ++i) e.logical_indices.push_back(i);
    e.validate();
    return e;
}

ChannelModel::ChannelModel(ComplexMatrix unitary, ModeEmbedding embedding,
                           const ToleranceConfig& cfg)
    : unitary_(std::move(unitary)), embedding_(std::move(embedding)) {
    embedding_.validate();
    if (unitary_.rows() != embedding_.total_modes || unitary_.cols() != embedding_.total_modes) {
        throw Error(ErrorCode::kDimensionMismatch, "ChannelModel: unitary is not N x N");
    }
    if (!numerics::is_unitary(unitary_, cfg)) {
        throw Error(ErrorCode::kInvalidArgument, "ChannelModel: matrix is not unitary");
    }
}

namespace channel {

EffectiveT effective_t(const ChannelModel& ch, bool include_reference) {
    const auto& emb = ch.embedding();
    const std::vector<Eigen::Index> idx =
        include_reference ? emb.extended_indices() : emb.logical_indices;
    const auto n = static_cast<Eigen::Index>(idx.size());
    ComplexMatrix t(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) {
            t(k, i) = ch.unitary()(idx[k], idx[i]);
        }
    }
    return EffectiveT{std::move(t), include_reference, std::nullopt};
}

BipartiteState choi_state(const EffectiveT& t) {
    if (t.matrix.rows() != t.matrix.cols()) {
        throw Error(ErrorCode::kDimensionMismatch, "choi_state: T must be square");
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(t.dim()));
    return BipartiteState(t.matrix.transpose() * scale);
}

std::vector<ComplexMatrix> kraus_tp(const ChannelModel& ch) {
    const auto& emb = ch.embedding();
    const auto& u = ch.unitary();
    const Eigen::Index d = emb.logical_dim();
    std::vector<ComplexMatrix> ops;
    ComplexMatrix a0(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        for (Eigen::Index r = 0; r < d; ++r) {
            a0(k, r) = u(emb.logical_indices[k], emb.logical_indices[r]);
        }
    }
    ops.push_back(std::move(a0));
    std::vector<bool> logical(static_cast<std::size_t>(emb.total_modes), false);
    for (Eigen::Index i : emb.logical_indices) logical[static_cast<std::size_t>(i)] = true;
    for (Eigen::Index m = 0; m < emb.total_modes; ++m) {
        if (logical[static_cast<std::size_t>(m)]) continue;
        ComplexMatrix am(1, d);
        for (Eigen::Index r = 0; r < d; ++r) am(0, r) = u(m, emb.logical_indices[r]);
        ops.push_back(std::move(am));
    }
    return ops;
}

double kraus_completeness_residual(const std::vector<ComplexMatrix>& kraus) {
    if (kraus.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "kraus: empty operator list");
    }
    const Eigen::Index d = kraus.front().cols();
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const auto& a : kraus) sum += a.adjoint() * a;
    return (sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
}

EffectiveT compose_two_channels(const ComplexMatrix& u_a, const ComplexMatrix& u_b) {
    if (u_a.rows() != u_a.cols() || u_b.rows() != u_b.cols() || u_a.rows() != u_b.rows()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "compose_two_channels: both operators must be d x d");
    }
    return EffectiveT{u_b * u_a.transpose(), false, std::nullopt};
}

ChannelModel random_channel(Eigen::Index n_modes, Eigen::Index d, std::uint64_t seed) {
    return ChannelModel(numerics::haar_unitary(n_modes, seed),
                        ModeEmbedding::standard(n_modes, d));
}

void save_channel(const ChannelModel& ch, const std::filesystem::path& unitary_csv,
                  const std::filesystem::path& embedding_json) {
    io::write_matrix_csv(unitary_csv, ch.unitary());
    nlohmann::json j;
    j["total_modes"] = ch.embedding().total_modes;
    j["logical_indices"] = ch.embedding().logical_indices;
    j["reference_index"] = ch.embedding().reference_index;
    io::write_text(embedding_json, j.dump(2) + "\n");
}

ChannelModel load_channel(const std::filesystem::path& unitary_csv,
                          const std::filesystem::path& embedding_json) {
    ComplexMatrix u = io::read_matrix_csv(unitary_csv);
    ModeEmbedding e;
    try {
        const auto j = nlohmann::json::parse(io::read_text(embedding_json));
        e.total_modes = j.at("total_modes").get<Eigen::Index>();
        e.logical_indices = j.at("logical_indices").get<std::vector<Eigen::Index>>();
        e.reference_index = j.at("reference_index").get<Eigen::Index>();
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::kIo, std::string("embedding json: ") + ex.what());
    }
    return ChannelModel(std::move(u), std::move(e));
}

}  // namespace channel
}  // namespace qscatter
