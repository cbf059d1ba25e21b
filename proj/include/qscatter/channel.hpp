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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qscatter/numerics.hpp"
#include "qscatter/states.hpp"

namespace qscatter {

/// Which of the N fibre modes are measured (logical) and which one carries
/// the phase-stepping reference.
struct ModeEmbedding {
    Eigen::Index total_modes = 0;
    std::vector<Eigen::Index> logical_indices;
    Eigen::Index reference_index = 0;

    Eigen::Index logical_dim() const {
        return static_cast<Eigen::Index>(logical_indices.size());
    }

    /// Reference mode first, then the logical modes.
    std::vector<Eigen::Index> extended_indices() const;

    /// Throws kInvalidDimension / kInvalidArgument on a bad layout.
    void validate() const;

    /// Reference on mode 0, logical modes 1..d.
    static ModeEmbedding standard(Eigen::Index n_modes, Eigen::Index d);
};

class ChannelModel {
  public:
    ChannelModel(ComplexMatrix unitary, ModeEmbedding embedding,
                 const ToleranceConfig& cfg = default_tolerances());

    const ComplexMatrix& unitary() const { return unitary_; }
    const ModeEmbedding& embedding() const { return embedding_; }

  private:
    ComplexMatrix unitary_;
    ModeEmbedding embedding_;
};

/// Records the measurement basis a reconstructed matrix is expressed in.
/// `transform` is the basis-change operator M (entries <f_k|m>).
struct BasisTag {
    std::string label;
    ComplexMatrix transform;
};

/// Effective (generally non-unitary) transmission matrix on the measured
/// modes. matrix(k, i) is the amplitude for input mode i to exit in mode k.
struct EffectiveT {
    ComplexMatrix matrix;
    bool includes_reference = false;
    std::optional<BasisTag> tag;

    Eigen::Index dim() const { return matrix.rows(); }
};

namespace channel {

/// Sub-block of the channel unitary on the logical modes (reference first
/// when include_reference is set).
EffectiveT effective_t(const ChannelModel& ch, bool include_reference);

/// (I (x) T)|Phi+>: coeffs(i, k) = t_ki / sqrt(d).
BipartiteState choi_state(const EffectiveT& t);

/// Trace-preserving form on the logical inputs: element 0 is the
/// logical-to-logical block, followed by one 1 x d row per remaining output
/// mode (the amplitude to leak into that mode).
std::vector<ComplexMatrix> kraus_tp(const ChannelModel& ch);

/// max |sum_m A_m^dagger A_m - I|.
double kraus_completeness_residual(const std::vector<ComplexMatrix>& kraus);

/// Both photons scattered by independent media reduce to one effective
/// matrix acting on Bob: T = U_B U_A^T.
EffectiveT compose_two_channels(const ComplexMatrix& u_a, const ComplexMatrix& u_b);

/// Haar channel with the standard embedding.
ChannelModel random_channel(Eigen::Index n_modes, Eigen::Index d, std::uint64_t seed);

void save_channel(const ChannelModel& ch, const std::filesystem::path& unitary_csv,
                  const std::filesystem::path& embedding_json);
ChannelModel load_channel(const std::filesystem::path& unitary_csv,
                          const std::filesystem::path& embedding_json);

}  // namespace channel
}  // namespace qscatter
