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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qscatter/certify.hpp"
#include "qscatter/measure.hpp"
#include "qscatter/numerics.hpp"

namespace qscatter {

enum class ScenarioKind { kBaseline, kScramble, kTomography, kUnscrambleCertify, kTwoChannel, kFixtureA1 };

const char* to_string(ScenarioKind k);
ScenarioKind parse_scenario_kind(const std::string& name);

struct ScenarioConfig {
    ScenarioKind scenario = ScenarioKind::kBaseline;
    int d = 7;
    int n_modes = 60;
    std::uint64_t seed = 0;
    double exposure = kNoiseless;
    double dark_rate = 0.0;
    double reference_amplitude = 1.0;
    int n_mc = 1000;
    int min_dent = 2;  // d_ent below this exits with kExitCertificationFailed
    std::string tomo_basis = "mub:0";
    std::string fixture_dir = QSCATTER_FIXTURE_DIR;

    /// Throws Error(kConfig) on d not prime, n_modes < d + 1, bad rates.
    void validate() const;
};

/// Flat-key JSON object. Unknown keys and wrong types raise kConfig.
/// Keys absent from the text keep the values in `base`.
ScenarioConfig parse_config(const std::string& json_text, ScenarioConfig base = {});

std::string config_json(const ScenarioConfig& cfg);

struct NamedTable {
    std::string name;
    CountTable table;
};

struct NamedMatrix {
    std::string name;
    ComplexMatrix matrix;
};

struct ScenarioResult {
    ScenarioConfig config;
    std::vector<NamedTable> tables;
    std::vector<NamedMatrix> matrices;
    std::map<std::string, double> metrics;
    std::optional<TargetState> target;
    std::optional<CertificationReport> certification;
    std::vector<std::string> notes;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitConditioning = 3;
inline constexpr int kExitCertificationFailed = 4;

/// kExitCertificationFailed when a certification ran and d_ent < min_dent.
int exit_status(const ScenarioResult& result);

namespace scenario {

/// Runs one scenario in memory. Module errors propagate with the scenario
/// name prepended to the message.
ScenarioResult run(const ScenarioConfig& cfg);

/// The report_v1 JSON document.
std::string report_json(const ScenarioResult& result);

/// Writes report.json, tables/<name>.csv and matrices/<name>.csv.
void emit_report(const ScenarioResult& result, const std::filesystem::path& out_dir);

/// Fixture transmission matrix (untagged) and target amplitudes, as stored.
ComplexMatrix load_fixture_tm0(const std::string& fixture_dir);
RealVector load_fixture_lambda(const std::string& fixture_dir);

/// {"lambda": [...]} read/write, shared with the CLI.
RealVector read_lambda_json(const std::filesystem::path& path);
void write_lambda_json(const std::filesystem::path& path, const RealVector& lambda);

std::string certification_json(const CertificationReport& rep);

}  // namespace scenario
}  // namespace qscatter
