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

#include <filesystem>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "qscatter/matrix_io.hpp"
#include "qscatter/scenario.hpp"
#include "test_util.hpp"

namespace qscatter {
namespace {

namespace fs = std::filesystem;

ScenarioConfig config(ScenarioKind kind, int d = 7) {
    ScenarioConfig c;
    c.scenario = kind;
    c.d = d;
    c.n_mc = 50;
    return c;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("qscatter_test_" + name);
    fs::remove_all(p);
    return p;
}

TEST(Scenario, BaselineIsPerfect) {
    const ScenarioResult r = scenario::run(config(ScenarioKind::kBaseline));
    EXPECT_EQ(r.tables.size(), 8u);
    ASSERT_TRUE(r.certification.has_value());
    EXPECT_NEAR(r.certification->fidelity, 1.0, 1e-12);
    EXPECT_EQ(r.certification->d_ent, 7);
    EXPECT_EQ(exit_status(r), kExitOk);
}

TEST(Scenario, ScrambleLosesCorrelations) {
    const ScenarioResult r = scenario::run(config(ScenarioKind::kScramble));
    ASSERT_TRUE(r.certification.has_value());
    EXPECT_LT(r.certification->fidelity, 1.0 / 7.0);
    EXPECT_LT(r.certification->d_ent, 2);
    EXPECT_EQ(exit_status(r), kExitCertificationFailed);
}

TEST(Scenario, NoiselessUnscrambleRestoresFullDimension) {
    for (auto kind : {ScenarioKind::kUnscrambleCertify, ScenarioKind::kTwoChannel}) {
        for (std::uint64_t seed : {0u, 1u, 2u}) {
            ScenarioConfig c = config(kind);
            c.seed = seed;
            const ScenarioResult r = scenario::run(c);
            ASSERT_TRUE(r.certification.has_value());
            EXPECT_NEAR(r.certification->fidelity, 1.0, 1e-8) << to_string(kind) << " seed " << seed;
            EXPECT_EQ(r.certification->d_ent, 7);
            EXPECT_LE(r.metrics.at("tomography_dist"), 1e-9);
        }
    }
}

TEST(Scenario, TwoChannelRicochetMatches) {
    const ScenarioResult r = scenario::run(config(ScenarioKind::kTwoChannel, 5));
    EXPECT_LE(r.metrics.at("ricochet_residual"), 1e-12);
    EXPECT_TRUE(r.notes.empty());
}

TEST(Scenario, TomographyOnly) {
    const ScenarioResult r = scenario::run(config(ScenarioKind::kTomography, 3));
    EXPECT_FALSE(r.certification.has_value());
    EXPECT_EQ(r.tables.size(), 8u);
    EXPECT_LE(r.metrics.at("tomography_dist"), 1e-10);
    EXPECT_EQ(exit_status(r), kExitOk);
}

TEST(Scenario, FixtureA1) {
    const ScenarioResult r = scenario::run(config(ScenarioKind::kFixtureA1));
    ASSERT_TRUE(r.certification.has_value());
    EXPECT_NEAR(r.certification->bounds(4), 0.8169, 1e-4);
    EXPECT_NEAR(r.metrics.at("b5_fixture_as_printed"), 0.8169, 1e-4);
    EXPECT_GT(r.certification->fidelity, r.certification->bounds(5));
    EXPECT_EQ(r.certification->d_ent, 7);
    EXPECT_ERROR_CODE(scenario::run(config(ScenarioKind::kFixtureA1, 5)), ErrorCode::kConfig);
}

TEST(Scenario, NoisyRunReportsSigma) {
    ScenarioConfig c = config(ScenarioKind::kUnscrambleCertify, 3);
    c.exposure = 1e5;
    const ScenarioResult r = scenario::run(c);
    ASSERT_TRUE(r.certification.has_value());
    EXPECT_GT(r.certification->fidelity_sigma, 0.0);
    EXPECT_EQ(r.certification->n_mc, 50);
    for (const auto& t : r.tables) EXPECT_EQ(t.table.exposure, 1e5) << t.name;
}

TEST(Scenario, DeterministicReport) {
    ScenarioConfig c = config(ScenarioKind::kUnscrambleCertify, 5);
    c.exposure = 1e4;
    c.seed = 9;
    const std::string a = scenario::report_json(scenario::run(c));
    const std::string b = scenario::report_json(scenario::run(c));
    EXPECT_EQ(a, b);
    c.seed = 10;
    EXPECT_NE(a, scenario::report_json(scenario::run(c)));
}

TEST(Scenario, EmitReportRoundTrip) {
    ScenarioConfig c = config(ScenarioKind::kBaseline, 3);
    c.exposure = 1e3;
    const ScenarioResult r = scenario::run(c);
    const fs::path out = scratch("emit");
    scenario::emit_report(r, out);
    const auto j = nlohmann::json::parse(io::read_text(out / "report.json"));
    EXPECT_EQ(j.at("schema"), "report_v1");
    EXPECT_EQ(j.at("scenario"), "baseline");
    EXPECT_EQ(j.at("config").at("exposure").get<double>(), 1e3);
    EXPECT_EQ(j.at("certification").at("d_ent").get<int>(), r.certification->d_ent);
    EXPECT_EQ(j.at("exit_status").get<int>(), exit_status(r));
    ASSERT_EQ(j.at("tables").size(), r.tables.size());
    for (std::size_t i = 0; i < r.tables.size(); ++i) {
        const CountTable back = io::read_count_table(out / j["tables"][i].at("file").get<std::string>());
        EXPECT_EQ(back.values, r.tables[i].table.values);
        EXPECT_EQ(back.basis_a, r.tables[i].table.basis_a);
        EXPECT_EQ(back.seed, r.tables[i].table.seed);
    }
    fs::remove_all(out);
}

TEST(Scenario, NoiselessReportWritesInf) {
    const auto j = nlohmann::json::parse(scenario::report_json(scenario::run(config(ScenarioKind::kBaseline, 2))));
    EXPECT_EQ(j.at("config").at("exposure"), "inf");
    EXPECT_EQ(j.at("tables")[0].at("exposure"), "inf");
}

TEST(Config, ParseAndValidate) {
    const ScenarioConfig c = parse_config(
        R"({"scenario": "two-channel", "d": 5, "seed": 3, "exposure": "inf", "n_mc": 10})");
    EXPECT_EQ(c.scenario, ScenarioKind::kTwoChannel);
    EXPECT_EQ(c.d, 5);
    EXPECT_EQ(c.seed, 3u);
    EXPECT_EQ(c.exposure, kNoiseless);
    EXPECT_EQ(c.n_modes, 60);

    const ScenarioConfig back = parse_config(config_json(c));
    EXPECT_EQ(config_json(back), config_json(c));

    EXPECT_ERROR_CODE(parse_config("{\"bogus\": 1}"), ErrorCode::kConfig);
    EXPECT_ERROR_CODE(parse_config("not json"), ErrorCode::kConfig);
    EXPECT_ERROR_CODE(parse_config("[1, 2]"), ErrorCode::kConfig);
    EXPECT_ERROR_CODE(parse_config("{\"d\": \"seven\"}"), ErrorCode::kConfig);
    EXPECT_ERROR_CODE(parse_config("{\"seed\": -1}"), ErrorCode::kConfig);
    EXPECT_ERROR_CODE(parse_config("{\"scenario\": \"nope\"}"), ErrorCode::kConfig);
}

TEST(Config, ValidateRejectsBadValues) {
    const auto bad = [](auto mutate) {
        ScenarioConfig c;
        mutate(c);
        EXPECT_ERROR_CODE(c.validate(), ErrorCode::kConfig);
    };
    bad([](ScenarioConfig& c) { c.d = 1; });
    bad([](ScenarioConfig& c) { c.n_modes = 3; });
    bad([](ScenarioConfig& c) { c.exposure = -1.0; });
    bad([](ScenarioConfig& c) { c.dark_rate = -0.5; });
    bad([](ScenarioConfig& c) { c.n_mc = -1; });
    bad([](ScenarioConfig& c) { c.tomo_basis = "fourier"; });
    EXPECT_NO_THROW(ScenarioConfig{}.validate());
}

TEST(Config, ScenarioNames) {
    for (auto k : {ScenarioKind::kBaseline, ScenarioKind::kScramble, ScenarioKind::kTomography,
                   ScenarioKind::kUnscrambleCertify, ScenarioKind::kTwoChannel, ScenarioKind::kFixtureA1}) {
        EXPECT_EQ(parse_scenario_kind(to_string(k)), k);
    }
}

TEST(LambdaJson, RoundTripAndErrors) {
    const fs::path dir = scratch("lambda");
    fs::create_directories(dir);
    RealVector l(3);
    l << 0.1, 0.25, 1.0 / 3.0;
    scenario::write_lambda_json(dir / "l.json", l);
    EXPECT_EQ(scenario::read_lambda_json(dir / "l.json"), l);
    io::write_text(dir / "bad.json", "{\"lam\": []}");
    EXPECT_ERROR_CODE(scenario::read_lambda_json(dir / "bad.json"), ErrorCode::kIo);
    EXPECT_ERROR_CODE(scenario::read_lambda_json(dir / "missing.json"), ErrorCode::kIo);
    fs::remove_all(dir);
}

}  // namespace
}  // namespace qscatter
