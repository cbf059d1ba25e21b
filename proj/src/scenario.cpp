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

#include "qscatter/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qscatter/bases.hpp"
#include "qscatter/channel.hpp"
#include "qscatter/error.hpp"
#include "qscatter/matrix_io.hpp"
#include "qscatter/states.hpp"
#include "qscatter/tomo.hpp"
#include "qscatter/unscramble.hpp"

namespace qscatter {

using nlohmann::json;

namespace {

constexpr std::pair<ScenarioKind, const char*> kKindNames[] = {
    {ScenarioKind::kBaseline, "baseline"},
    {ScenarioKind::kScramble, "scramble"},
    {ScenarioKind::kTomography, "tomography"},
    {ScenarioKind::kUnscrambleCertify, "unscramble-certify"},
    {ScenarioKind::kTwoChannel, "two-channel"},
    {ScenarioKind::kFixtureA1, "fixture-a1"},
};

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::kConfig, msg); }

// Non-finite doubles go out as strings so the document stays valid JSON.
json number(double v) {
    if (std::isfinite(v)) return v;
    return io::format_double(v);
}

double read_number(const json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string() && v.get<std::string>() == "inf") return kNoiseless;
    config_error("config key '" + key + "' must be a number");
}

int read_int(const json& v, const std::string& key) {
    if (!v.is_number_integer()) config_error("config key '" + key + "' must be an integer");
    return v.get<int>();
}

}  // namespace

const char* to_string(ScenarioKind k) {
    for (const auto& [kind, name] : kKindNames) {
        if (kind == k) return name;
    }
    return "unknown";
}

ScenarioKind parse_scenario_kind(const std::string& name) {
    for (const auto& [kind, n] : kKindNames) {
        if (name == n) return kind;
    }
    config_error("unknown scenario '" + name + "'");
}

void ScenarioConfig::validate() const {
    if (d < 2 || !is_prime(d)) config_error("d must be a prime >= 2");
    if (n_modes < d + 1) config_error("n_modes must be at least d + 1");
    if (!(exposure >= 0.0)) config_error("exposure must be >= 0 or inf");
    if (!(dark_rate >= 0.0) || !std::isfinite(dark_rate)) config_error("dark_rate must be >= 0");
    if (!(reference_amplitude > 0.0) || !std::isfinite(reference_amplitude)) {
        config_error("reference_amplitude must be > 0");
    }
    if (n_mc < 0) config_error("n_mc must be >= 0");
    if (min_dent < 0 || min_dent > d) config_error("min_dent must lie in [0, d]");
    try {
        const BasisSpec b = parse_basis_label(tomo_basis);
        if (b.kind == BasisKind::kTilted || b.kind == BasisKind::kCustom) {
            config_error("tomo_basis must be standard or mub:r");
        }
        if (b.kind == BasisKind::kMub && (b.index < 0 || b.index >= d)) {
            config_error("tomo_basis index out of range");
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::kConfig) throw;
        config_error(std::string("tomo_basis: ") + e.what());
    }
}

ScenarioConfig parse_config(const std::string& text, ScenarioConfig cfg) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        config_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) config_error("config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "scenario") {
            if (!v.is_string()) config_error("config key 'scenario' must be a string");
            cfg.scenario = parse_scenario_kind(v.get<std::string>());
        } else if (key == "d") {
            cfg.d = read_int(v, key);
        } else if (key == "n_modes") {
            cfg.n_modes = read_int(v, key);
        } else if (key == "seed") {
            if (!v.is_number_unsigned()) config_error("config key 'seed' must be a non-negative integer");
            cfg.seed = v.get<std::uint64_t>();
        } else if (key == "exposure") {
            cfg.exposure = read_number(v, key);
        } else if (key == "dark_rate") {
            cfg.dark_rate = read_number(v, key);
        } else if (key == "reference_amplitude") {
            cfg.reference_amplitude = read_number(v, key);
        } else if (key == "n_mc") {
            cfg.n_mc = read_int(v, key);
        } else if (key == "min_dent") {
            cfg.min_dent = read_int(v, key);
        } else if (key == "tomo_basis") {
            if (!v.is_string()) config_error("config key 'tomo_basis' must be a string");
            cfg.tomo_basis = v.get<std::string>();
        } else if (key == "fixture_dir") {
            if (!v.is_string()) config_error("config key 'fixture_dir' must be a string");
            cfg.fixture_dir = v.get<std::string>();
        } else {
            config_error("unknown config key '" + key + "'");
        }
    }
    return cfg;
}

namespace {

json config_object(const ScenarioConfig& cfg) {
    json j;
    j["scenario"] = to_string(cfg.scenario);
    j["d"] = cfg.d;
    j["n_modes"] = cfg.n_modes;
    j["seed"] = cfg.seed;
    j["exposure"] = number(cfg.exposure);
    j["dark_rate"] = cfg.dark_rate;
    j["reference_amplitude"] = cfg.reference_amplitude;
    j["n_mc"] = cfg.n_mc;
    j["min_dent"] = cfg.min_dent;
    j["tomo_basis"] = cfg.tomo_basis;
    return j;
}

}  // namespace

std::string config_json(const ScenarioConfig& cfg) { return config_object(cfg).dump(2) + "\n"; }

int exit_status(const ScenarioResult& r) {
    if (r.certification && r.certification->d_ent < r.config.min_dent) {
        return kExitCertificationFailed;
    }
    return kExitOk;
}

namespace scenario {
namespace {

// Seeds and labels for every sampled table, in emission order.
class Runner {
  public:
    explicit Runner(const ScenarioConfig& cfg) : cfg_(cfg) { res_.config = cfg; }

    ScenarioResult take() { return std::move(res_); }

    std::uint64_t channel_seed(std::uint64_t k) const { return derive_seed(cfg_.seed, "channel", k); }

    // Samples a probability table scaled to unit total.
    CountTable sample(const RealMatrix& probs, const std::string& a, const std::string& b) {
        const double total = probs.sum();
        const RealMatrix p = (total > 0.0) ? RealMatrix(probs / total) : probs;
        CountTable t = measure::sample_counts(p, cfg_.exposure, next_seed(), cfg_.dark_rate);
        t.basis_a = a;
        t.basis_b = b;
        return t;
    }

    std::uint64_t next_seed() { return derive_seed(cfg_.seed, "sampling", sampling_index_++); }

    void add_table(const std::string& name, const CountTable& t) { res_.tables.push_back({name, t}); }
    void add_matrix(const std::string& name, const ComplexMatrix& m) { res_.matrices.push_back({name, m}); }
    void metric(const std::string& name, double v) { res_.metrics[name] = v; }
    void note(const std::string& s) { res_.notes.push_back(s); }

    void certify(const CertificationInputs& in, const TargetState& target) {
        certify::Options opt;
        opt.n_mc = cfg_.n_mc;
        opt.seed = derive_seed(cfg_.seed, "mc");
        res_.target = target;
        res_.certification = certify::dimensionality(in, target, opt);
        if (res_.certification->fell_back) note("incomplete basis set: two-basis bound reported");
    }

    const ScenarioConfig& cfg() const { return cfg_; }

  private:
    ScenarioConfig cfg_;
    ScenarioResult res_;
    std::uint64_t sampling_index_ = 0;
};

// Standard plus all d MUB tables of a state; the local measurements only.
void measure_mub_set(Runner& run, const BipartiteState& state) {
    const int d = run.cfg().d;
    CertificationInputs in;
    const BasisFamily s = bases::standard(d);
    in.standard = run.sample(measure::probability_table(state, s), s.label(), s.label() + "*");
    run.add_table("standard", in.standard);
    for (int r = 0; r < d; ++r) {
        const BasisFamily m = bases::mub(d, r);
        CountTable t = run.sample(measure::probability_table(state, m), m.label(), m.label() + "*");
        run.add_table("mub_" + std::to_string(r), t);
        in.rotated.emplace(r, std::move(t));
    }
    run.certify(in, TargetState::max_entangled(d));
}

BipartiteState extended_source(const ScenarioConfig& cfg) {
    ComplexMatrix c = ComplexMatrix::Identity(cfg.d + 1, cfg.d + 1);
    c(0, 0) = cfg.reference_amplitude;
    return BipartiteState(c).normalized();
}

BasisFamily tomo_family(const ScenarioConfig& cfg) {
    const BasisSpec b = parse_basis_label(cfg.tomo_basis);
    return b.kind == BasisKind::kMub ? bases::mub(cfg.d, b.index) : bases::standard(cfg.d);
}

// Phase-step scans on the extended post-medium state and reconstruction.
EffectiveT run_tomography(Runner& run, const BipartiteState& post, const ComplexMatrix& t_true) {
    const BasisFamily basis = tomo_family(run.cfg());
    const PhaseStepScan s = measure::phase_step_scan_s(post, basis, run.cfg().exposure,
                                                       run.next_seed(), run.cfg().dark_rate);
    const PhaseStepScan e = measure::phase_step_scan_e(post, basis, run.cfg().exposure,
                                                       run.next_seed(), run.cfg().dark_rate);
    for (const auto& rec : s) run.add_table("scan_s_step" + std::to_string(rec.step), rec.table);
    for (const auto& rec : e) run.add_table("scan_e_step" + std::to_string(rec.step), rec.table);
    const EffectiveT t_hat = tomo::reconstruct(s, e, basis);
    const EMatrix e_mat = tomo::extract_e(e);
    const TomographyReport rep = tomo::report(t_hat, e_mat);
    const ComplexMatrix truth = bases::rotate_matrix(t_true, basis);
    run.add_matrix("t_true_" + basis.label(), tomo::gauge_fix(truth));
    run.add_matrix("t_hat_" + basis.label(), t_hat.matrix);
    run.metric("tomography_dist", numerics::dist_up_to_scalar(t_hat.matrix, truth));
    run.metric("tomography_condition_number", rep.condition_number);
    run.metric("tomography_e_min_over_max", rep.e_min_over_max);
    return t_hat;
}

// Unscrambling with W and the tilted V(r), then certification against the
// lambda estimated from the standard table.
void run_unscramble(Runner& run, const BipartiteState& pixels, const EffectiveT& t_hat) {
    const int d = run.cfg().d;
    const UnscrambleOperators w = unscramble::build_w(t_hat);
    run.add_matrix("w_alice", w.alice());
    run.add_matrix("w_bob", w.bob);
    run.metric("unscrambler_condition_number", w.condition_number);
    const RealVector eta_lambda = w.eta.cwiseInverse().normalized();
    for (int i = 0; i < d; ++i) run.metric("eta_" + std::to_string(i), w.eta(i));
    for (int i = 0; i < d; ++i) run.metric("eta_lambda_" + std::to_string(i), eta_lambda(i));

    CertificationInputs in;
    in.standard = run.sample(unscramble::physical_probabilities(pixels, w), "unscrambled:standard",
                             "standard*");
    in.standard.zeta_corrected = true;
    run.add_table("standard", in.standard);
    const TargetState target = certify::estimate_lambda(in.standard);
    for (int r = 0; r < d; ++r) {
        const VOperator v = unscramble::build_v(w, bases::tilted(d, r, target.lambda));
        CountTable t = run.sample(unscramble::physical_probabilities(pixels, v),
                                  "unscrambled:" + v.basis.label(), v.basis.label() + "*");
        t = unscramble::correct_zeta(t, v.zeta);
        run.add_table("tilted_" + std::to_string(r), t);
        in.rotated.emplace(r, std::move(t));
    }
    run.certify(in, target);
}

BipartiteState pixel_block(const BipartiteState& extended, int d) {
    return BipartiteState(extended.coeffs().bottomRightCorner(d, d)).normalized();
}

void baseline(Runner& run) { measure_mub_set(run, states::max_entangled(run.cfg().d)); }

void scramble(Runner& run) {
    const ChannelModel ch =
        channel::random_channel(run.cfg().n_modes, run.cfg().d, run.channel_seed(0));
    const BipartiteState choi = channel::choi_state(channel::effective_t(ch, false));
    run.metric("postselection_probability", choi.norm_sq());
    measure_mub_set(run, choi.normalized());
}

struct Medium {
    BipartiteState post;     // extended, renormalized
    ComplexMatrix t_pixels;  // true logical block
};

Medium haar_medium(Runner& run) {
    const ChannelModel ch =
        channel::random_channel(run.cfg().n_modes, run.cfg().d, run.channel_seed(0));
    const EffectiveT ext = channel::effective_t(ch, true);
    const BipartiteState raw =
        states::apply_one_sided(extended_source(run.cfg()), std::nullopt, ext.matrix);
    run.metric("postselection_probability", raw.norm_sq());
    return Medium{raw.normalized(), channel::effective_t(ch, false).matrix};
}

void tomography(Runner& run) {
    const Medium m = haar_medium(run);
    run_tomography(run, m.post, m.t_pixels);
}

void unscramble_certify(Runner& run) {
    const Medium m = haar_medium(run);
    const EffectiveT t_hat = run_tomography(run, m.post, m.t_pixels);
    run_unscramble(run, pixel_block(m.post, run.cfg().d), t_hat);
}

void two_channel(Runner& run) {
    const int n = run.cfg().d + 1;
    const ComplexMatrix u_a = numerics::haar_unitary(n, run.channel_seed(0));
    const ComplexMatrix u_b = numerics::haar_unitary(n, run.channel_seed(1));
    const EffectiveT t = channel::compose_two_channels(u_a, u_b);
    const BipartiteState src = extended_source(run.cfg());
    const BipartiteState both = states::apply_one_sided(src, u_a, u_b);
    const BipartiteState one_sided = states::apply_one_sided(src, std::nullopt, t.matrix);
    run.metric("ricochet_residual", numerics::max_abs_diff(both.coeffs(), one_sided.coeffs()));
    if (run.cfg().reference_amplitude != 1.0) {
        run.note("reference_amplitude != 1: the two-sided state differs from the one-sided form");
    }
    const ComplexMatrix t_pixels = t.matrix.bottomRightCorner(n - 1, n - 1);
    const BipartiteState post = both.normalized();
    const EffectiveT t_hat = run_tomography(run, post, t_pixels);
    run_unscramble(run, pixel_block(post, run.cfg().d), t_hat);
}

void fixture_a1(Runner& run) {
    if (run.cfg().d != 7) config_error("fixture-a1 requires d = 7");
    const ComplexMatrix tm0 = load_fixture_tm0(run.cfg().fixture_dir);
    const RealVector raw_lambda = load_fixture_lambda(run.cfg().fixture_dir);
    const BasisFamily m0 = bases::mub(7, 0);
    const EffectiveT tagged{tm0, false, BasisTag{m0.label(), m0.transform()}};
    const ComplexMatrix t = bases::unrotate_matrix(tm0, m0);
    const BipartiteState post = channel::choi_state(EffectiveT{t, false, std::nullopt}).normalized();
    const UnscrambleOperators w = unscramble::build_w(tagged);
    const TargetState target = TargetState::from_amplitudes(raw_lambda);

    run.add_matrix("t_m0", tm0);
    run.add_matrix("w_alice", w.alice());
    run.metric("unscrambler_condition_number", w.condition_number);
    for (int i = 0; i < 7; ++i) run.metric("eta_" + std::to_string(i), w.eta(i));
    run.metric("fixture_lambda_norm_sq", raw_lambda.squaredNorm());
    const TargetState unnormalized{raw_lambda};
    run.metric("b5_fixture_as_printed", certify::bounds(unnormalized)(4));

    CertificationInputs in;
    in.standard = unscramble::predict_table(post, w);
    run.add_table("standard", in.standard);
    for (int r = 0; r < 7; ++r) {
        const VOperator v = unscramble::build_v(w, bases::tilted(7, r, target.lambda));
        run.metric("zeta_max_" + std::to_string(r), v.zeta.maxCoeff());
        CountTable tab = unscramble::predict_table(post, w, v);
        run.add_table("tilted_" + std::to_string(r), tab);
        in.rotated.emplace(r, std::move(tab));
    }
    run.certify(in, target);
}

}  // namespace

ScenarioResult run(const ScenarioConfig& cfg) {
    cfg.validate();
    Runner r(cfg);
    try {
        switch (cfg.scenario) {
            case ScenarioKind::kBaseline: baseline(r); break;
            case ScenarioKind::kScramble: scramble(r); break;
            case ScenarioKind::kTomography: tomography(r); break;
            case ScenarioKind::kUnscrambleCertify: unscramble_certify(r); break;
            case ScenarioKind::kTwoChannel: two_channel(r); break;
            case ScenarioKind::kFixtureA1: fixture_a1(r); break;
        }
    } catch (const Error& e) {
        throw Error(e.code(), std::string(to_string(cfg.scenario)) + ": " + e.what());
    }
    return r.take();
}

namespace {

json certification_object(const CertificationReport& rep) {
    json j;
    j["fidelity"] = number(rep.fidelity);
    j["sigma"] = number(rep.fidelity_sigma);
    j["fidelity_minus_3sigma"] = number(rep.fidelity - 3.0 * rep.fidelity_sigma);
    j["fidelity_plus_3sigma"] = number(rep.fidelity + 3.0 * rep.fidelity_sigma);
    j["bounds"] = json::array();
    for (Eigen::Index k = 0; k < rep.bounds.size(); ++k) j["bounds"].push_back(rep.bounds(k));
    j["d_ent"] = rep.d_ent;
    j["method"] = to_string(rep.method);
    j["n_mc"] = rep.n_mc;
    j["robust_3sigma"] = rep.robust_3sigma;
    j["fell_back"] = rep.fell_back;
    j["two_basis_lower_bound"] = number(rep.lower_bound);
    return j;
}

json table_object(const NamedTable& nt) {
    const CountTable& t = nt.table;
    json j;
    j["name"] = nt.name;
    j["file"] = "tables/" + nt.name + ".csv";
    j["basis_a"] = t.basis_a;
    j["basis_b"] = t.basis_b;
    j["exposure"] = number(t.exposure);
    j["seed"] = t.seed;
    j["zeta_corrected"] = t.zeta_corrected;
    j["counts"] = json::array();
    for (Eigen::Index a = 0; a < t.values.rows(); ++a) {
        json row = json::array();
        for (Eigen::Index b = 0; b < t.values.cols(); ++b) row.push_back(t.values(a, b));
        j["counts"].push_back(std::move(row));
    }
    return j;
}

}  // namespace

std::string certification_json(const CertificationReport& rep) {
    return certification_object(rep).dump(2) + "\n";
}

std::string report_json(const ScenarioResult& r) {
    json j;
    j["schema"] = "report_v1";
    j["scenario"] = to_string(r.config.scenario);
    j["config"] = config_object(r.config);
    j["metrics"] = json::object();
    for (const auto& [k, v] : r.metrics) j["metrics"][k] = number(v);
    if (r.target) {
        j["target_lambda"] = json::array();
        for (Eigen::Index i = 0; i < r.target->dim(); ++i) j["target_lambda"].push_back(r.target->lambda(i));
    }
    j["certification"] = r.certification ? certification_object(*r.certification) : json();
    j["exit_status"] = exit_status(r);
    j["tables"] = json::array();
    for (const auto& t : r.tables) j["tables"].push_back(table_object(t));
    j["matrices"] = json::array();
    for (const auto& m : r.matrices) {
        j["matrices"].push_back({{"name", m.name}, {"file", "matrices/" + m.name + ".csv"}});
    }
    j["notes"] = r.notes;
    return j.dump(2) + "\n";
}

void emit_report(const ScenarioResult& r, const std::filesystem::path& out) {
    for (const auto& t : r.tables) io::write_count_table(out / "tables" / (t.name + ".csv"), t.table);
    for (const auto& m : r.matrices) io::write_matrix_csv(out / "matrices" / (m.name + ".csv"), m.matrix);
    io::write_text(out / "report.json", report_json(r));
}

ComplexMatrix load_fixture_tm0(const std::string& dir) {
    return io::read_matrix_csv(std::filesystem::path(dir) / "table_a1_tm0.csv");
}

RealVector load_fixture_lambda(const std::string& dir) {
    return read_lambda_json(std::filesystem::path(dir) / "table_a2_lambda.json");
}

RealVector read_lambda_json(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(io::read_text(path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kIo, path.string() + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("lambda") || !j["lambda"].is_array()) {
        throw Error(ErrorCode::kIo, path.string() + ": expected {\"lambda\": [...]}");
    }
    const auto& a = j["lambda"];
    RealVector l(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) throw Error(ErrorCode::kIo, path.string() + ": non-numeric lambda");
        l(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    }
    return l;
}

void write_lambda_json(const std::filesystem::path& path, const RealVector& lambda) {
    json j;
    j["lambda"] = json::array();
    for (Eigen::Index i = 0; i < lambda.size(); ++i) j["lambda"].push_back(lambda(i));
    io::write_text(path, j.dump(2) + "\n");
}

}  // namespace scenario
}  // namespace qscatter
