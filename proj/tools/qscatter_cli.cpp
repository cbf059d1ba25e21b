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

// qscatter: batch driver for the simulation, tomography, unscrambling and
// certification pipeline.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qscatter/bases.hpp"
#include "qscatter/certify.hpp"
#include "qscatter/channel.hpp"
#include "qscatter/error.hpp"
#include "qscatter/matrix_io.hpp"
#include "qscatter/measure.hpp"
#include "qscatter/scenario.hpp"
#include "qscatter/states.hpp"
#include "qscatter/tomo.hpp"
#include "qscatter/unscramble.hpp"

namespace fs = std::filesystem;
using namespace qscatter;
using nlohmann::json;

namespace {

struct Flags {
    std::string config;
    std::string out = "qscatter_out";
    std::optional<std::string> scenario;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> exposure;
    std::optional<double> dark_rate;
    std::optional<double> reference_amplitude;
    std::optional<int> d;
    std::optional<int> n_modes;
    std::optional<int> n_mc;
    std::optional<int> min_dent;
    std::optional<std::string> basis;
};

double parse_exposure(const std::string& s) {
    if (s == "inf") return kNoiseless;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::kConfig, "--exposure must be a number or 'inf'");
    }
}

// Config file first, then every flag that was given.
ScenarioConfig resolve(const Flags& f) {
    ScenarioConfig cfg;
    if (!f.config.empty()) {
        std::string text;
        try {
            text = io::read_text(f.config);
        } catch (const Error& e) {
            throw Error(ErrorCode::kConfig, e.what());
        }
        cfg = parse_config(text, cfg);
    }
    if (f.scenario) cfg.scenario = parse_scenario_kind(*f.scenario);
    if (f.seed) cfg.seed = *f.seed;
    if (f.exposure) cfg.exposure = parse_exposure(*f.exposure);
    if (f.dark_rate) cfg.dark_rate = *f.dark_rate;
    if (f.reference_amplitude) cfg.reference_amplitude = *f.reference_amplitude;
    if (f.d) cfg.d = *f.d;
    if (f.n_modes) cfg.n_modes = *f.n_modes;
    if (f.n_mc) cfg.n_mc = *f.n_mc;
    if (f.min_dent) cfg.min_dent = *f.min_dent;
    if (f.basis) cfg.tomo_basis = *f.basis;
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* app, Flags& f) {
    app->add_option("--config", f.config, "Flat-key JSON config; flags override it");
    app->add_option("--seed", f.seed, "Root seed");
    app->add_option("--out", f.out, "Output directory");
    app->add_option("--exposure", f.exposure, "Expected counts per table, or 'inf'");
    app->add_option("--dark-rate", f.dark_rate, "Background counts added to every cell");
    app->add_option("--n-mc", f.n_mc, "Monte-Carlo resamples");
    app->add_option("--min-dent", f.min_dent, "Exit 4 when d_ent falls below this");
}

void add_model(CLI::App* app, Flags& f) {
    app->add_option("--d", f.d, "Logical dimension (prime)");
    app->add_option("--n-modes", f.n_modes, "Total fibre modes");
    app->add_option("--reference-amplitude", f.reference_amplitude, "Source amplitude of the reference mode");
}

BasisFamily family_for(const std::string& label, int d, const std::optional<RealVector>& lambda) {
    const BasisSpec b = parse_basis_label(label);
    switch (b.kind) {
        case BasisKind::kStandard: return bases::standard(d);
        case BasisKind::kMub: return bases::mub(d, b.index);
        case BasisKind::kTilted:
            if (!lambda) throw Error(ErrorCode::kConfig, "tilted bases need --lambda");
            return bases::tilted(d, b.index, *lambda);
        case BasisKind::kCustom: break;
    }
    throw Error(ErrorCode::kConfig, "unsupported basis '" + label + "'");
}

int cmd_simulate(const Flags& f) {
    const ScenarioConfig cfg = resolve(f);
    const fs::path out = f.out;
    const ChannelModel ch = channel::random_channel(cfg.n_modes, cfg.d, derive_seed(cfg.seed, "channel", 0));
    channel::save_channel(ch, out / "channel" / "unitary.csv", out / "channel" / "embedding.json");
    const ComplexMatrix t = channel::effective_t(ch, false).matrix;
    io::write_matrix_csv(out / "t_true.csv", t);

    ComplexMatrix src = ComplexMatrix::Identity(cfg.d + 1, cfg.d + 1);
    src(0, 0) = cfg.reference_amplitude;
    const BipartiteState post = states::apply_one_sided(BipartiteState(src).normalized(), std::nullopt,
                                                        channel::effective_t(ch, true).matrix)
                                    .normalized();
    const BasisFamily basis = family_for(cfg.tomo_basis, cfg.d, std::nullopt);
    io::ScanBundle bundle;
    bundle.basis_label = basis.label();
    bundle.s_scan = measure::phase_step_scan_s(post, basis, cfg.exposure,
                                               derive_seed(cfg.seed, "sampling", 0), cfg.dark_rate);
    bundle.e_scan = measure::phase_step_scan_e(post, basis, cfg.exposure,
                                               derive_seed(cfg.seed, "sampling", 1), cfg.dark_rate);
    io::write_scan_bundle(out / "scans", bundle);
    io::write_matrix_csv(out / ("t_true_" + basis.label() + ".csv"), bases::rotate_matrix(t, basis));

    const BipartiteState pixels(post.coeffs().bottomRightCorner(cfg.d, cfg.d));
    const RealMatrix p = measure::probability_table(pixels.normalized(), basis);
    CountTable table = measure::sample_counts(p / p.sum(), cfg.exposure,
                                              derive_seed(cfg.seed, "sampling", 2), cfg.dark_rate);
    table.basis_a = basis.label();
    table.basis_b = basis.label() + "*";
    io::write_count_table(out / "scrambled_table.csv", table);
    io::write_text(out / "config.json", config_json(cfg));
    return 0;
}

int cmd_tomo(const std::string& in, const std::string& out) {
    const io::ScanBundle bundle = io::read_scan_bundle(in);
    const Eigen::Index d = bundle.s_scan[0].table.dim_a();
    const BasisFamily basis = family_for(bundle.basis_label, static_cast<int>(d), std::nullopt);
    const EffectiveT t = tomo::reconstruct(bundle.s_scan, bundle.e_scan, basis);
    const TomographyReport rep = tomo::report(t, tomo::extract_e(bundle.e_scan));
    io::write_matrix_csv(fs::path(out) / "t_hat.csv", t.matrix);
    json j;
    j["gauge"] = "unit_frobenius_first_nonzero_real_positive";
    j["basis_tag"] = t.tag ? t.tag->label : "standard";
    j["condition_number"] = rep.condition_number;
    j["e_min_over_max"] = rep.e_min_over_max;
    io::write_text(fs::path(out) / "tomo.json", j.dump(2) + "\n");
    return 0;
}

int cmd_unscramble(const std::string& t_path, const std::string& tag, const std::string& lambda_path,
                   const std::string& out) {
    const ComplexMatrix t_m = io::read_matrix_csv(t_path);
    const int d = static_cast<int>(t_m.rows());
    const BasisFamily tag_basis = family_for(tag, d, std::nullopt);
    EffectiveT tagged{t_m, false, std::nullopt};
    if (tag_basis.kind != BasisKind::kStandard) {
        tagged.tag = BasisTag{tag_basis.label(), tag_basis.transform()};
    }
    std::optional<RealVector> lambda;
    if (!lambda_path.empty()) lambda = TargetState::from_amplitudes(scenario::read_lambda_json(lambda_path)).lambda;

    const UnscrambleOperators w = unscramble::build_w(tagged);
    const ComplexMatrix t = bases::unrotate_matrix(t_m, tag_basis);
    const BipartiteState post = channel::choi_state(EffectiveT{t, false, std::nullopt}).normalized();
    const fs::path o = out;
    io::write_matrix_csv(o / "w_alice.csv", w.alice());
    io::write_matrix_csv(o / "w_bob.csv", w.bob);
    io::write_count_table(o / "predicted_standard.csv", unscramble::predict_table(post, w));
    json j;
    j["condition_number"] = w.condition_number;
    j["eta"] = std::vector<double>(w.eta.data(), w.eta.data() + w.eta.size());
    j["bases"] = json::array();
    for (int r = 0; r < d; ++r) {
        const BasisFamily b = lambda ? bases::tilted(d, r, *lambda) : bases::mub(d, r);
        const VOperator v = unscramble::build_v(w, b);
        const std::string stem = lambda ? "tilted_" + std::to_string(r) : "mub_" + std::to_string(r);
        io::write_matrix_csv(o / ("v_alice_" + stem + ".csv"), v.alice);
        io::write_matrix_csv(o / ("v_bob_" + stem + ".csv"), v.bob);
        io::write_count_table(o / ("predicted_" + stem + ".csv"), unscramble::predict_table(post, w, v));
        j["bases"].push_back({{"basis", b.label()},
                              {"zeta", std::vector<double>(v.zeta.data(), v.zeta.data() + v.zeta.size())}});
    }
    io::write_text(o / "unscramble.json", j.dump(2) + "\n");
    return 0;
}

// Basis index from a label such as "mub:3" or "unscrambled:tilted:3".
int rotated_index(const CountTable& t, const std::string& path) {
    static const std::regex re(R"((mub|tilted):(\d+)$)");
    std::smatch m;
    if (!std::regex_search(t.basis_a, m, re)) {
        throw Error(ErrorCode::kConfig, path + ": basis label '" + t.basis_a + "' names no rotated basis");
    }
    return std::stoi(m[2]);
}

int cmd_certify(const Flags& f, const std::string& standard_path, const std::vector<std::string>& rotated,
                const std::string& lambda_path, const std::string& method) {
    CertificationInputs in;
    in.standard = io::read_count_table(standard_path);
    for (const auto& p : rotated) {
        CountTable t = io::read_count_table(p);
        const int r = rotated_index(t, p);
        if (!in.rotated.emplace(r, std::move(t)).second) {
            throw Error(ErrorCode::kConfig, "two tables given for basis r = " + std::to_string(r));
        }
    }
    const TargetState target = lambda_path.empty()
                                   ? certify::estimate_lambda(in.standard)
                                   : TargetState::from_amplitudes(scenario::read_lambda_json(lambda_path));
    certify::Options opt;
    opt.method = (method == "two-basis") ? FidelityMethod::kTwoBasisLowerBound : FidelityMethod::kAllBasesExact;
    opt.second_basis = in.rotated.empty() ? 0 : in.rotated.begin()->first;
    opt.n_mc = f.n_mc.value_or(1000);
    opt.seed = derive_seed(f.seed.value_or(0), "mc");
    const CertificationReport rep = certify::dimensionality(in, target, opt);
    io::write_text(fs::path(f.out) / "certification.json", scenario::certification_json(rep));
    std::printf("fidelity %.6f +- %.6f (3 sigma %.6f), d_ent %d, method %s\n", rep.fidelity,
                rep.fidelity_sigma, 3.0 * rep.fidelity_sigma, rep.d_ent, to_string(rep.method));
    return rep.d_ent < f.min_dent.value_or(2) ? kExitCertificationFailed : kExitOk;
}

int cmd_run(const Flags& f) {
    const ScenarioConfig cfg = resolve(f);
    const ScenarioResult res = scenario::run(cfg);
    scenario::emit_report(res, f.out);
    if (res.certification) {
        const auto& c = *res.certification;
        std::printf("%s: fidelity %.6f +- %.6f, d_ent %d (%s)\n", to_string(cfg.scenario), c.fidelity,
                    c.fidelity_sigma, c.d_ent, to_string(c.method));
    } else {
        std::printf("%s: done\n", to_string(cfg.scenario));
    }
    return exit_status(res);
}

int exit_code_for(ErrorCode c) {
    switch (c) {
        case ErrorCode::kConfig:
            return kExitConfig;
        case ErrorCode::kIllConditioned:
        case ErrorCode::kSingular:
        case ErrorCode::kDegenerateReference:
            return kExitConditioning;
        default:
            return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entanglement transport through scattering media: simulate, reconstruct, unscramble, certify"};
    app.require_subcommand(1);
    Flags f;

    auto* sim = app.add_subcommand("simulate", "Random channel, phase-step scans and a scrambled table");
    add_common(sim, f);
    add_model(sim, f);
    sim->add_option("--basis", f.basis, "Scan basis: standard or mub:r");

    std::string scan_dir;
    auto* tomo_cmd = app.add_subcommand("tomo", "Reconstruct T from a phase-step scan bundle");
    tomo_cmd->add_option("--in", scan_dir, "Scan bundle directory")->required();
    tomo_cmd->add_option("--out", f.out, "Output directory");

    std::string t_path, tag = "mub:0", lambda_path;
    auto* un = app.add_subcommand("unscramble", "Build W and V operators and predicted tables");
    un->add_option("--t", t_path, "Reconstructed T CSV")->required();
    un->add_option("--basis", tag, "Basis the T matrix was measured in")->capture_default_str();
    un->add_option("--lambda", lambda_path, "Target amplitudes JSON; selects tilted bases");
    un->add_option("--out", f.out, "Output directory");

    std::string standard_path, method = "exact";
    std::vector<std::string> rotated;
    auto* cert = app.add_subcommand("certify", "Fidelity and entanglement dimensionality from tables");
    add_common(cert, f);
    cert->add_option("--standard", standard_path, "Standard-basis count table")->required();
    cert->add_option("--rotated", rotated, "Rotated-basis count tables")->required();
    cert->add_option("--lambda", lambda_path, "Target amplitudes JSON (default: estimated)");
    cert->add_option("--method", method, "exact or two-basis")
        ->check(CLI::IsMember({"exact", "two-basis"}))
        ->capture_default_str();

    auto* run = app.add_subcommand("run", "Run a full scenario and write a report");
    add_common(run, f);
    add_model(run, f);
    run->add_option("--scenario", f.scenario,
                    "baseline | scramble | tomography | unscramble-certify | two-channel | fixture-a1");
    run->add_option("--basis", f.basis, "Tomography basis: standard or mub:r");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*sim) return cmd_simulate(f);
        if (*tomo_cmd) return cmd_tomo(scan_dir, f.out);
        if (*un) return cmd_unscramble(t_path, tag, lambda_path, f.out);
        if (*cert) return cmd_certify(f, standard_path, rotated, lambda_path, method);
        if (*run) return cmd_run(f);
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
