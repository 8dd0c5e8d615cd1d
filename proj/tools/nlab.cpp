// Copyright 2026 The nlab Authors
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

// nlab command-line front end.
//
// Exit codes: 0 success, 1 parse error, 2 validation error, 3 relation failure.

#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>

#include "CLI11.hpp"
#include "nlab/nlab.hpp"

namespace {

using namespace nlab;

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitRelation = 3;

void emit(const std::string &out_path, const std::string &text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        write_text_file(out_path, text);
    }
}

bool ends_with(const std::string &s, const std::string &suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", x);
    return buf;
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string &path) {
    const TypedObject obj = object_from_json(read_json_file(path));
    std::ostringstream os;
    os << "valid " << type_name(obj);
    std::visit(
        [&os](const auto &o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, DensityMatrix>) {
                os << " dim=" << o.dim() << " purity=" << o.purity();
            } else if constexpr (std::is_same_v<T, Povm> || std::is_same_v<T, Pvm>) {
                os << " dim=" << o.dim() << " outcomes=" << o.size();
            } else if constexpr (std::is_same_v<T, NaimarkDilation>) {
                const Povm m = reduce_to_povm(o);
                Matrix total = Matrix::Zero(m.dim(), m.dim());
                for (const Matrix &e : m.effects()) {
                    total += e;
                }
                os << " dim_s=" << o.dim_s() << " dim_a=" << o.dim_a() << " outcomes=" << o.size()
                   << " reduced_completeness_residual=" << sci(max_abs_diff(total, identity(m.dim())));
            } else if constexpr (std::is_same_v<T, KrausCorrectionFamily>) {
                os << " dim=" << o.povm().dim() << " outcomes=" << o.povm().size()
                   << " correction_residual=" << sci(correction_condition_residual(o));
            } else if constexpr (std::is_same_v<T, CouplingModel>) {
                os << " dim_s=" << o.dim_s << " dim_a=" << o.dim_a << " unitarity_residual="
                   << sci(unitarity_residual(o.unitary));
            }
        },
        obj);
    std::cout << os.str() << "\n";
    return kExitOk;
}

NaimarkDilation as_dilation(const TypedObject &obj) {
    if (const auto *d = std::get_if<NaimarkDilation>(&obj)) {
        return *d;
    }
    if (const auto *c = std::get_if<CouplingModel>(&obj)) {
        return dilation_from_coupling(*c);
    }
    if (const auto *k = std::get_if<KrausCorrectionFamily>(&obj)) {
        return canonical_dilation_from_kraus(*k);
    }
    throw_parse("expected a dilation, coupling or kraus object, got " + type_name(obj));
}

Povm as_povm(const TypedObject &obj) {
    if (const auto *m = std::get_if<Povm>(&obj)) {
        return *m;
    }
    if (const auto *k = std::get_if<KrausCorrectionFamily>(&obj)) {
        return k->povm();
    }
    if (const auto *q = std::get_if<Pvm>(&obj)) {
        return validate_povm(q->projectors());
    }
    return reduce_to_povm(as_dilation(obj));
}

int cmd_dilate(const std::string &povm_path, const std::string &mode, const std::string &kraus_path,
               const std::string &out) {
    const Povm povm = povm_from_json(read_json_file(povm_path));
    NaimarkDilation d = [&] {
        if (mode == "canonical-luders") {
            const KrausCorrectionFamily k = extract_correction_family(dilation_from_coupling(luders_coupling(povm)));
            return canonical_dilation_from_kraus(k.pruned());
        }
        if (kraus_path.empty()) {
            throw_parse("--kraus is required with --mode from-kraus");
        }
        const KrausCorrectionFamily k = kraus_from_json(read_json_file(kraus_path));
        const double mismatch = povm_distance(k.povm(), povm);
        if (mismatch > kConstructionTolerance) {
            throw_violation("reduction", "Kraus family belongs to a different POVM", mismatch);
        }
        return canonical_dilation_from_kraus(k);
    }();
    const double roundtrip = povm_distance(reduce_to_povm(d), povm);
    if (roundtrip > kConstructionTolerance) {
        throw_violation("reduction", "dilation does not reduce to the input POVM", roundtrip);
    }
    std::cerr << "dilation dim_s=" << d.dim_s() << " dim_a=" << d.dim_a() << " reduction_error=" << sci(roundtrip)
              << "\n";
    emit(out, dump(to_json(d)));
    return kExitOk;
}

int cmd_extract(const std::string &path, const std::string &out) {
    const KrausCorrectionFamily k = extract_correction_family(as_dilation(object_from_json(read_json_file(path))));
    std::cerr << "correction_residual=" << sci(correction_condition_residual(k)) << "\n";
    emit(out, dump(to_json(k)));
    return kExitOk;
}

int cmd_apply(const std::string &state_path, const std::string &object_path, const std::string &rule,
              const std::string &out) {
    const DensityMatrix rho = density_from_json(read_json_file(state_path));
    const TypedObject obj = object_from_json(read_json_file(object_path));
    InstrumentOutput result = [&] {
        if (rule == "projective") {
            if (const auto *q = std::get_if<Pvm>(&obj)) {
                return apply_projective(rho, *q);
            }
            return apply_projective(rho, validate_pvm(as_povm(obj).effects()));
        }
        if (rule == "luders") {
            return apply_luders(rho, as_povm(obj));
        }
        if (rule == "intrinsic") {
            if (const auto *k = std::get_if<KrausCorrectionFamily>(&obj)) {
                return apply_intrinsic_opsum(rho, *k);
            }
            return apply_intrinsic_trace(rho, as_dilation(obj));
        }
        const auto *c = std::get_if<CouplingModel>(&obj);
        if (c == nullptr) {
            throw_parse("the textbook rule needs a coupling object");
        }
        return apply_textbook(rho, *c);
    }();
    emit(out, dump(to_json(result, rule)));
    return kExitOk;
}

std::vector<std::string> split_list(const std::string &s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

template <class T>
std::vector<T> parse_list(const std::string &s, const char *what) {
    std::vector<T> out;
    for (const std::string &item : split_list(s)) {
        std::istringstream is(item);
        T v{};
        if (!(is >> v) || !is.eof()) {
            throw_parse(std::string("cannot parse ") + what + " entry \"" + item + "\"");
        }
        out.push_back(v);
    }
    return out;
}

struct VerifyFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::string dims;
    std::string alphas;
    std::string relations;
    std::optional<double> tol;
    bool inject_broken_kraus = false;
    std::string out;
};

int cmd_verify(const VerifyFlags &f) {
    SweepConfig config = f.config.empty() ? SweepConfig{} : sweep_config_from_json(read_json_file(f.config));
    if (f.seed) {
        config.seed = *f.seed;
    }
    if (f.trials) {
        config.trials = *f.trials;
    }
    if (!f.dims.empty()) {
        config.dims = parse_list<Index>(f.dims, "dims");
    }
    if (!f.alphas.empty()) {
        config.alphas = parse_list<double>(f.alphas, "alphas");
    }
    if (!f.relations.empty()) {
        config.relations = split_list(f.relations);
    }
    if (f.tol) {
        config.tolerance = *f.tol;
    }
    config.inject_broken_kraus = config.inject_broken_kraus || f.inject_broken_kraus;
    config.validate();

    const SweepResult result = run_sweep(config);
    if (!f.out.empty()) {
        emit(f.out, ends_with(f.out, ".csv") ? reports_to_csv(result.reports) : dump(to_json(result)));
    }
    for (const auto &[id, s] : result.summary) {
        std::cout << "summary " << id << " rows=" << s.rows << " failures=" << s.failures
                  << (is_equality_relation(id) ? " max_abs_margin=" : " min_margin=") << sci(s.worst) << "\n";
    }
    if (!result.all_pass()) {
        std::cout << "FAIL failing relations:";
        for (const auto &[id, s] : result.summary) {
            if (s.failures > 0) {
                std::cout << " " << id;
                if (id == "correction_condition") {
                    std::cout << " (sum_l N_{l|i}^dagger N_{l|j} = delta_ij M_i - M_i M_j violated)";
                }
            }
        }
        std::cout << "\nfailing seeds:";
        for (std::uint64_t s : result.failing_seeds) {
            std::cout << " " << s;
        }
        std::cout << "\n";
        return kExitRelation;
    }
    std::cout << "PASS " << result.reports.size() << " rows\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// Scenarios.

std::vector<DensityMatrix> idp_test_states(std::size_t random_count) {
    Vector plus(2);
    plus << 1.0, 1.0;
    std::vector<DensityMatrix> states = {DensityMatrix::pure(basis_ket(2, 0)), DensityMatrix::pure(basis_ket(2, 1)),
                                         DensityMatrix::pure(plus), DensityMatrix::maximally_mixed(2)};
    for (std::size_t k = 0; k < random_count; ++k) {
        states.push_back(random_density(2, 1 + static_cast<Index>(k % 2), mix_seed(0x1d9, k)));
    }
    return states;
}

int cmd_scenario_idp(double beta, const std::string &out) {
    const IdpFixture f = build_idp(beta);
    double closed = 0.0, agree = 0.0;
    for (const DensityMatrix &rho : idp_test_states(100)) {
        const InstrumentOutput q3 = apply_intrinsic_trace(rho, f.dilation_qutrit);
        const InstrumentOutput q2 = apply_intrinsic_trace(rho, f.dilation_qubit);
        const std::vector<Matrix> cf = f.closed_form(rho);
        for (std::size_t i = 0; i < cf.size(); ++i) {
            closed = std::max(closed, (q3.branches[i].state - cf[i]).norm());
        }
        agree = std::max(agree, branch_distance(q3, q2));
    }
    const double wrong_plus = real_trace(ket_bra(f.discriminated(0)) * f.povm.effect(2));
    const double wrong_minus = real_trace(ket_bra(f.discriminated(1)) * f.povm.effect(1));
    const EBlocks e = e_block_decomposition(f.coupling_qutrit);
    const DensityMatrix zero = DensityMatrix::pure(basis_ket(2, 0));

    Json report{{"scenario", "idp"},
                {"beta", beta},
                {"theta", f.theta},
                {"povm", to_json(f.povm)},
                {"coupling_qutrit", to_json(f.coupling_qutrit)},
                {"coupling_qubit", to_json(f.coupling_qubit)},
                {"dilation_qutrit", to_json(f.dilation_qutrit)},
                {"dilation_qubit", to_json(f.dilation_qubit)},
                {"e_block_convention", convention_name(e.convention)},
                {"e_block_residual", e.residual},
                {"intrinsic_on_zero", to_json(apply_intrinsic_trace(zero, f.dilation_qutrit), "intrinsic")},
                {"luders_on_zero", to_json(apply_luders(zero, f.povm), "luders")},
                {"closed_form_max_deviation", closed},
                {"qutrit_vs_qubit_max_deviation", agree},
                {"unambiguity", {{"p2_given_plus", wrong_plus}, {"p1_given_minus", wrong_minus}}}};
    emit(out, dump(report));
    std::cerr << "idp beta=" << beta << " closed_form_max_deviation=" << sci(closed)
              << " qutrit_vs_qubit=" << sci(agree) << "\n";
    const bool ok = closed < 1e-9 && agree < 1e-9 && std::abs(wrong_plus) < 1e-10 && std::abs(wrong_minus) < 1e-10;
    return ok ? kExitOk : kExitRelation;
}

int cmd_scenario_seven(const std::string &out) {
    const SevenOutcomeFixture f = build_seven_outcome();
    const Povm first = validate_povm(group_operators(fine_effects(f.fine, f.fine.ancilla_state()), f.grouping));
    const double reduction = povm_distance(first, f.povm);

    Json runs = Json::array();
    double max_difference = 0.0;
    const DensityMatrix rho = DensityMatrix::maximally_mixed(3);
    for (std::size_t i = 0; i < f.povm.size(); ++i) {
        const RepeatabilityResult r = run_repeatability(f, i, rho);
        max_difference = std::max(max_difference, r.max_difference);
        runs.push_back(Json{{"first_outcome", f.labels[i]},
                            {"probability", r.outcome_probability},
                            {"conditional_ancilla", matrix_to_json(r.conditional_ancilla.mat())},
                            {"second_round", to_json(r.second_round)},
                            {"differences", r.differences},
                            {"max_difference", r.max_difference}});
    }
    const RepeatabilityResult first_outcome = run_repeatability(f, 0, rho);
    Json findings = Json::array();
    for (const RepeatabilityFinding &row : seven_outcome_findings(f, first_outcome)) {
        findings.push_back(Json{{"projector", row.projector},
                                {"quoted", matrix_to_json(row.quoted)},
                                {"from_conditional_ancilla", matrix_to_json(row.from_conditional)},
                                {"from_ancilla_zero", matrix_to_json(row.from_ancilla_zero)},
                                {"deviation_conditional", row.deviation_conditional},
                                {"deviation_ancilla_zero", row.deviation_ancilla_zero}});
    }
    Json report{{"scenario", "seven-outcome"},
                {"povm", to_json(f.povm)},
                {"dilation", to_json(f.fine)},
                {"grouping", f.grouping},
                {"first_round_reduction_error", reduction},
                {"repeatability", std::move(runs)},
                {"findings_first_outcome", std::move(findings)}};
    emit(out, dump(report));
    std::cerr << "seven-outcome reduction_error=" << sci(reduction) << " max_second_round_difference="
              << sci(max_difference) << "\n";
    return (reduction < 1e-10 && first_outcome.max_difference > 0.1) ? kExitOk : kExitRelation;
}

int run(int argc, char **argv) {
    CLI::App app{"nlab: intrinsic measurement back-action toolkit"};
    app.require_subcommand(1);

    std::string out;
    std::string path;
    auto *validate = app.add_subcommand("validate", "Validate a typed JSON object");
    validate->add_option("path", path, "JSON file")->required();

    std::string mode = "canonical-luders";
    std::string kraus;
    auto *dilate = app.add_subcommand("dilate", "Build a Naimark dilation of a POVM");
    dilate->add_option("povm", path, "POVM JSON file")->required();
    dilate->add_option("--mode", mode, "canonical-luders or from-kraus")
        ->check(CLI::IsMember({"canonical-luders", "from-kraus"}));
    dilate->add_option("--kraus", kraus, "Correction family JSON (from-kraus mode)");
    dilate->add_option("--out", out, "Output file (default stdout)");

    auto *extract = app.add_subcommand("extract", "Extract the correction family of a dilation");
    extract->add_option("dilation", path, "Dilation or coupling JSON file")->required();
    extract->add_option("--out", out, "Output file (default stdout)");

    std::string state;
    std::string rule = "intrinsic";
    auto *apply = app.add_subcommand("apply", "Apply a state-update rule");
    apply->add_option("state", state, "Density matrix JSON file")->required();
    apply->add_option("object", path, "PVM, POVM, dilation, kraus or coupling JSON file")->required();
    apply->add_option("--rule", rule, "projective, luders, intrinsic or textbook")
        ->check(CLI::IsMember({"projective", "luders", "intrinsic", "textbook"}));
    apply->add_option("--out", out, "Output file (default stdout)");

    VerifyFlags vf;
    auto *verify = app.add_subcommand("verify", "Run randomized relation sweeps");
    verify->add_option("config", vf.config, "Sweep config JSON file");
    verify->add_option("--seed", vf.seed, "Base seed");
    verify->add_option("--trials", vf.trials, "Number of trials");
    verify->add_option("--dims", vf.dims, "Comma-separated system dimensions");
    verify->add_option("--alphas", vf.alphas, "Comma-separated alpha grid in [0.5, 1)");
    verify->add_option("--relations", vf.relations, "Comma-separated relation ids");
    verify->add_option("--tol", vf.tol, "Tolerance override");
    verify->add_flag("--inject-broken-kraus", vf.inject_broken_kraus, "Append a correction family violating the condition");
    verify->add_option("--out", vf.out, "Report file (.csv or .json)");

    std::string name;
    double beta = std::numbers::pi / 3.0;
    auto *scenario = app.add_subcommand("scenario", "Run a worked fixture");
    scenario->add_option("name", name, "idp or seven-outcome")->required()->check(CLI::IsMember({"idp", "seven-outcome"}));
    scenario->add_option("--beta", beta, "IDP angle in (0, pi/2)");
    scenario->add_option("--out", out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitParse;
    }

    try {
        if (*validate) {
            return cmd_validate(path);
        }
        if (*dilate) {
            return cmd_dilate(path, mode, kraus, out);
        }
        if (*extract) {
            return cmd_extract(path, out);
        }
        if (*apply) {
            return cmd_apply(state, path, rule, out);
        }
        if (*verify) {
            return cmd_verify(vf);
        }
        if (*scenario) {
            return name == "idp" ? cmd_scenario_idp(beta, out) : cmd_scenario_seven(out);
        }
    } catch (const NlabError &e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.kind() == ErrorKind::kParse) {
            return kExitParse;
        }
        std::cerr << "invariant: " << e.invariant() << "\nresidual: " << sci(e.residual()) << "\n";
        return kExitInvalid;
    }
    return kExitParse;
}

}  // namespace

int main(int argc, char **argv) {
    return run(argc, argv);
}
