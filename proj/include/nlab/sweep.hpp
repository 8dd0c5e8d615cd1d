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

// Seeded randomized sweeps over all relation checks.
//
// Trial t draws everything from mix_seed(config.seed, t), so a trial is
// reproducible from its seed alone and results do not depend on the thread
// count. Trials rotate through three realizations: the canonical dilation of
// the Gram correction family of a random POVM, a Haar-random coupling, and a
// random PVM with a mixed ancilla.

#ifndef NLAB_SWEEP_HPP
#define NLAB_SWEEP_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <thread>

#include "nlab/io.hpp"

namespace nlab {

/// Relation ids in report order.
inline const std::vector<std::string> &relation_ids() {
    static const std::vector<std::string> ids = {
        "correction_condition", "dilation_roundtrip",   "path_equivalence",      "randomness_disturbance",
        "gentle_family",        "winter_form",          "uncertainty_disturbance", "shannon_disturbance",
        "info_disturbance",     "classical_randomness", "disturbance_band",      "divergence_monotonicity",
        "balance",              "balance_corollary",    "maassen_uffink",        "maassen_uffink_chain",
        "joint_nondisturbance",
    };
    return ids;
}

inline bool is_equality_relation(const std::string &id) {
    return id == "correction_condition" || id == "dilation_roundtrip" || id == "path_equivalence" ||
           id == "balance" || id == "joint_nondisturbance";
}

struct SweepConfig {
    std::vector<std::string> relations;  // empty selects all
    std::vector<Index> dims = {2, 3};
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    std::vector<double> alphas = {0.5, 0.6, 0.7, 0.8, 0.9};
    double tolerance = kRelationTolerance;
    /// Appends one trial whose correction family violates the correction
    /// condition by 1e-3 (negative control).
    bool inject_broken_kraus = false;

    void validate() const {
        if (trials < 1) {
            throw_domain("sweep config", "trials must be at least 1");
        }
        if (!(tolerance > 0.0)) {
            throw_domain("sweep config", "tolerance must be positive");
        }
        if (dims.empty()) {
            throw_domain("sweep config", "dims must not be empty");
        }
        for (Index d : dims) {
            if (d < 2 || d > 6) {
                throw_domain("sweep config", "dims must lie in [2, 6], got " + std::to_string(d));
            }
        }
        for (double a : alphas) {
            if (!(a >= 0.5 && a < 1.0)) {
                throw_domain("sweep config", "alpha grid must lie in [1/2, 1), got " + std::to_string(a));
            }
        }
        const auto &known = relation_ids();
        for (const std::string &r : relations) {
            if (std::find(known.begin(), known.end(), r) == known.end()) {
                throw_domain("sweep config", "unknown relation \"" + r + "\"");
            }
        }
    }

    bool selected(const std::string &id) const {
        return relations.empty() || std::find(relations.begin(), relations.end(), id) != relations.end();
    }
};

inline SweepConfig sweep_config_from_json(const Json &j) {
    SweepConfig c;
    if (!j.is_object()) {
        throw_parse("sweep config must be a JSON object");
    }
    try {
        if (j.contains("relations")) {
            c.relations = j.at("relations").get<std::vector<std::string>>();
        }
        if (j.contains("dims")) {
            c.dims = j.at("dims").get<std::vector<Index>>();
        }
        if (j.contains("trials")) {
            const long long t = j.at("trials").get<long long>();
            if (t < 1) {
                throw_domain("sweep config", "trials must be at least 1");
            }
            c.trials = static_cast<std::size_t>(t);
        }
        if (j.contains("seed")) {
            c.seed = j.at("seed").get<std::uint64_t>();
        }
        if (j.contains("alphas")) {
            c.alphas = j.at("alphas").get<std::vector<double>>();
        }
        if (j.contains("tolerance")) {
            c.tolerance = j.at("tolerance").get<double>();
        }
        if (j.contains("inject_broken_kraus")) {
            c.inject_broken_kraus = j.at("inject_broken_kraus").get<bool>();
        }
    } catch (const Json::exception &e) {
        throw_parse(std::string("sweep config: ") + e.what());
    }
    c.validate();
    return c;
}

namespace detail {

/// Re-evaluates pass flags under a tolerance override.
inline void apply_tolerance(RelationReport &r, double tol) {
    if (r.skipped) {
        return;
    }
    if (is_equality_relation(r.relation)) {
        r.pass = std::abs(r.margin) <= (r.relation == "path_equivalence" ? std::min(tol, kPathTolerance) : tol);
    } else {
        r.pass = r.margin >= -tol;
    }
}

inline RelationReport error_report(const std::string &relation, const NlabError &e) {
    RelationReport r;
    r.relation = relation;
    r.lhs = e.residual();
    r.margin = -std::numeric_limits<double>::infinity();
    r.pass = false;
    r.note = e.what();
    return r;
}

/// Gram family plus one extra correction level sqrt(amount)|0><0| on outcome 0
/// only: the (0, 0) term of the correction condition is off by exactly
/// `amount` in Frobenius norm and every cross term is untouched.
inline KrausCorrectionFamily broken_family(Index dim, std::uint64_t seed, double amount) {
    const KrausCorrectionFamily good = gram_correction_family(random_povm(dim, 3, seed));
    std::vector<std::vector<Matrix>> corr = good.corrections();
    const std::size_t levels = good.max_index();
    for (auto &row : corr) {
        row.resize(levels + 1, Matrix::Zero(dim, dim));
    }
    corr[0][levels] = std::sqrt(amount) * basis_projector(dim, 0);
    return make_correction_family_unchecked(good.povm(), std::move(corr));
}

}  // namespace detail

/// All selected relations for one seeded trial.
inline std::vector<RelationReport> run_trial(const SweepConfig &config, std::size_t t) {
    const std::uint64_t seed = mix_seed(config.seed, t);
    std::mt19937_64 rng(seed);
    const Index ds = config.dims[t % config.dims.size()];
    const Index n = std::uniform_int_distribution<Index>(2, 5)(rng);
    const Index da = std::uniform_int_distribution<Index>(2, 4)(rng);
    const Index rho_rank = std::uniform_int_distribution<Index>(1, ds)(rng);
    const DensityMatrix rho = random_density(ds, rho_rank, mix_seed(seed, 10));

    std::vector<RelationReport> out;
    auto push = [&](RelationReport r) {
        if (config.selected(r.relation)) {
            r.seed = seed;
            out.push_back(std::move(r));
        }
    };
    auto guarded = [&](const std::string &relation, auto &&body) {
        try {
            body();
        } catch (const NlabError &e) {
            push(detail::error_report(relation, e));
        }
    };

    std::optional<NaimarkDilation> dilation;
    guarded("dilation_roundtrip", [&] {
        switch (t % 3) {
            case 0: {
                const KrausCorrectionFamily family = gram_correction_family(random_povm(ds, n, mix_seed(seed, 11)));
                push(check_correction_condition(family));
                push(check_dilation_roundtrip(family));
                dilation = canonical_dilation_from_kraus(family);
                break;
            }
            case 1:
                dilation = dilation_from_coupling(random_coupling(ds, da, mix_seed(seed, 12)));
                break;
            default: {
                const Index rank = std::uniform_int_distribution<Index>(2, da)(rng);
                dilation = random_dilation(ds, da, std::min<Index>(n, ds * da), rank, mix_seed(seed, 13));
                break;
            }
        }
    });
    if (dilation) {
        guarded("path_equivalence", [&] {
            const IntrinsicContext ctx = make_context(rho, *dilation);
            if (t % 3 != 0) {
                push(check_correction_condition(ctx.family));
            }
            push(check_path_equivalence(ctx));
            push(check_randomness_disturbance(ctx));
            for (RelationReport &r : check_gentle_family(ctx, config.alphas)) {
                push(std::move(r));
            }
            for (RelationReport &r : check_uncertainty_disturbance(ctx, config.alphas)) {
                push(std::move(r));
            }
            push(check_info_disturbance(ctx));
            push(check_classical_randomness(ctx, random_povm(ds, 3, mix_seed(seed, 14))));
            push(check_disturbance_band(ctx));
            push(check_divergence_monotonicity(ctx, config.alphas));
        });
    }
    guarded("balance", [&] {
        for (RelationReport &r : check_balance(rho, random_coupling(ds, da, mix_seed(seed, 15)))) {
            push(std::move(r));
        }
    });
    guarded("maassen_uffink", [&] {
        for (RelationReport &r :
             maassen_uffink_witness(rho, random_unitary(ds, mix_seed(seed, 16)), random_unitary(ds, mix_seed(seed, 17)))) {
            push(std::move(r));
        }
    });
    guarded("joint_nondisturbance", [&] {
        // Fine PVM with n_a * n_b outcomes, grouped by row and by column.
        const Index na = 2;
        const Index nb = 2;
        const NaimarkDilation fine = random_dilation(ds, da, na * nb, 2, mix_seed(seed, 18));
        std::vector<std::size_t> ga, gb;
        for (Index k = 0; k < na * nb; ++k) {
            ga.push_back(static_cast<std::size_t>(k / nb));
            gb.push_back(static_cast<std::size_t>(k % nb));
        }
        push(joint_nondisturbance_construction(fine, ga, gb,
                                               {rho, random_density(ds, ds, mix_seed(seed, 19))}));
    });
    for (RelationReport &r : out) {
        detail::apply_tolerance(r, config.tolerance);
    }
    return out;
}

/// Thread count from NLAB_THREADS (default: hardware concurrency), at least 1.
inline unsigned sweep_threads() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("NLAB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) {
            n = std::min<unsigned>(n, static_cast<unsigned>(v));
        }
    }
    return n;
}

struct RelationSummary {
    std::size_t rows = 0;
    std::size_t failures = 0;
    std::size_t skipped = 0;
    /// Smallest margin for inequalities, largest |margin| for equalities.
    double worst = 0.0;
    bool any = false;
};

struct SweepResult {
    std::vector<RelationReport> reports;
    std::map<std::string, RelationSummary> summary;
    std::vector<std::uint64_t> failing_seeds;

    bool all_pass() const {
        return failing_seeds.empty();
    }
};

inline SweepResult summarize(std::vector<RelationReport> reports) {
    const auto &ids = relation_ids();
    auto rank = [&ids](const std::string &id) {
        return std::find(ids.begin(), ids.end(), id) - ids.begin();
    };
    std::stable_sort(reports.begin(), reports.end(), [&](const RelationReport &a, const RelationReport &b) {
        return rank(a.relation) < rank(b.relation);
    });
    SweepResult result;
    std::set<std::uint64_t> failing;
    for (const RelationReport &r : reports) {
        RelationSummary &s = result.summary[r.relation];
        ++s.rows;
        if (r.skipped) {
            ++s.skipped;
            continue;
        }
        const double value = is_equality_relation(r.relation) ? std::abs(r.margin) : r.margin;
        if (!s.any) {
            s.worst = value;
            s.any = true;
        } else {
            s.worst = is_equality_relation(r.relation) ? std::max(s.worst, value) : std::min(s.worst, value);
        }
        if (!r.pass) {
            ++s.failures;
            failing.insert(r.seed);
        }
    }
    result.reports = std::move(reports);
    result.failing_seeds.assign(failing.begin(), failing.end());
    return result;
}

/// Runs all trials (in parallel up to sweep_threads()) and merges them in
/// trial order, then stably by relation id.
inline SweepResult run_sweep(const SweepConfig &config) {
    config.validate();
    std::vector<std::vector<RelationReport>> per_trial(config.trials);
    const unsigned threads = std::min<unsigned>(sweep_threads(), static_cast<unsigned>(config.trials));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < config.trials; t = next++) {
            per_trial[t] = run_trial(config, t);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
        for (std::thread &th : pool) {
            th.join();
        }
    }
    std::vector<RelationReport> all;
    for (auto &rows : per_trial) {
        std::move(rows.begin(), rows.end(), std::back_inserter(all));
    }
    if (config.inject_broken_kraus) {
        const std::uint64_t seed = mix_seed(config.seed, config.trials);
        RelationReport r = check_correction_condition(detail::broken_family(config.dims.front(), seed, 1e-3));
        r.seed = seed;
        r.note = "injected broken correction family";
        detail::apply_tolerance(r, config.tolerance);
        all.push_back(std::move(r));
    }
    return summarize(std::move(all));
}

inline Json to_json(const SweepResult &result) {
    Json rows = Json::array();
    for (const RelationReport &r : result.reports) {
        rows.push_back(to_json(r));
    }
    Json summary = Json::object();
    for (const auto &[id, s] : result.summary) {
        summary[id] = Json{{"rows", s.rows},
                           {"failures", s.failures},
                           {"skipped", s.skipped},
                           {is_equality_relation(id) ? "max_abs_margin" : "min_margin", detail::real_or_string(s.worst)}};
    }
    return Json{{"pass", result.all_pass()},
                {"failing_seeds", result.failing_seeds},
                {"summary", std::move(summary)},
                {"reports", std::move(rows)}};
}

}  // namespace nlab

#endif
