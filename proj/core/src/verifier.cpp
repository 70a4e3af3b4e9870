#include "ontoscope/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ontoscope/parallel.hpp"

namespace ontoscope::verifier {

namespace {

constexpr std::size_t kMaxWitnesses = 64;

bool witness_less(const Witness& a, const Witness& b) {
    return std::tie(a.kind, a.context_label, a.context2_label, a.effect_key, a.effect2_key,
                    a.lambda_index, a.state_digest, a.state2_digest) <
           std::tie(b.kind, b.context_label, b.context2_label, b.effect_key, b.effect2_key,
                    b.lambda_index, b.state_digest, b.state2_digest);
}

// Canonical order, then cap; witness_total keeps the full count.
void finalize_witnesses(CheckVerdict& verdict) {
    std::sort(verdict.witnesses.begin(), verdict.witnesses.end(), witness_less);
    verdict.witness_total = verdict.witnesses.size();
    if (verdict.witnesses.size() > kMaxWitnesses) verdict.witnesses.resize(kMaxWitnesses);
}

// Evaluation slices: one null slice for lambda-sufficient response rules,
// the registered states otherwise.
std::vector<const Ket*> response_slices(const OntologicalModel& model) {
    if (!model.responses_state_dependent()) return {nullptr};
    std::vector<const Ket*> slices;
    for (const auto& [ket, prep] : model.states()) slices.push_back(&ket);
    if (slices.empty())
        throw MissingDataError("state-dependent model has no registered states to slice on");
    return slices;
}

std::string slice_digest(const Ket* slice) { return slice != nullptr ? slice->digest() : std::string{}; }

// Union response support of a measurement unit at a slice, as a membership mask.
std::vector<char> union_support_mask(const OntologicalModel& model, const ProjectiveContext& unit,
                                     const Ket* slice, double supp_tol) {
    std::vector<char> mask(static_cast<std::size_t>(model.space().size()), 0);
    for (const auto& effect : unit.effects) {
        auto table = model.response_table(effect, unit, slice);
        for (std::size_t i = 0; i < table.size(); ++i) {
            if (table[i] > supp_tol) mask[i] = 1;
        }
    }
    return mask;
}

nlohmann::ordered_json witness_to_json(const Witness& w) {
    return nlohmann::ordered_json{
        {"kind", w.kind},           {"lambda_index", w.lambda_index},
        {"lambda_id", w.lambda_id}, {"state", w.state_digest},
        {"state2", w.state2_digest},{"prep", w.prep},
        {"effect", w.effect_key},   {"effect2", w.effect2_key},
        {"context", w.context_label}, {"context2", w.context2_label},
        {"value", w.value},         {"value2", w.value2},
        {"defect", w.defect}};
}

}  // namespace

bool VerificationReport::all_pass() const {
    for (const auto& c : checks) {
        if (c.applicable && !c.pass) return false;
    }
    return true;
}

std::size_t VerificationReport::coverage_gaps() const {
    std::size_t total = 0;
    for (const auto& c : checks) total += c.coverage_gaps;
    return total;
}

int VerificationReport::exit_code() const {
    if (!all_pass()) return 2;
    if (coverage_gaps() > 0) return 4;
    return 0;
}

nlohmann::ordered_json VerificationReport::to_json() const {
    nlohmann::ordered_json jchecks = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json jw = nlohmann::ordered_json::array();
        for (const auto& w : c.witnesses) jw.push_back(witness_to_json(w));
        jchecks.push_back(nlohmann::ordered_json{{"id", c.id},
                                                 {"applicable", c.applicable},
                                                 {"pass", c.pass},
                                                 {"max_defect", c.max_defect},
                                                 {"witness_total", c.witness_total},
                                                 {"coverage_gaps", c.coverage_gaps},
                                                 {"witnesses", std::move(jw)},
                                                 {"details", c.details}});
    }
    return nlohmann::ordered_json{{"model", model}, {"seed", seed}, {"checks", std::move(jchecks)}};
}

void ContextFamily::validate() const {
    if (contexts.size() < 2)
        throw std::invalid_argument("ContextFamily: need at least two member contexts");
    for (std::size_t k = 0; k < contexts.size(); ++k) {
        if (contexts[k].find_effect(shared_effect) < 0)
            throw std::invalid_argument("ContextFamily: shared effect missing from member " +
                                        contexts[k].label);
    }
}

int ContextFamily::shared_index(int k) const {
    return contexts.at(static_cast<std::size_t>(k)).find_effect(shared_effect);
}

ContextFamily make_family(const ProjectiveContext& base, int shared_index, int members, Rng& rng,
                          int reordered_members) {
    if (members < 2) throw std::invalid_argument("make_family: need at least two members");
    if (reordered_members < 0 || reordered_members > members - 1)
        throw std::invalid_argument("make_family: bad reordered member count");
    if (!validate_context(base).pass) throw std::invalid_argument("make_family: invalid base context");
    const Effect& shared = base.effect(shared_index);
    const Ket& ray = *shared.rank1_ray();
    ContextFamily family{shared, {base}};
    for (int k = 1; k < members; ++k) {
        Rng stream = rng.split(static_cast<std::uint64_t>(k));
        ProjectiveContext ctx =
            random_context_sharing(ray, stream, base.label + "_fam" + std::to_string(k));
        if (k >= members - reordered_members) {
            // Shared effect moves from front to back; ordering is part of M.
            std::rotate(ctx.effects.begin(), ctx.effects.begin() + 1, ctx.effects.end());
            ctx.label += "_rev";
        }
        family.contexts.push_back(std::move(ctx));
    }
    family.validate();
    return family;
}

SupportVerdicts check_support_properties(const OntologicalModel& model, std::span<const Povm> povms,
                                   std::span<const ProjectiveContext> contexts, double supp_tol) {
    SupportVerdicts out;
    out.invariance.id = "support_invariance";
    out.exclusion.id = "orthogonality_exclusion";
    out.disjointness.id = "deterministic_disjointness";

    // Measurement units: POVMs enter as effect-list handles alongside the
    // projective contexts.
    std::vector<ProjectiveContext> units;
    for (std::size_t i = 0; i < povms.size(); ++i) {
        ProjectiveContext handle;
        handle.dim = povms[i].dim;
        handle.effects = povms[i].effects;
        handle.label = "povm" + std::to_string(i);
        units.push_back(std::move(handle));
    }
    units.insert(units.end(), contexts.begin(), contexts.end());

    const auto& ids = model.space().ids;
    std::vector<const Ket*> slices;
    try {
        slices = response_slices(model);
    } catch (const MissingDataError&) {
        out.invariance.coverage_gaps = out.exclusion.coverage_gaps = out.disjointness.coverage_gaps = 1;
        return out;
    }

    // Support invariance: the union response support is the same set for every unit.
    if (units.size() >= 1) {
        for (const Ket* slice : slices) {
            std::vector<char> reference;
            std::string reference_label;
            for (const auto& unit : units) {
                std::vector<char> mask;
                try {
                    mask = union_support_mask(model, unit, slice, supp_tol);
                } catch (const MissingDataError&) {
                    ++out.invariance.coverage_gaps;
                    continue;
                }
                if (reference.empty()) {
                    reference = std::move(mask);
                    reference_label = unit.label;
                    continue;
                }
                for (std::size_t i = 0; i < mask.size(); ++i) {
                    if (mask[i] != reference[i]) {
                        Witness w;
                        w.kind = "support_invariance";
                        w.lambda_index = static_cast<int>(i);
                        w.lambda_id = ids[i];
                        w.state_digest = slice_digest(slice);
                        w.context_label = unit.label;
                        w.context2_label = reference_label;
                        w.value = mask[i];
                        w.value2 = reference[i];
                        w.defect = 1.0;
                        out.invariance.witnesses.push_back(std::move(w));
                    }
                }
            }
        }
    }
    out.invariance.pass = out.invariance.witnesses.empty();
    out.invariance.max_defect = out.invariance.pass ? 0.0 : 1.0;
    finalize_witnesses(out.invariance);

    // Orthogonality exclusion: xi_{E_i} support avoids Supp(rho(.|psi_j)) for i != j.
    // For state-dependent responses the slice is the measured state psi_j.
    for (const auto& ctx : contexts) {
        std::vector<Ket> basis;
        try {
            basis = ctx.basis_states();
        } catch (const std::exception&) {
            ++out.exclusion.coverage_gaps;
            continue;
        }
        for (std::size_t j = 0; j < basis.size(); ++j) {
            const Ket& psi_j = basis[j];
            const Ket* slice = model.responses_state_dependent() ? &psi_j : nullptr;
            const std::vector<double>* rho = nullptr;
            try {
                rho = &model.epistemic_density(psi_j, "P0");
            } catch (const MissingDataError&) {
                ++out.exclusion.coverage_gaps;
                continue;
            }
            for (std::size_t i = 0; i < ctx.effects.size(); ++i) {
                if (i == j) continue;
                std::vector<double> xi;
                try {
                    xi = model.response_table(ctx.effects[i], ctx, slice);
                } catch (const MissingDataError&) {
                    ++out.exclusion.coverage_gaps;
                    continue;
                }
                for (std::size_t l = 0; l < xi.size(); ++l) {
                    if (xi[l] > supp_tol && (*rho)[l] > supp_tol) {
                        Witness w;
                        w.kind = "orthogonality_exclusion";
                        w.lambda_index = static_cast<int>(l);
                        w.lambda_id = ids[l];
                        w.state_digest = psi_j.digest();
                        w.effect_key = ctx.effects[i].key();
                        w.context_label = ctx.label;
                        w.value = xi[l];
                        w.value2 = (*rho)[l];
                        w.defect = std::min(xi[l], (*rho)[l]);
                        out.exclusion.max_defect = std::max(out.exclusion.max_defect, w.defect);
                        out.exclusion.witnesses.push_back(std::move(w));
                    }
                }
            }
        }
    }
    out.exclusion.pass = out.exclusion.witnesses.empty();
    finalize_witnesses(out.exclusion);

    // Deterministic disjointness: for outcome-deterministic models, response supports within a
    // context are pairwise disjoint.
    DeterminismReport determinism;
    try {
        determinism = is_outcome_deterministic(model);
    } catch (const MissingDataError&) {
        out.disjointness.applicable = false;
        out.disjointness.pass = true;
        ++out.disjointness.coverage_gaps;
        finalize_witnesses(out.disjointness);
        return out;
    }
    if (!determinism.deterministic) {
        out.disjointness.applicable = false;
        out.disjointness.pass = true;
        out.disjointness.details["reason"] = "model is not outcome deterministic";
    } else {
        for (const auto& ctx : contexts) {
            for (const Ket* slice : slices) {
                std::vector<std::vector<double>> tables;
                bool gap = false;
                for (const auto& effect : ctx.effects) {
                    try {
                        tables.push_back(model.response_table(effect, ctx, slice));
                    } catch (const MissingDataError&) {
                        gap = true;
                        break;
                    }
                }
                if (gap) {
                    ++out.disjointness.coverage_gaps;
                    continue;
                }
                for (std::size_t i = 0; i < tables.size(); ++i) {
                    for (std::size_t j = i + 1; j < tables.size(); ++j) {
                        for (std::size_t l = 0; l < tables[i].size(); ++l) {
                            if (tables[i][l] > supp_tol && tables[j][l] > supp_tol) {
                                Witness w;
                                w.kind = "deterministic_disjointness";
                                w.lambda_index = static_cast<int>(l);
                                w.lambda_id = ids[l];
                                w.state_digest = slice_digest(slice);
                                w.effect_key = ctx.effects[i].key();
                                w.effect2_key = ctx.effects[j].key();
                                w.context_label = ctx.label;
                                w.value = tables[i][l];
                                w.value2 = tables[j][l];
                                w.defect = std::min(tables[i][l], tables[j][l]);
                                out.disjointness.max_defect = std::max(out.disjointness.max_defect, w.defect);
                                out.disjointness.witnesses.push_back(std::move(w));
                            }
                        }
                    }
                }
            }
        }
        out.disjointness.pass = out.disjointness.witnesses.empty();
    }
    finalize_witnesses(out.disjointness);
    return out;
}

CheckVerdict check_deficiency(const OntologicalModel& model, const Ket& state, const std::string& prep,
                              const ProjectiveContext& context, double supp_tol) {
    CheckVerdict verdict;
    verdict.id = "deficiency";

    int psi_index = -1;
    for (int i = 0; i < context.size(); ++i) {
        const auto& ray = context.effect(i).rank1_ray();
        if (ray && ray->same_ray(state)) {
            psi_index = i;
            break;
        }
    }
    if (psi_index < 0)
        throw std::invalid_argument("check_deficiency: state does not match any ray of context " +
                                    context.label);

    const Effect& effect_psi = context.effect(psi_index);
    const Ket* slice = model.responses_state_dependent() ? &state : nullptr;
    const auto& rho = model.epistemic_density(state, prep);
    const auto xi = model.response_table(effect_psi, context, slice);
    const auto& mu = model.space().measure;
    const auto& ids = model.space().ids;

    bool inclusion = true;
    double gap_measure = 0.0;
    std::size_t supp_rho = 0, supp_xi = 0;
    for (std::size_t l = 0; l < rho.size(); ++l) {
        bool in_rho = rho[l] > supp_tol;
        bool in_xi = xi[l] > supp_tol;
        supp_rho += in_rho;
        supp_xi += in_xi;
        if (in_rho && !in_xi) {
            inclusion = false;
            Witness w;
            w.kind = "deficiency";
            w.lambda_index = static_cast<int>(l);
            w.lambda_id = ids[l];
            w.state_digest = state.digest();
            w.prep = prep;
            w.effect_key = effect_psi.key();
            w.context_label = context.label;
            w.value = rho[l];
            w.value2 = xi[l];
            w.defect = rho[l];
            verdict.max_defect = std::max(verdict.max_defect, w.defect);
            verdict.witnesses.push_back(std::move(w));
        }
        if (in_xi && !in_rho) gap_measure += mu[l];
    }
    bool deficient = inclusion && gap_measure > supp_tol;

    // Contextual-outcome statistic: how many effects shared between registered
    // contexts have context-varying supports, at any registered state slice.
    // Only informative for deterministic models at dim >= 3, where
    // contextuality is forced.
    std::map<std::string, std::vector<const ProjectiveContext*>> classes;
    for (const auto& ctx : model.contexts()) {
        for (const auto& e : ctx.effects) classes[e.key()].push_back(&ctx);
    }
    std::vector<const Ket*> probe_slices{nullptr};
    if (model.responses_state_dependent()) {
        probe_slices.clear();
        for (const auto& [ket, ket_prep] : model.states()) probe_slices.push_back(&ket);
        if (probe_slices.empty()) probe_slices.push_back(&state);
    }
    std::size_t shared_classes = 0;
    std::vector<std::string> varying;
    for (const auto& [key, members] : classes) {
        if (members.size() < 2) continue;
        ++shared_classes;
        bool varies = false;
        for (const Ket* probe_slice : probe_slices) {
            std::vector<int> reference;
            for (const ProjectiveContext* ctx : members) {
                int idx = -1;
                for (int i = 0; i < ctx->size(); ++i) {
                    if (ctx->effect(i).key() == key) idx = i;
                }
                auto table = model.response_table(ctx->effect(idx), *ctx, probe_slice);
                auto supp = support(table, supp_tol);
                if (ctx == members.front()) {
                    reference = std::move(supp);
                } else if (supp != reference) {
                    varies = true;
                }
            }
            if (varies) break;
        }
        if (varies) varying.push_back(key);
    }
    bool outcome_stat_applicable =
        model.metadata().claims_deterministic && model.dim() >= 3 && shared_classes > 0;

    verdict.pass = inclusion;
    verdict.details = nlohmann::ordered_json{
        {"deficient", deficient},
        {"gap_measure", gap_measure},
        {"supp_rho_size", supp_rho},
        {"supp_xi_size", supp_xi},
        {"contextual_outcomes",
         nlohmann::ordered_json{{"applicable", outcome_stat_applicable},
                                {"shared_effect_classes", shared_classes},
                                {"varying_effects", varying},
                                {"flag", !outcome_stat_applicable || varying.size() >= 2}}}};
    finalize_witnesses(verdict);
    return verdict;
}

CheckVerdict check_cross_context(const OntologicalModel& model, const ContextFamily& family,
                                 std::span<const Ket> states, std::span<const std::string> preps,
                                 std::optional<double> tol, double supp_tol) {
    CheckVerdict verdict;
    verdict.id = "cross_context";
    family.validate();
    const double delta_tol = tol.value_or(model.metadata().ctx_tol);
    const std::size_t members = family.contexts.size();
    const auto& mu = model.space().measure;
    const auto& ids = model.space().ids;
    const int n = model.space().size();
    const bool dep = model.responses_state_dependent();

    auto prep_of = [&](std::size_t s) -> std::string {
        return s < preps.size() ? preps[s] : std::string("P0");
    };

    // Shared-effect response tables per member, per state slice when needed.
    std::vector<std::vector<double>> static_tables;
    if (!dep) {
        for (std::size_t k = 0; k < members; ++k) {
            static_tables.push_back(
                model.response_table(family.shared_effect, family.contexts[k], nullptr));
        }
    }

    std::size_t pairs_with_lambda_c = 0;
    std::size_t lambda_c_points = 0;
    double max_density_variance = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t k = 0; k < members; ++k) {
        for (std::size_t l = k + 1; l < members; ++l) pairs.emplace_back(k, l);
    }
    std::set<std::pair<std::size_t, std::size_t>> pairs_seen_contextual;

    for (std::size_t s = 0; s < states.size(); ++s) {
        const Ket& psi = states[s];
        const std::vector<double>* rho_ptr = nullptr;
        const std::vector<std::vector<double>>* tables = &static_tables;
        std::vector<std::vector<double>> slice_tables;
        try {
            rho_ptr = &model.epistemic_density(psi, prep_of(s));
            if (dep) {
                slice_tables.reserve(members);
                for (std::size_t k = 0; k < members; ++k) {
                    slice_tables.push_back(
                        model.response_table(family.shared_effect, family.contexts[k], &psi));
                }
                tables = &slice_tables;
            }
        } catch (const MissingDataError&) {
            ++verdict.coverage_gaps;
            continue;
        }
        const auto& rho = *rho_ptr;
        std::vector<double> mass(members, 0.0);
        for (std::size_t k = 0; k < members; ++k) {
            const auto& xi = (*tables)[k];
            double m = 0.0;
            for (int i = 0; i < n; ++i) {
                const auto u = static_cast<std::size_t>(i);
                m += xi[u] * rho[u] * mu[u];
            }
            mass[k] = m;
        }
        for (const auto& [k, l] : pairs) {
            double delta = std::abs(mass[k] - mass[l]);
            verdict.max_defect = std::max(verdict.max_defect, delta);
            if (delta > delta_tol) {
                Witness w;
                w.kind = "ctx_delta";
                w.state_digest = psi.digest();
                w.prep = prep_of(s);
                w.effect_key = family.shared_effect.key();
                w.context_label = family.contexts[k].label;
                w.context2_label = family.contexts[l].label;
                w.value = mass[k];
                w.value2 = mass[l];
                w.defect = delta;
                verdict.witnesses.push_back(std::move(w));
            }
            std::size_t diff_count = 0;
            const auto& xa = (*tables)[k];
            const auto& xb = (*tables)[l];
            for (int i = 0; i < n; ++i) {
                const auto u = static_cast<std::size_t>(i);
                if (std::abs(xa[u] - xb[u]) > supp_tol) ++diff_count;
            }
            if (diff_count > 0) {
                lambda_c_points += diff_count;
                pairs_seen_contextual.insert({k, l});
            }
        }
        // Density statistic over the union-minus-intersection response region
        // of the shared effect (reported, no pass/fail contract).
        std::size_t region = 0;
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto u = static_cast<std::size_t>(i);
            bool any = false, all = true;
            for (std::size_t k = 0; k < members; ++k) {
                bool in = (*tables)[k][u] > supp_tol;
                any = any || in;
                all = all && in;
            }
            if (any && !all) {
                ++region;
                sum += rho[u];
                sumsq += rho[u] * rho[u];
            }
        }
        if (region > 1) {
            double mean = sum / static_cast<double>(region);
            double variance = sumsq / static_cast<double>(region) - mean * mean;
            max_density_variance = std::max(max_density_variance, variance);
        }
    }
    pairs_with_lambda_c = pairs_seen_contextual.size();

    // Slice-matched interstitial containment: on each pair's basis states chi,
    // the contextual set lambda_c(chi) must avoid Supp(rho(.|chi)). For
    // lambda-sufficient models lambda_c does not depend on the slice, so this
    // is exactly lambda_c disjoint from the union of the basis supports.
    std::size_t containment_checks = 0;
    for (const auto& [k, l] : pairs) {
        const ProjectiveContext& ca = family.contexts[k];
        const ProjectiveContext& cb = family.contexts[l];
        std::vector<Ket> basis;
        for (const auto& ctx : {&ca, &cb}) {
            for (const auto& e : ctx->effects) {
                if (!e.rank1_ray()) continue;
                bool dup = false;
                for (const auto& b : basis) dup = dup || b.same_ray(*e.rank1_ray());
                if (!dup) basis.push_back(*e.rank1_ray());
            }
        }
        for (const auto& chi : basis) {
            const Ket* slice = dep ? &chi : nullptr;
            const std::vector<double>* rho_chi = nullptr;
            try {
                rho_chi = &model.epistemic_density(chi, "P0");
            } catch (const MissingDataError&) {
                ++verdict.coverage_gaps;
                continue;
            }
            std::vector<double> xa, xb;
            try {
                xa = model.response_table(family.shared_effect, ca, slice);
                xb = model.response_table(family.shared_effect, cb, slice);
            } catch (const MissingDataError&) {
                ++verdict.coverage_gaps;
                continue;
            }
            ++containment_checks;
            for (int i = 0; i < n; ++i) {
                const auto u = static_cast<std::size_t>(i);
                double diff = std::abs(xa[u] - xb[u]);
                if (diff > supp_tol && (*rho_chi)[u] > supp_tol) {
                    Witness w;
                    w.kind = "interstitial";
                    w.lambda_index = i;
                    w.lambda_id = ids[u];
                    w.state_digest = chi.digest();
                    w.effect_key = family.shared_effect.key();
                    w.context_label = ca.label;
                    w.context2_label = cb.label;
                    w.value = diff;
                    w.value2 = (*rho_chi)[u];
                    w.defect = std::min(diff, (*rho_chi)[u]);
                    verdict.witnesses.push_back(std::move(w));
                }
            }
        }
    }

    verdict.pass = verdict.witnesses.empty();
    verdict.details = nlohmann::ordered_json{{"members", members},
                                             {"states", states.size()},
                                             {"pairs", pairs.size()},
                                             {"pairs_with_lambda_c", pairs_with_lambda_c},
                                             {"lambda_c_points", lambda_c_points},
                                             {"containment_checks", containment_checks},
                                             {"tol", delta_tol},
                                             {"interstitial_density_variance", max_density_variance}};
    finalize_witnesses(verdict);
    return verdict;
}

CheckVerdict check_lambda_sufficiency(const OntologicalModel& model, std::span<const Ket> states) {
    CheckVerdict verdict;
    verdict.id = "lambda_sufficiency";
    if (!model.responses_state_dependent()) {
        verdict.pass = true;
        verdict.details = nlohmann::ordered_json{{"structural", true}};
        return verdict;
    }
    verdict.details = nlohmann::ordered_json{{"structural", false}, {"states", states.size()}};
    if (states.size() < 2) {
        verdict.coverage_gaps = 1;
        verdict.pass = true;
        return verdict;
    }
    const auto& ids = model.space().ids;
    const int n = model.space().size();
    for (const auto& ctx : model.contexts()) {
        for (const auto& effect : ctx.effects) {
            // Track per-point extremes over states; the spread max-min bounds
            // every pairwise difference.
            std::vector<double> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
            std::vector<int> lo_state(static_cast<std::size_t>(n), 0), hi_state(static_cast<std::size_t>(n), 0);
            bool gap = false;
            for (std::size_t s = 0; s < states.size() && !gap; ++s) {
                std::vector<double> table;
                try {
                    table = model.response_table(effect, ctx, &states[s]);
                } catch (const MissingDataError&) {
                    ++verdict.coverage_gaps;
                    gap = true;
                    break;
                }
                for (int i = 0; i < n; ++i) {
                    const auto u = static_cast<std::size_t>(i);
                    if (s == 0) {
                        lo[u] = hi[u] = table[u];
                    } else {
                        if (table[u] < lo[u]) {
                            lo[u] = table[u];
                            lo_state[u] = static_cast<int>(s);
                        }
                        if (table[u] > hi[u]) {
                            hi[u] = table[u];
                            hi_state[u] = static_cast<int>(s);
                        }
                    }
                }
            }
            if (gap) continue;
            for (int i = 0; i < n; ++i) {
                const auto u = static_cast<std::size_t>(i);
                double spread = hi[u] - lo[u];
                if (spread > kLambdaSuffTol) {
                    Witness w;
                    w.kind = "lambda_dep";
                    w.lambda_index = i;
                    w.lambda_id = ids[u];
                    w.state_digest = states[static_cast<std::size_t>(hi_state[u])].digest();
                    w.state2_digest = states[static_cast<std::size_t>(lo_state[u])].digest();
                    w.effect_key = effect.key();
                    w.context_label = ctx.label;
                    w.value = hi[u];
                    w.value2 = lo[u];
                    w.defect = spread;
                    verdict.max_defect = std::max(verdict.max_defect, spread);
                    verdict.witnesses.push_back(std::move(w));
                }
            }
        }
    }
    verdict.pass = verdict.witnesses.empty();
    finalize_witnesses(verdict);
    return verdict;
}

CheckVerdict check_born_agreement(const OntologicalModel& model, std::span<const Ket> states,
                                  std::span<const std::string> preps,
                                  std::span<const ProjectiveContext> contexts,
                                  std::optional<double> tol) {
    CheckVerdict verdict;
    verdict.id = "born";
    const double born_tol = tol.value_or(model.metadata().born_tol);
    std::size_t triples = 0;

    // Per-state results are computed in parallel slots and merged in order,
    // so the verdict does not depend on scheduling.
    struct Slot {
        std::vector<Witness> witnesses;
        double max_defect = 0.0;
        std::size_t gaps = 0;
        std::size_t triples = 0;
    };
    std::vector<Slot> slots(states.size());
    parallel_for(states.size(), [&](std::size_t s) {
        const Ket& psi = states[s];
        const std::string prep = s < preps.size() ? preps[s] : std::string("P0");
        Slot& slot = slots[s];
        for (const auto& ctx : contexts) {
            for (const auto& effect : ctx.effects) {
                double predicted;
                try {
                    predicted = predicted_probability(model, psi, prep, effect, ctx);
                } catch (const MissingDataError&) {
                    ++slot.gaps;
                    continue;
                }
                ++slot.triples;
                double born = born_probability(psi, effect);
                double defect = std::abs(predicted - born);
                slot.max_defect = std::max(slot.max_defect, defect);
                if (defect > born_tol) {
                    Witness w;
                    w.kind = "born";
                    w.state_digest = psi.digest();
                    w.prep = prep;
                    w.effect_key = effect.key();
                    w.context_label = ctx.label;
                    w.value = predicted;
                    w.value2 = born;
                    w.defect = defect;
                    slot.witnesses.push_back(std::move(w));
                }
            }
        }
    });
    for (auto& slot : slots) {
        verdict.max_defect = std::max(verdict.max_defect, slot.max_defect);
        verdict.coverage_gaps += slot.gaps;
        triples += slot.triples;
        for (auto& w : slot.witnesses) verdict.witnesses.push_back(std::move(w));
    }
    verdict.pass = verdict.witnesses.empty();
    verdict.details = nlohmann::ordered_json{{"triples", triples}, {"tol", born_tol}};
    finalize_witnesses(verdict);
    return verdict;
}

namespace {

// Lookup helpers for replay: resolve labels/digests/keys against extras
// first, then the model registries, then context rays.
const ProjectiveContext* find_context(const OntologicalModel& model, const std::string& label,
                                      std::span<const ProjectiveContext> extra) {
    for (const auto& c : extra) {
        if (c.label == label) return &c;
    }
    for (const auto& c : model.contexts()) {
        if (c.label == label) return &c;
    }
    return nullptr;
}

std::optional<Ket> find_state(const OntologicalModel& model, const std::string& digest,
                              std::span<const ProjectiveContext> extra_contexts,
                              std::span<const Ket> extra_states) {
    if (digest.empty()) return std::nullopt;
    for (const auto& k : extra_states) {
        if (k.digest() == digest) return k;
    }
    for (const auto& [k, prep] : model.states()) {
        if (k.digest() == digest) return k;
    }
    auto scan_ctx = [&](const ProjectiveContext& c) -> std::optional<Ket> {
        for (const auto& e : c.effects) {
            if (e.rank1_ray() && e.rank1_ray()->digest() == digest) return *e.rank1_ray();
        }
        return std::nullopt;
    };
    for (const auto& c : extra_contexts) {
        if (auto k = scan_ctx(c)) return k;
    }
    for (const auto& c : model.contexts()) {
        if (auto k = scan_ctx(c)) return k;
    }
    return std::nullopt;
}

const Effect* find_effect_by_key(const std::string& key, std::span<const ProjectiveContext> pool) {
    for (const auto& c : pool) {
        for (const auto& e : c.effects) {
            if (e.key() == key) return &e;
        }
    }
    return nullptr;
}

}  // namespace

double replay_witness(const OntologicalModel& model, const Witness& w,
                      std::span<const ProjectiveContext> extra_contexts,
                      std::span<const Ket> extra_states) {
    auto require_context = [&](const std::string& label) -> const ProjectiveContext& {
        const ProjectiveContext* c = find_context(model, label, extra_contexts);
        if (c == nullptr) throw std::invalid_argument("replay_witness: unknown context " + label);
        return *c;
    };
    auto require_effect = [&](const std::string& key,
                              const ProjectiveContext& ctx) -> const Effect& {
        for (const auto& e : ctx.effects) {
            if (e.key() == key) return e;
        }
        const Effect* e = find_effect_by_key(key, extra_contexts);
        if (e == nullptr) e = find_effect_by_key(key, {model.contexts().data(), model.contexts().size()});
        if (e == nullptr) throw std::invalid_argument("replay_witness: unknown effect key " + key);
        return *e;
    };
    auto state_of = [&](const std::string& digest) -> std::optional<Ket> {
        return find_state(model, digest, extra_contexts, extra_states);
    };
    auto slice_ptr = [&](const std::optional<Ket>& k) -> const Ket* {
        if (!model.responses_state_dependent()) return nullptr;
        if (!k) throw std::invalid_argument("replay_witness: missing state slice");
        return &*k;
    };
    const auto l = static_cast<std::size_t>(std::max(w.lambda_index, 0));

    if (w.kind == "born") {
        const auto& ctx = require_context(w.context_label);
        const auto& effect = require_effect(w.effect_key, ctx);
        auto psi = state_of(w.state_digest);
        if (!psi) throw std::invalid_argument("replay_witness: unknown state " + w.state_digest);
        double predicted = predicted_probability(model, *psi, w.prep, effect, ctx);
        return std::abs(predicted - born_probability(*psi, effect));
    }
    if (w.kind == "support_invariance") {
        const auto& ca = require_context(w.context_label);
        const auto& cb = require_context(w.context2_label);
        auto psi = state_of(w.state_digest);
        const Ket* slice = model.responses_state_dependent() ? slice_ptr(psi) : nullptr;
        auto ma = union_support_mask(model, ca, slice, kSuppTol);
        auto mb = union_support_mask(model, cb, slice, kSuppTol);
        return std::abs(static_cast<double>(ma[l]) - static_cast<double>(mb[l]));
    }
    if (w.kind == "orthogonality_exclusion") {
        const auto& ctx = require_context(w.context_label);
        const auto& effect = require_effect(w.effect_key, ctx);
        auto chi = state_of(w.state_digest);
        if (!chi) throw std::invalid_argument("replay_witness: unknown state " + w.state_digest);
        auto xi = model.response_table(effect, ctx, model.responses_state_dependent() ? &*chi : nullptr);
        const auto& rho = model.epistemic_density(*chi, w.prep);
        return (xi[l] > kSuppTol && rho[l] > kSuppTol) ? std::min(xi[l], rho[l]) : 0.0;
    }
    if (w.kind == "deterministic_disjointness") {
        const auto& ctx = require_context(w.context_label);
        const auto& ea = require_effect(w.effect_key, ctx);
        const auto& eb = require_effect(w.effect2_key, ctx);
        auto psi = state_of(w.state_digest);
        const Ket* slice = model.responses_state_dependent() ? slice_ptr(psi) : nullptr;
        auto xa = model.response_table(ea, ctx, slice);
        auto xb = model.response_table(eb, ctx, slice);
        return (xa[l] > kSuppTol && xb[l] > kSuppTol) ? std::min(xa[l], xb[l]) : 0.0;
    }
    if (w.kind == "deficiency") {
        const auto& ctx = require_context(w.context_label);
        const auto& effect = require_effect(w.effect_key, ctx);
        auto psi = state_of(w.state_digest);
        if (!psi) throw std::invalid_argument("replay_witness: unknown state " + w.state_digest);
        const auto& rho = model.epistemic_density(*psi, w.prep);
        auto xi = model.response_table(effect, ctx, model.responses_state_dependent() ? &*psi : nullptr);
        return xi[l] <= kSuppTol ? rho[l] : 0.0;
    }
    if (w.kind == "ctx_delta") {
        const auto& ca = require_context(w.context_label);
        const auto& cb = require_context(w.context2_label);
        const auto& effect = require_effect(w.effect_key, ca);
        auto psi = state_of(w.state_digest);
        if (!psi) throw std::invalid_argument("replay_witness: unknown state " + w.state_digest);
        const auto& rho = model.epistemic_density(*psi, w.prep);
        const Ket* slice = model.responses_state_dependent() ? &*psi : nullptr;
        auto xa = model.response_table(effect, ca, slice);
        auto xb = model.response_table(effect, cb, slice);
        const auto& mu = model.space().measure;
        double ma = 0.0, mb = 0.0;
        for (std::size_t i = 0; i < xa.size(); ++i) {
            ma += xa[i] * rho[i] * mu[i];
            mb += xb[i] * rho[i] * mu[i];
        }
        return std::abs(ma - mb);
    }
    if (w.kind == "interstitial") {
        const auto& ca = require_context(w.context_label);
        const auto& cb = require_context(w.context2_label);
        const auto& effect = require_effect(w.effect_key, ca);
        auto chi = state_of(w.state_digest);
        if (!chi) throw std::invalid_argument("replay_witness: unknown state " + w.state_digest);
        const Ket* slice = model.responses_state_dependent() ? &*chi : nullptr;
        auto xa = model.response_table(effect, ca, slice);
        auto xb = model.response_table(effect, cb, slice);
        const auto& rho = model.epistemic_density(*chi, w.prep);
        double diff = std::abs(xa[l] - xb[l]);
        return (diff > kSuppTol && rho[l] > kSuppTol) ? std::min(diff, rho[l]) : 0.0;
    }
    if (w.kind == "lambda_dep") {
        const auto& ctx = require_context(w.context_label);
        const auto& effect = require_effect(w.effect_key, ctx);
        auto sa = state_of(w.state_digest);
        auto sb = state_of(w.state2_digest);
        if (!sa || !sb) throw std::invalid_argument("replay_witness: unknown state pair");
        auto xa = model.response_table(effect, ctx, &*sa);
        auto xb = model.response_table(effect, ctx, &*sb);
        return std::abs(xa[l] - xb[l]);
    }
    if (w.kind == "determinism_claim") {
        bool measured = is_outcome_deterministic(model).deterministic;
        return measured == model.metadata().claims_deterministic ? 0.0 : 1.0;
    }
    if (w.kind == "determinism") {
        const auto& ctx = require_context(w.context_label);
        const auto& effect = require_effect(w.effect_key, ctx);
        auto psi = state_of(w.state_digest);
        const Ket* slice = model.responses_state_dependent() ? slice_ptr(psi) : nullptr;
        auto xi = model.response_table(effect, ctx, slice);
        return std::min(std::abs(xi[l]), std::abs(1.0 - xi[l]));
    }
    if (w.kind == "model_response_norm") {
        const auto& ctx = require_context(w.context_label);
        auto psi = state_of(w.state_digest);
        const Ket* slice = model.responses_state_dependent() ? slice_ptr(psi) : nullptr;
        double sum = 0.0;
        for (const auto& e : ctx.effects) sum += model.response_table(e, ctx, slice)[l];
        return std::abs(sum - 1.0);
    }
    if (w.kind == "model_epistemic_norm") {
        auto psi = state_of(w.state_digest);
        if (!psi) throw std::invalid_argument("replay_witness: unknown state " + w.state_digest);
        const auto& rho = model.epistemic_density(*psi, w.prep);
        const auto& mu = model.space().measure;
        double total = 0.0;
        for (std::size_t i = 0; i < rho.size(); ++i) total += rho[i] * mu[i];
        return std::abs(total - 1.0);
    }
    throw std::invalid_argument("replay_witness: unknown witness kind " + w.kind);
}

VerificationReport run_report(const OntologicalModel& model, const SuiteConfig& config) {
    VerificationReport report;
    report.model = model.metadata().name;
    report.seed = config.seed;

    std::vector<Ket> states;
    std::vector<std::string> preps;
    for (const auto& [ket, prep] : model.states()) {
        states.push_back(ket);
        preps.push_back(prep);
    }

    for (const auto& id : config.checks) {
        if (id == "validate") {
            CheckVerdict verdict;
            verdict.id = "validate";
            std::size_t gaps = 0;
            for (const auto& violation : validate_model(model, &gaps)) {
                Witness w;
                w.kind = "model_" + violation.kind;
                w.lambda_index = violation.lambda_index;
                if (violation.lambda_index >= 0)
                    w.lambda_id = model.space().ids[static_cast<std::size_t>(violation.lambda_index)];
                w.state_digest = violation.state_digest;
                if (!violation.prep.empty()) w.prep = violation.prep;
                w.effect_key = violation.effect_key;
                w.context_label = violation.context_label;
                w.defect = violation.defect;
                verdict.max_defect = std::max(verdict.max_defect, violation.defect);
                verdict.witnesses.push_back(std::move(w));
            }
            verdict.pass = verdict.witnesses.empty();
            verdict.coverage_gaps = gaps;
            finalize_witnesses(verdict);
            report.checks.push_back(std::move(verdict));
        } else if (id == "determinism") {
            CheckVerdict verdict;
            verdict.id = "determinism";
            DeterminismReport measured;
            try {
                measured = is_outcome_deterministic(model);
            } catch (const MissingDataError&) {
                verdict.applicable = false;
                verdict.pass = true;
                verdict.coverage_gaps = 1;
                report.checks.push_back(std::move(verdict));
                continue;
            }
            verdict.pass = measured.deterministic == model.metadata().claims_deterministic;
            verdict.details =
                nlohmann::ordered_json{{"claimed", model.metadata().claims_deterministic},
                                       {"measured", measured.deterministic}};
            if (!measured.deterministic) {
                verdict.details["interior_value"] = measured.value;
                verdict.details["interior_lambda"] = measured.lambda_index;
            }
            if (!verdict.pass) {
                Witness w;
                if (measured.deterministic) {
                    // Claimed indeterministic, measured deterministic: the
                    // defect is the claim mismatch itself.
                    w.kind = "determinism_claim";
                    w.defect = 1.0;
                } else {
                    w.kind = "determinism";
                    w.lambda_index = measured.lambda_index;
                    if (measured.lambda_index >= 0)
                        w.lambda_id = model.space().ids[static_cast<std::size_t>(measured.lambda_index)];
                    w.state_digest = measured.state_digest;
                    w.effect_key = measured.effect_key;
                    w.context_label = measured.context_label;
                    w.value = measured.value;
                    w.defect = std::min(std::abs(measured.value), std::abs(1.0 - measured.value));
                }
                verdict.witnesses.push_back(std::move(w));
            }
            finalize_witnesses(verdict);
            report.checks.push_back(std::move(verdict));
        } else if (id == "born") {
            report.checks.push_back(
                check_born_agreement(model, states, preps, model.contexts(), config.born_tol));
        } else if (id == "support") {
            auto verdicts = check_support_properties(model, {}, model.contexts());
            report.checks.push_back(std::move(verdicts.invariance));
            report.checks.push_back(std::move(verdicts.exclusion));
            report.checks.push_back(std::move(verdicts.disjointness));
        } else if (id == "deficiency") {
            CheckVerdict merged;
            merged.id = "deficiency";
            merged.pass = true;
            std::size_t tested = 0, deficient_count = 0;
            for (std::size_t s = 0; s < states.size(); ++s) {
                const ProjectiveContext* home = nullptr;
                for (const auto& ctx : model.contexts()) {
                    for (const auto& e : ctx.effects) {
                        if (e.rank1_ray() && e.rank1_ray()->same_ray(states[s])) home = &ctx;
                    }
                    if (home != nullptr) break;
                }
                if (home == nullptr) continue;
                CheckVerdict verdict;
                try {
                    verdict = check_deficiency(model, states[s], preps[s], *home);
                } catch (const MissingDataError&) {
                    ++merged.coverage_gaps;
                    continue;
                }
                ++tested;
                if (verdict.details.at("deficient").get<bool>()) ++deficient_count;
                merged.pass = merged.pass && verdict.pass;
                merged.max_defect = std::max(merged.max_defect, verdict.max_defect);
                merged.coverage_gaps += verdict.coverage_gaps;
                for (auto& w : verdict.witnesses) merged.witnesses.push_back(std::move(w));
                if (merged.details.empty()) merged.details["contextual_outcomes"] = verdict.details["contextual_outcomes"];
            }
            merged.applicable = tested > 0;
            merged.details["states_tested"] = tested;
            merged.details["deficient_count"] = deficient_count;
            finalize_witnesses(merged);
            report.checks.push_back(std::move(merged));
        } else if (id == "cross_context") {
            // Families among registered contexts: effects shared by >= 2.
            std::map<std::string, std::vector<const ProjectiveContext*>> classes;
            for (const auto& ctx : model.contexts()) {
                for (const auto& e : ctx.effects) classes[e.key()].push_back(&ctx);
            }
            CheckVerdict merged;
            merged.id = "cross_context";
            merged.pass = true;
            std::size_t families = 0;
            for (const auto& [key, members] : classes) {
                if (members.size() < 2) continue;
                const Effect* shared = nullptr;
                for (const auto& e : members.front()->effects) {
                    if (e.key() == key) shared = &e;
                }
                ContextFamily family{*shared, {}};
                for (const ProjectiveContext* c : members) family.contexts.push_back(*c);
                auto verdict = check_cross_context(model, family, states, preps, config.ctx_tol);
                ++families;
                merged.pass = merged.pass && verdict.pass;
                merged.max_defect = std::max(merged.max_defect, verdict.max_defect);
                merged.coverage_gaps += verdict.coverage_gaps;
                for (auto& w : verdict.witnesses) merged.witnesses.push_back(std::move(w));
                merged.details["family_" + key] = verdict.details;
            }
            merged.applicable = families > 0;
            merged.details["families"] = families;
            finalize_witnesses(merged);
            report.checks.push_back(std::move(merged));
        } else if (id == "lambda_sufficiency") {
            report.checks.push_back(check_lambda_sufficiency(model, states));
        } else {
            throw std::invalid_argument("run_report: unknown check id " + id);
        }
    }
    return report;
}

}  // namespace ontoscope::verifier
