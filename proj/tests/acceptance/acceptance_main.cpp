// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned here, not configurable.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "ontoscope/feasibility.hpp"
#include "ontoscope/verifier.hpp"
#include "ontoscope/zoo.hpp"

using namespace ontoscope;

namespace {

struct Criterion {
    std::string name;
    std::function<void()> body;
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

Ket uniform_ket(int dim) {
    return Ket(CVector::Constant(dim, Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0.0)));
}

std::vector<Ket> haar_states(int count, int dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Ket> out;
    for (int i = 0; i < count; ++i) out.push_back(random_ket(dim, rng));
    return out;
}

std::vector<ProjectiveContext> haar_contexts(int count, int dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ProjectiveContext> out;
    for (int i = 0; i < count; ++i) out.push_back(random_context(dim, rng, "hc" + std::to_string(i)));
    return out;
}

// ---------------------------------------------------------------------------
// C1: Born agreement at the pinned scales.

void criterion_born_agreement() {
    auto states = haar_states(100, 3, 0xC1);
    auto contexts = haar_contexts(10, 3, 0xC2);

    auto bb = zoo::build_bb_model(3, states);
    double worst_bb = 0.0;
    for (const auto& psi : states) {
        for (const auto& ctx : contexts) {
            for (const auto& effect : ctx.effects) {
                double p = predicted_probability(bb, psi, "P0", effect, ctx);
                worst_bb = std::max(worst_bb, std::abs(p - born_probability(psi, effect)));
            }
        }
    }
    require(worst_bb <= 1e-12, "bb exceeds 1e-12: " + std::to_string(worst_bb));

    const int n_grid = 10000;
    auto bell = zoo::build_bell_model(3, n_grid, contexts);
    double worst_bell = 0.0;
    for (const auto& psi : states) {
        for (const auto& ctx : contexts) {
            for (const auto& effect : ctx.effects) {
                double p = predicted_probability(bell, psi, "P0", effect, ctx);
                worst_bell = std::max(worst_bell, std::abs(p - born_probability(psi, effect)));
            }
        }
    }
    require(worst_bell <= 1.0 / n_grid, "bell exceeds 1e-4: " + std::to_string(worst_bell));

    const int n_sphere = 100000;
    auto ks = zoo::build_ks_qubit_model(n_sphere, 0xC3);
    Rng rng(0xC4);
    double worst_ks = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto psi = random_ket(2, rng);
        auto axis = random_ket(2, rng);
        auto ctx = complete_basis(std::vector<Ket>{axis}, 2, "pair");
        for (const auto& effect : ctx.effects) {
            double p = predicted_probability(ks, psi, "P0", effect, ctx);
            worst_ks = std::max(worst_ks, std::abs(p - born_probability(psi, effect)));
        }
    }
    require(worst_ks <= 1e-2, "ks_qubit exceeds 1e-2: " + std::to_string(worst_ks));
}

// ---------------------------------------------------------------------------
// C2: support properties on the zoo plus three caught mutations.

ModelSnapshot toy_snapshot() {
    auto m1 = complete_basis({}, 3, "m1");
    auto m2 = m1;
    m2.label = "m2";
    ModelSnapshot snap;
    snap.metadata.name = "toy6";
    snap.metadata.claims_deterministic = true;
    snap.metadata.claims_lambda_sufficient = true;
    snap.dim = 3;
    snap.space.ids = {"l0", "l1", "l2", "l3", "l4", "l5"};
    snap.space.measure.assign(6, 1.0);
    snap.responses_state_dependent = false;
    snap.contexts = {m1, m2};
    auto psi1 = Ket::basis_state(3, 0);
    auto psi2 = Ket::basis_state(3, 1);
    auto psi3 = Ket::basis_state(3, 2);
    snap.states = {{psi1, "P0"}, {psi2, "P0"}, {psi3, "P0"}};
    snap.epistemic = {{psi1.digest(), "P0", {0.5, 0.5, 0, 0, 0, 0}},
                      {psi2.digest(), "P0", {0, 0, 0.5, 0.5, 0, 0}},
                      {psi3.digest(), "P0", {0, 0, 0, 0, 0.5, 0.5}}};
    for (const auto* ctx : {&m1, &m2}) {
        snap.responses.push_back({ctx->effect(0).key(), ctx->label, {1, 1, 0, 0, 0, 0}, {}});
        snap.responses.push_back({ctx->effect(1).key(), ctx->label, {0, 0, 1, 1, 0, 0}, {}});
        snap.responses.push_back({ctx->effect(2).key(), ctx->label, {0, 0, 0, 0, 1, 1}, {}});
    }
    return snap;
}

void criterion_support_properties() {
    // bb with the measured rays among the points.
    {
        auto states = haar_states(6, 2, 0xA1);
        std::vector<Ket> points = states;
        auto ctx = complete_basis({}, 2, "z");
        for (const auto& k : ctx.basis_states()) points.push_back(k);
        auto bb = zoo::build_bb_model(2, points);
        bb.register_context(ctx);
        for (const auto& s : states) bb.register_state(s);
        auto verdicts = verifier::check_support_properties(bb, {}, bb.contexts());
        require(verdicts.invariance.pass && verdicts.exclusion.pass, "bb invariance/exclusion failed");
        require(!verdicts.disjointness.applicable, "disjointness should be not-applicable on bb");
    }
    // ks qubit.
    {
        auto ks = zoo::build_ks_qubit_model(10000, 0xA2);
        Rng rng(0xA3);
        for (int i = 0; i < 3; ++i) {
            auto psi = random_ket(2, rng);
            ks.register_state(psi);
            ks.register_context(complete_basis(std::vector<Ket>{psi}, 2, "c" + std::to_string(i)));
        }
        auto verdicts = verifier::check_support_properties(ks, {}, ks.contexts());
        require(verdicts.invariance.pass && verdicts.exclusion.pass && verdicts.disjointness.pass,
                "ks_qubit support checks failed");
    }
    // bell.
    {
        auto canonical = complete_basis({}, 3, "canonical");
        auto bell = zoo::build_bell_model(3, 1000, {canonical});
        bell.register_state(uniform_ket(3));
        for (const auto& ray : canonical.basis_states()) bell.register_state(ray);
        auto verdicts = verifier::check_support_properties(bell, {}, bell.contexts());
        require(verdicts.invariance.pass && verdicts.exclusion.pass && verdicts.disjointness.pass,
                "bell support checks failed");
    }
    // Mutations, each caught with a sound witness.
    auto replay_ok = [](const OntologicalModel& model, const verifier::Witness& w) {
        return std::abs(verifier::replay_witness(model, w) - w.defect) <= 1e-12;
    };
    {
        auto snap = toy_snapshot();
        snap.responses[3].table.assign(6, 0.0);
        auto model = OntologicalModel::from_snapshot(snap);
        auto verdicts = verifier::check_support_properties(model, {}, model.contexts());
        require(!verdicts.invariance.pass && verdicts.invariance.witness_total >= 1, "zeroed row not caught");
        require(replay_ok(model, verdicts.invariance.witnesses.front()), "invariance witness not sound");
    }
    {
        auto snap = toy_snapshot();
        snap.epistemic[1].density = {0.5, 0, 0.5, 0, 0, 0};
        auto model = OntologicalModel::from_snapshot(snap);
        auto verdicts = verifier::check_support_properties(model, {}, model.contexts());
        require(!verdicts.exclusion.pass && verdicts.exclusion.witness_total >= 1,
                "overlapping basis support not caught");
        require(replay_ok(model, verdicts.exclusion.witnesses.front()), "exclusion witness not sound");
    }
    {
        auto snap = toy_snapshot();
        snap.responses[1].table = {1, 0, 1, 1, 0, 0};
        auto model = OntologicalModel::from_snapshot(snap);
        auto verdicts = verifier::check_support_properties(model, {}, model.contexts());
        require(verdicts.disjointness.applicable && !verdicts.disjointness.pass && verdicts.disjointness.witness_total >= 1,
                "overlapping deterministic supports not caught");
        require(replay_ok(model, verdicts.disjointness.witnesses.front()), "disjointness witness not sound");
    }
}

// ---------------------------------------------------------------------------
// C3: deficiency on bb at every tested state; contextual-outcome statistic on bell.

void criterion_deficiency() {
    auto states = haar_states(10, 3, 0xB1);
    std::vector<Ket> points = states;
    std::vector<ProjectiveContext> homes;
    for (std::size_t i = 0; i < states.size(); ++i) {
        homes.push_back(
            complete_basis(std::span<const Ket>(&states[i], 1), 3, "h" + std::to_string(i)));
        for (const auto& k : homes.back().basis_states()) points.push_back(k);
    }
    auto bb = zoo::build_bb_model(3, points);
    for (auto& h : homes) bb.register_context(h);
    for (const auto& s : states) bb.register_state(s);
    for (std::size_t i = 0; i < states.size(); ++i) {
        auto verdict = verifier::check_deficiency(bb, states[i], "P0", homes[i]);
        require(verdict.pass, "bb support inclusion failed");
        require(verdict.details.at("deficient").get<bool>(),
                "bb not strictly deficient at state " + std::to_string(i));
    }

    auto canonical = complete_basis({}, 3, "canonical");
    ProjectiveContext rev;
    rev.dim = 3;
    rev.label = "canonical_rev";
    rev.effects.assign(canonical.effects.rbegin(), canonical.effects.rend());
    auto bell = zoo::build_bell_model(3, 1000, {canonical, rev});
    bell.register_state(uniform_ket(3));
    for (const auto& ray : canonical.basis_states()) bell.register_state(ray);
    auto verdict = verifier::check_deficiency(bell, Ket::basis_state(3, 0), "P0", canonical);
    auto stat = verdict.details.at("contextual_outcomes");
    require(stat.at("applicable").get<bool>(), "outcome statistic not applicable");
    require(stat.at("varying_effects").size() >= 2, "fewer than two contextual outcomes");
    require(stat.at("flag").get<bool>(), "outcome statistic flag false");
}

// ---------------------------------------------------------------------------
// C4: cross-context constraint on the Bell model.

void criterion_cross_context() {
    const int n_grid = 10000;
    auto canonical = complete_basis({}, 3, "canonical");
    auto bell = zoo::build_bell_model(3, n_grid, {canonical});
    Rng family_rng(0xD1);
    auto family = verifier::make_family(canonical, 0, 20, family_rng, 1);
    auto states = haar_states(50, 3, 0xD2);

    auto verdict = verifier::check_cross_context(bell, family, states, {});
    require(verdict.max_defect <= 2.0 / n_grid,
            "max delta " + std::to_string(verdict.max_defect) + " above 2/n");
    require(verdict.details.at("pairs_with_lambda_c").get<std::size_t>() >= 1,
            "no pair exhibits a contextual set");
    require(verdict.pass, "interstitial containment violated");

    // Constructed violation: the shared response enlarged into a basis support.
    auto snap = toy_snapshot();
    snap.responses[3].table = {1, 1, 1, 0, 0, 0};
    snap.responses[4].table = {0, 0, 0, 1, 0, 0};
    auto violating = OntologicalModel::from_snapshot(snap);
    verifier::ContextFamily bad_family{snap.contexts[0].effect(0),
                                       {snap.contexts[0], snap.contexts[1]}};
    std::vector<Ket> probe{Ket::basis_state(3, 1)};
    auto bad = verifier::check_cross_context(violating, bad_family, probe, {});
    require(!bad.pass && bad.witness_total >= 1, "constructed violation not caught");
    for (const auto& w : bad.witnesses) {
        require(std::abs(verifier::replay_witness(violating, w) - w.defect) <= 1e-12,
                "cross-context witness not replayable");
    }
}

// ---------------------------------------------------------------------------
// C5: lambda-sufficiency classification.

void criterion_lambda_sufficiency() {
    auto bb = zoo::build_bb_model(2, haar_states(4, 2, 0xE1));
    bb.register_context(complete_basis({}, 2, "z"));
    auto bb_verdict = verifier::check_lambda_sufficiency(bb, {});
    require(bb_verdict.pass, "bb should satisfy lambda sufficiency");

    auto ks = zoo::build_ks_qubit_model(2000, 0xE2);
    auto ks_verdict = verifier::check_lambda_sufficiency(ks, {});
    require(ks_verdict.pass, "ks_qubit should satisfy lambda sufficiency");

    auto canonical = complete_basis({}, 3, "canonical");
    auto bell = zoo::build_bell_model(3, 1000, {canonical});
    std::vector<Ket> states{uniform_ket(3), Ket::basis_state(3, 0)};
    auto bell_verdict = verifier::check_lambda_sufficiency(bell, states);
    require(!bell_verdict.pass, "bell should violate lambda sufficiency");
    require(bell_verdict.witness_total >= 1, "bell violation carries no witness");
    const auto& w = bell_verdict.witnesses.front();
    require(std::abs(verifier::replay_witness(bell, w, {}, states) - w.defect) <= 1e-12,
            "lambda witness not replayable");
}

// ---------------------------------------------------------------------------
// C6: coloring obstruction and search correctness.

void criterion_coloring() {
    using namespace feasibility;
    auto fixture = bks18_rayset();
    auto t0 = std::chrono::steady_clock::now();
    auto result = ks_colorable(fixture);
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require(!result.feasible, "18-ray fixture should be uncolorable");
    require(result.nodes > 0, "exhaustion certificate must carry a node count");
    require(elapsed < 5.0, "fixture search exceeded 5 s");

    Rng rng(0xF1);
    for (int trial = 0; trial < 30; ++trial) {
        auto first = random_context(3, rng, "a");
        std::vector<ProjectiveContext> pair{first};
        if (trial % 2 == 0) {
            pair.push_back(random_context(3, rng, "b"));
        } else {
            int idx = static_cast<int>(rng.next_u64() % 3);
            pair.push_back(random_context_sharing(*first.effect(idx).rank1_ray(), rng, "b"));
        }
        auto rayset = rays_from_contexts(pair);
        require(ks_colorable(rayset).feasible, "two-context ray set should be colorable");
    }

    // Oracle equivalence on 50 random ray sets with <= 20 rays.
    auto enumerate = [](const RaySet& rs) {
        std::vector<std::uint32_t> masks;
        for (const auto& ctx : rs.contexts) {
            std::uint32_t m = 0;
            for (int i : ctx) m |= (1u << i);
            masks.push_back(m);
        }
        for (std::uint64_t a = 0; a < (1ull << rs.rays.size()); ++a) {
            bool ok = true;
            for (std::uint32_t m : masks) {
                if (__builtin_popcount(static_cast<std::uint32_t>(a) & m) != 1) {
                    ok = false;
                    break;
                }
            }
            if (ok) return true;
        }
        return false;
    };
    int checked = 0;
    Rng gen(0xF2);
    while (checked < 50) {
        std::vector<ProjectiveContext> contexts;
        int n_ctx = 2 + static_cast<int>(gen.next_u64() % 4);
        for (int c = 0; c < n_ctx; ++c) {
            if (!contexts.empty() && gen.next_u64() % 2 == 0) {
                const auto& prev = contexts[gen.next_u64() % contexts.size()];
                int idx = static_cast<int>(gen.next_u64() % 3);
                contexts.push_back(
                    random_context_sharing(*prev.effect(idx).rank1_ray(), gen, "c" + std::to_string(c)));
            } else {
                contexts.push_back(random_context(3, gen, "c" + std::to_string(c)));
            }
        }
        auto rayset = rays_from_contexts(contexts);
        if (rayset.rays.size() > 20) continue;
        ++checked;
        require(ks_colorable(rayset).feasible == enumerate(rayset),
                "backtracking disagrees with enumeration");
    }
}

// ---------------------------------------------------------------------------
// C7: the three LP examples.

void criterion_lp() {
    using namespace feasibility;
    auto zero = Ket::basis_state(2, 0);
    auto one = Ket::basis_state(2, 1);
    CVector pv(2);
    pv << Complex(1.0 / std::sqrt(2.0), 0.0), Complex(1.0 / std::sqrt(2.0), 0.0);
    Ket plus(pv);

    // bb witness: point-mass densities, Born targets, recovered responses.
    {
        FeasibilityProblem p;
        p.mode = FeasibilityProblem::Mode::FixRhoSolveXi;
        p.dim = 2;
        p.space.ids = {"p0", "p1", "pplus"};
        p.space.measure = {1.0, 1.0, 1.0};
        p.states = {zero, one, plus};
        p.contexts = {complete_basis({}, 2, "z"),
                      complete_basis(std::vector<Ket>{plus}, 2, "x")};
        p.lambda_sufficient = true;
        p.noncontextual = true;
        p.fixed_rho = {{0, {1, 0, 0}}, {1, {0, 1, 0}}, {2, {0, 0, 1}}};
        for (int s = 0; s < 3; ++s) {
            for (const auto& ctx : p.contexts) {
                for (int e = 0; e < ctx.size(); ++e) {
                    p.targets.push_back({s, ctx.label, e,
                                         born_probability(p.states[static_cast<std::size_t>(s)],
                                                          ctx.effect(e)),
                                         1.0});
                }
            }
        }
        auto result = lp_feasible(p);
        require(result.feasible, "bb witness problem should be feasible");
        require(result.max_residual <= 1e-7, "bb residual above 1e-7");
    }
    // Equal distributions, conflicting targets: infeasible, scaling-invariant.
    {
        FeasibilityProblem p;
        p.mode = FeasibilityProblem::Mode::FixRhoSolveXi;
        p.dim = 2;
        p.space.ids = {"l0", "l1"};
        p.space.measure = {1.0, 1.0};
        p.states = {zero, one, plus};
        p.contexts = {complete_basis({}, 2, "z")};
        p.lambda_sufficient = true;
        p.noncontextual = true;
        p.fixed_rho = {{0, {0.5, 0.5}}, {1, {0.5, 0.5}}, {2, {0.5, 0.5}}};
        p.targets = {{0, "z", 0, 1.0, 1.0}, {0, "z", 1, 0.0, 1.0}, {1, "z", 0, 0.0, 1.0},
                     {1, "z", 1, 1.0, 1.0}, {2, "z", 0, 0.5, 1.0}, {2, "z", 1, 0.5, 1.0}};
        auto result = lp_feasible(p);
        require(!result.feasible, "conflicting targets should be infeasible");
        for (double scale : {0.25, 7.0, 512.0}) {
            auto scaled = p;
            for (auto& t : scaled.targets) t.scale = scale;
            require(!lp_feasible(scaled).feasible, "infeasibility not invariant under row scaling");
        }
    }
    // bell responses with a free density.
    {
        const int n = 120;
        FeasibilityProblem p;
        p.mode = FeasibilityProblem::Mode::FixXiSolveRho;
        p.dim = 3;
        for (int i = 0; i < n; ++i) {
            p.space.ids.push_back("cell" + std::to_string(i));
            p.space.measure.push_back(1.0 / n);
        }
        auto canonical = complete_basis({}, 3, "canonical");
        p.contexts = {canonical};
        auto psi = uniform_ket(3);
        p.states = {psi};
        auto bell = zoo::build_bell_model(3, n, {canonical});
        for (int e = 0; e < 3; ++e) {
            XiTable t;
            t.context_label = "canonical";
            t.effect_index = e;
            t.state_index = 0;
            t.table = bell.response_table(canonical.effect(e), canonical, &psi);
            p.fixed_xi.push_back(std::move(t));
            p.targets.push_back({0, "canonical", e, born_probability(psi, canonical.effect(e)), 1.0});
        }
        auto result = lp_feasible(p);
        require(result.feasible, "bell density problem should be feasible");
        require(result.max_residual <= 1e-7, "bell residual above 1e-7");
    }
}

// ---------------------------------------------------------------------------
// C8: CLI byte-determinism under a fixed seed.

struct TempDir {
    std::string path;
    TempDir() {
        char tmpl[] = "/tmp/ontoscope_acc_XXXXXX";
        if (mkdtemp(tmpl) == nullptr) throw Failure("mkdtemp failed");
        path = tmpl;
    }
    ~TempDir() {
        int rc = std::system(("rm -rf " + path).c_str());
        (void)rc;
    }
    std::string file(const std::string& name) const { return path + "/" + name; }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_cli_determinism() {
    const char* bin = std::getenv("ONTOSCOPE_BIN");
    require(bin != nullptr, "ONTOSCOPE_BIN not set");
    TempDir dir;
    auto run = [&](const std::string& args) {
        std::string cmd = std::string(bin) + " " + args + " >/dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream out(dir.file(name));
        out << text;
    };
    write("states.json", R"({"states": [
        {"dim": 2, "re": [1, 0], "im": [0, 0]},
        {"dim": 2, "re": [0.7071067811865476, 0.7071067811865476], "im": [0, 0]}]})");
    write("ctx.json", R"({"contexts": [{"label": "canonical", "rays": [
        {"dim": 3, "re": [1, 0, 0], "im": [0, 0, 0]},
        {"dim": 3, "re": [0, 1, 0], "im": [0, 0, 0]},
        {"dim": 3, "re": [0, 0, 1], "im": [0, 0, 0]}]}]})");
    write("prob.json", R"({
      "mode": "fix_rho_solve_xi", "dim": 2, "tol": 1e-7,
      "lambda_sufficient": true, "noncontextual": true,
      "ontic": {"ids": ["l0", "l1"], "measure": [1.0, 1.0]},
      "states": [
        {"ket": {"dim": 2, "re": [1, 0], "im": [0, 0]}, "prep": "P0"},
        {"ket": {"dim": 2, "re": [0, 1], "im": [0, 0]}, "prep": "P0"},
        {"ket": {"dim": 2, "re": [0.7071067811865476, 0.7071067811865476], "im": [0, 0]}, "prep": "P0"}],
      "contexts": [{"label": "z", "rays": [
        {"dim": 2, "re": [1, 0], "im": [0, 0]},
        {"dim": 2, "re": [0, 1], "im": [0, 0]}]}],
      "fixed_rho": [
        {"state": 0, "density": [0.5, 0.5]},
        {"state": 1, "density": [0.5, 0.5]},
        {"state": 2, "density": [0.5, 0.5]}],
      "targets": [
        {"state": 0, "context": "z", "effect_index": 0, "p": 1.0},
        {"state": 0, "context": "z", "effect_index": 1, "p": 0.0},
        {"state": 1, "context": "z", "effect_index": 0, "p": 0.0},
        {"state": 1, "context": "z", "effect_index": 1, "p": 1.0},
        {"state": 2, "context": "z", "effect_index": 0, "p": 0.5},
        {"state": 2, "context": "z", "effect_index": 1, "p": 0.5}]
    })");

    struct Step {
        std::string args;
        std::string out;
        int expect;
    };
    std::string fixture = std::string(ONTOSCOPE_FIXTURE_DIR) + "/bks18_d4.json";
    std::vector<Step> steps = {
        {"zoo --model bb --dim 2 --states " + dir.file("states.json"), "bb.json", 0},
        {"zoo --model ks_qubit --n 2000 --seed 7", "ks.json", 0},
        {"zoo --model bell --dim 3 --grid 500 --contexts " + dir.file("ctx.json"), "bell.json", 0},
        {"verify --seed 11 --model @bb.json", "bbrep.json", 0},
        {"verify --seed 11 --model @bell.json", "bellrep.json", 2},
        {"feasibility color --rays " + fixture, "color.json", 3},
        {"feasibility lp --problem " + dir.file("prob.json"), "lp.json", 3},
    };
    for (const auto& step : steps) {
        std::string args = step.args;
        if (auto at = args.find('@'); at != std::string::npos) {
            args = args.substr(0, at) + dir.file(args.substr(at + 1));
        }
        std::string first = dir.file("run1_" + step.out);
        std::string second = dir.file("run2_" + step.out);
        int c1 = run(args + " --out " + first);
        int c2 = run(args + " --out " + second);
        require(c1 == step.expect && c2 == step.expect,
                "unexpected exit codes for: " + step.args + " (" + std::to_string(c1) + "," +
                    std::to_string(c2) + ")");
        require(slurp(first) == slurp(second), "outputs differ for: " + step.args);
        if (step.out == "bb.json" || step.out == "bell.json" || step.out == "ks.json") {
            int rc = std::system(("cp " + first + " " + dir.file(step.out) + " >/dev/null").c_str());
            require(rc == 0, "failed to stage " + step.out);
        }
    }
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {"C1 Born agreement (bb 1e-12, bell 1e-4, ks_qubit 1e-2)", criterion_born_agreement},
        {"C2 support properties + mutations caught", criterion_support_properties},
        {"C3 deficiency on bb, contextual-outcome statistic on bell", criterion_deficiency},
        {"C4 cross-context constraint on a shared-effect family", criterion_cross_context},
        {"C5 lambda-sufficiency verdicts (bb, ks pass; bell fails)", criterion_lambda_sufficiency},
        {"C6 coloring obstruction + search equivalence", criterion_coloring},
        {"C7 LP feasibility triple", criterion_lp},
        {"C8 CLI byte-determinism", criterion_cli_determinism},
    };
    int failures = 0;
    for (auto& criterion : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        try {
            criterion.body();
            auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::printf("[PASS] %s (%.2fs)\n", criterion.name.c_str(), dt);
        } catch (const std::exception& e) {
            auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::printf("[FAIL] %s (%.2fs): %s\n", criterion.name.c_str(), dt, e.what());
            ++failures;
        }
    }
    if (failures == 0) {
        std::printf("acceptance: all %zu criteria pass\n", criteria.size());
    } else {
        std::printf("acceptance: %d criteria FAILED\n", failures);
    }
    return failures == 0 ? 0 : 1;
}
