#include <cmath>

#include "doctest.h"
#include "ontoscope/verifier.hpp"
#include "ontoscope/zoo.hpp"

using namespace ontoscope;
using namespace ontoscope::verifier;

namespace {

Ket plus_ket() {
    CVector v(2);
    v << Complex(1.0 / std::sqrt(2.0), 0.0), Complex(1.0 / std::sqrt(2.0), 0.0);
    return Ket(v);
}

Ket uniform_ket(int dim) {
    return Ket(CVector::Constant(dim, Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0.0)));
}

// bb over {|0>, |+>} with the canonical context registered; the measured
// rays are ontic points so every support-check input is available.
OntologicalModel small_bb() {
    auto zero = Ket::basis_state(2, 0);
    auto one = Ket::basis_state(2, 1);
    auto plus = plus_ket();
    auto model = zoo::build_bb_model(2, {zero, plus, one});
    model.register_context(complete_basis({}, 2, "z"));
    model.register_state(zero);
    model.register_state(plus);
    return model;
}

OntologicalModel small_ks() {
    auto model = zoo::build_ks_qubit_model(2000, 3);
    Rng rng(17);
    for (int i = 0; i < 2; ++i) {
        auto psi = random_ket(2, rng);
        model.register_state(psi);
        model.register_context(complete_basis({psi}, 2, "c" + std::to_string(i)));
    }
    return model;
}

OntologicalModel small_bell(int n = 500) {
    auto canonical = complete_basis({}, 3, "canonical");
    auto model = zoo::build_bell_model(3, n, {canonical});
    Rng rng(29);
    model.register_state(uniform_ket(3));
    model.register_state(random_ket(3, rng));
    for (const auto& ray : canonical.basis_states()) model.register_state(ray);
    return model;
}

// Six-point lambda-sufficient deterministic toy with two contexts sharing
// the first effect; the mutation target for constructed violations.
struct ToyFixture {
    ModelSnapshot snap;
    ProjectiveContext m1, m2;
    Ket psi1, psi2, psi3;

    ToyFixture() : m1(complete_basis({}, 3, "m1")), m2(m1), psi1(Ket::basis_state(3, 0)),
                   psi2(Ket::basis_state(3, 1)), psi3(Ket::basis_state(3, 2)) {
        m2.label = "m2";
        snap.metadata.name = "toy6";
        snap.metadata.claims_deterministic = true;
        snap.metadata.claims_lambda_sufficient = true;
        snap.metadata.born_tol = 1e-9;
        snap.metadata.ctx_tol = 1e-9;
        snap.dim = 3;
        snap.space.ids = {"l0", "l1", "l2", "l3", "l4", "l5"};
        snap.space.measure.assign(6, 1.0);
        snap.responses_state_dependent = false;
        snap.contexts = {m1, m2};
        snap.states = {{psi1, "P0"}, {psi2, "P0"}, {psi3, "P0"}};
        snap.epistemic = {
            {psi1.digest(), "P0", {0.5, 0.5, 0.0, 0.0, 0.0, 0.0}},
            {psi2.digest(), "P0", {0.0, 0.0, 0.5, 0.5, 0.0, 0.0}},
            {psi3.digest(), "P0", {0.0, 0.0, 0.0, 0.0, 0.5, 0.5}},
        };
        // Identical response partitions in both contexts: cells {0,1} answer
        // outcome 1, {2,3} outcome 2, {4,5} outcome 3.
        for (const auto* ctx : {&m1, &m2}) {
            snap.responses.push_back({ctx->effect(0).key(), ctx->label, {1, 1, 0, 0, 0, 0}, {}});
            snap.responses.push_back({ctx->effect(1).key(), ctx->label, {0, 0, 1, 1, 0, 0}, {}});
            snap.responses.push_back({ctx->effect(2).key(), ctx->label, {0, 0, 0, 0, 1, 1}, {}});
        }
    }
};

double replay(const OntologicalModel& model, const Witness& w) {
    return verifier::replay_witness(model, w);
}

}  // namespace

TEST_CASE("support properties hold on the zoo models") {
    SUBCASE("bb: disjointness not applicable") {
        auto model = small_bb();
        auto verdicts = check_support_properties(model, {}, model.contexts());
        CHECK(verdicts.invariance.pass);
        CHECK(verdicts.exclusion.pass);
        CHECK_FALSE(verdicts.disjointness.applicable);
    }
    SUBCASE("ks qubit: all three pass") {
        auto model = small_ks();
        auto verdicts = check_support_properties(model, {}, model.contexts());
        CHECK(verdicts.invariance.pass);
        CHECK(verdicts.exclusion.pass);
        CHECK(verdicts.disjointness.applicable);
        CHECK(verdicts.disjointness.pass);
    }
    SUBCASE("bell: all three pass slice by slice") {
        auto model = small_bell();
        auto verdicts = check_support_properties(model, {}, model.contexts());
        CHECK(verdicts.invariance.pass);
        CHECK(verdicts.exclusion.pass);
        CHECK(verdicts.disjointness.applicable);
        CHECK(verdicts.disjointness.pass);
    }
    SUBCASE("bb: a coarse-grained povm leaves the union support invariant") {
        auto model = small_bb();
        Povm povm;
        povm.dim = 2;
        povm.effects = {Effect::from_matrix(0.3 * CMatrix::Identity(2, 2)),
                        Effect::from_matrix(0.7 * CMatrix::Identity(2, 2))};
        std::vector<Povm> povms{povm};
        auto verdicts = check_support_properties(model, povms, model.contexts());
        CHECK(verdicts.invariance.pass);
    }
}

TEST_CASE("support-property mutations are caught with sound witnesses") {
    ToyFixture toy;
    SUBCASE("zeroed response row breaks support invariance") {
        auto snap = toy.snap;
        snap.responses[3].table.assign(6, 0.0);  // m2's first effect
        auto model = OntologicalModel::from_snapshot(snap);
        auto verdicts = check_support_properties(model, {}, model.contexts());
        REQUIRE_FALSE(verdicts.invariance.pass);
        REQUIRE(verdicts.invariance.witness_total >= 1);
        // The zeroed cells are exactly the missing ones.
        for (const auto& w : verdicts.invariance.witnesses) {
            CHECK((w.lambda_index == 0 || w.lambda_index == 1));
            CHECK(std::abs(replay(model, w) - w.defect) <= 1e-12);
        }
    }
    SUBCASE("density mass on a foreign response support breaks the exclusion") {
        auto snap = toy.snap;
        snap.epistemic[1].density = {0.5, 0.0, 0.5, 0.0, 0.0, 0.0};  // psi2 leaks onto cell 0
        auto model = OntologicalModel::from_snapshot(snap);
        auto verdicts = check_support_properties(model, {}, model.contexts());
        REQUIRE_FALSE(verdicts.exclusion.pass);
        REQUIRE(verdicts.exclusion.witness_total >= 1);
        const auto& w = verdicts.exclusion.witnesses.front();
        CHECK(w.lambda_index == 0);
        CHECK(std::abs(replay(model, w) - w.defect) <= 1e-12);
    }
    SUBCASE("overlapping deterministic supports break the disjointness") {
        auto snap = toy.snap;
        snap.responses[1].table = {1, 0, 1, 1, 0, 0};  // m1's second effect grabs cell 0
        auto model = OntologicalModel::from_snapshot(snap);
        auto verdicts = check_support_properties(model, {}, model.contexts());
        REQUIRE(verdicts.disjointness.applicable);
        REQUIRE_FALSE(verdicts.disjointness.pass);
        const auto& w = verdicts.disjointness.witnesses.front();
        CHECK(w.lambda_index == 0);
        CHECK(std::abs(replay(model, w) - w.defect) <= 1e-12);
    }
}

TEST_CASE("deficiency verdicts") {
    SUBCASE("bb is deficient at |0>") {
        auto model = small_bb();
        auto verdict =
            check_deficiency(model, Ket::basis_state(2, 0), "P0", model.contexts().front());
        CHECK(verdict.pass);
        CHECK(verdict.details.at("deficient").get<bool>());
        CHECK(verdict.details.at("gap_measure").get<double>() > 0.5);
    }
    SUBCASE("ks qubit supports agree up to the lattice boundary") {
        auto model = small_ks();
        const auto& ctx = model.contexts().front();
        auto psi = *ctx.effect(0).rank1_ray();
        auto verdict = check_deficiency(model, psi, "P0", ctx);
        CHECK(verdict.pass);
        // No lattice point sits exactly on the equator, so the closed and
        // open hemispheres coincide and the strict gap vanishes.
        CHECK_FALSE(verdict.details.at("deficient").get<bool>());
        CHECK(verdict.details.at("gap_measure").get<double>() == doctest::Approx(0.0));
    }
    SUBCASE("bell eigenstate covers every cell") {
        auto model = small_bell();
        auto verdict =
            check_deficiency(model, Ket::basis_state(3, 0), "P0", model.contexts().front());
        CHECK(verdict.pass);
        CHECK_FALSE(verdict.details.at("deficient").get<bool>());
        CHECK(verdict.details.at("supp_rho_size") == verdict.details.at("supp_xi_size"));
    }
    SUBCASE("state outside the context is rejected") {
        auto model = small_bb();
        CHECK_THROWS_AS(check_deficiency(model, plus_ket(), "P0", model.contexts().front()),
                        std::invalid_argument);
    }
    SUBCASE("contextual-outcome statistic sees multiple varying effects across reorderings") {
        const int n = 500;
        auto canonical = complete_basis({}, 3, "canonical");
        ProjectiveContext rev;
        rev.dim = 3;
        rev.label = "canonical_rev";
        rev.effects.assign(canonical.effects.rbegin(), canonical.effects.rend());
        auto model = zoo::build_bell_model(3, n, {canonical, rev});
        model.register_state(uniform_ket(3));
        for (const auto& ray : canonical.basis_states()) model.register_state(ray);
        auto verdict = check_deficiency(model, Ket::basis_state(3, 0), "P0", canonical);
        auto stat = verdict.details.at("contextual_outcomes");
        CHECK(stat.at("applicable").get<bool>());
        CHECK(stat.at("varying_effects").size() >= 2);
        CHECK(stat.at("flag").get<bool>());
    }
}

TEST_CASE("cross-context constraint on the bell model") {
    const int n = 1000;
    auto canonical = complete_basis({}, 3, "canonical");
    auto model = zoo::build_bell_model(3, n, {canonical});
    Rng rng(101);
    auto family = make_family(canonical, 0, 6, rng, 1);

    std::vector<Ket> states;
    Rng state_rng(55);
    for (int i = 0; i < 8; ++i) states.push_back(random_ket(3, state_rng));

    auto verdict = check_cross_context(model, family, states, {});
    CHECK(verdict.pass);
    CHECK(verdict.max_defect <= 2.0 / n);
    CHECK(verdict.details.at("pairs_with_lambda_c").get<std::size_t>() >= 1);
    CHECK(verdict.witness_total == 0);  // interstitial containment exact
}

TEST_CASE("cross-context constraint on lambda-sufficient models is tight") {
    SUBCASE("bb") {
        auto model = small_bb();
        const auto& base = model.contexts().front();
        Rng rng(7);
        auto family = make_family(base, 0, 4, rng, 0);
        std::vector<Ket> states{Ket::basis_state(2, 0), plus_ket()};
        auto verdict = check_cross_context(model, family, states, {});
        CHECK(verdict.pass);
        CHECK(verdict.max_defect <= 1e-12);
    }
    SUBCASE("ks qubit: responses ignore the context entirely") {
        auto model = small_ks();
        const auto& base = model.contexts().front();
        Rng rng(9);
        auto family = make_family(base, 0, 3, rng, 1);
        std::vector<Ket> states;
        Rng srng(10);
        for (int i = 0; i < 3; ++i) states.push_back(random_ket(2, srng));
        auto verdict = check_cross_context(model, family, states, {});
        CHECK(verdict.pass);
        CHECK(verdict.max_defect == 0.0);
        CHECK(verdict.details.at("pairs_with_lambda_c").get<std::size_t>() == 0);
    }
}

TEST_CASE("constructed cross-context violation fails with a replayable witness") {
    ToyFixture toy;
    auto snap = toy.snap;
    // Enlarge xi_{E_1}(., m2) into psi2's support.
    snap.responses[3].table = {1, 1, 1, 0, 0, 0};
    snap.responses[4].table = {0, 0, 0, 1, 0, 0};
    auto model = OntologicalModel::from_snapshot(snap);
    ContextFamily family{toy.m1.effect(0), {toy.m1, toy.m2}};
    std::vector<Ket> states{toy.psi2};
    auto verdict = check_cross_context(model, family, states, {});
    REQUIRE_FALSE(verdict.pass);
    REQUIRE(verdict.witness_total >= 1);
    bool delta_seen = false;
    for (const auto& w : verdict.witnesses) {
        if (w.kind == "ctx_delta") {
            delta_seen = true;
            CHECK(w.defect > 0.4);
        }
        CHECK(std::abs(replay(model, w) - w.defect) <= 1e-12);
    }
    CHECK(delta_seen);

    // Monotonicity: enlarging the probe state set keeps the failure.
    std::vector<Ket> more{toy.psi2, toy.psi1, toy.psi3, uniform_ket(3)};
    auto snap_with_uniform = snap;
    snap_with_uniform.epistemic.push_back(
        {uniform_ket(3).digest(), "P0", {1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6}});
    auto bigger = OntologicalModel::from_snapshot(snap_with_uniform);
    auto again = check_cross_context(bigger, family, more, {});
    CHECK_FALSE(again.pass);
    CHECK(again.witness_total >= verdict.witness_total);
}

TEST_CASE("lambda sufficiency classification") {
    SUBCASE("bb passes structurally") {
        auto model = small_bb();
        std::vector<Ket> states{Ket::basis_state(2, 0), plus_ket()};
        auto verdict = check_lambda_sufficiency(model, states);
        CHECK(verdict.pass);
        CHECK(verdict.details.at("structural").get<bool>());
    }
    SUBCASE("ks qubit passes structurally") {
        auto model = small_ks();
        auto verdict = check_lambda_sufficiency(model, {});
        CHECK(verdict.pass);
    }
    SUBCASE("bell fails with a two-state witness") {
        auto model = small_bell();
        std::vector<Ket> states{uniform_ket(3), Ket::basis_state(3, 0)};
        auto verdict = check_lambda_sufficiency(model, states);
        REQUIRE_FALSE(verdict.pass);
        REQUIRE(verdict.witness_total >= 1);
        const auto& w = verdict.witnesses.front();
        CHECK(w.state_digest != w.state2_digest);
        CHECK(std::abs(replay(model, w) - w.defect) <= 1e-12);
    }
}

TEST_CASE("born agreement check and coverage gaps") {
    SUBCASE("bb is exact") {
        auto model = small_bb();
        std::vector<Ket> states{Ket::basis_state(2, 0), plus_ket()};
        auto verdict = check_born_agreement(model, states, {}, model.contexts(), std::nullopt);
        CHECK(verdict.pass);
        CHECK(verdict.max_defect <= 1e-12);
        CHECK(verdict.coverage_gaps == 0);
    }
    SUBCASE("missing rows are gaps, not failures") {
        ToyFixture toy;
        auto model = OntologicalModel::from_snapshot(toy.snap);
        Rng rng(77);
        std::vector<Ket> states{random_ket(3, rng)};  // no epistemic table for it
        auto verdict = check_born_agreement(model, states, {}, model.contexts(), std::nullopt);
        CHECK(verdict.pass);
        CHECK(verdict.coverage_gaps > 0);
    }
}

TEST_CASE("failed born witnesses replay") {
    ToyFixture toy;
    auto snap = toy.snap;
    snap.metadata.born_tol = 1e-9;
    auto model = OntologicalModel::from_snapshot(snap);
    // The toy model's predictions are 0/1 on basis states by construction;
    // probing with |psi1> against m1 is exact, so force a defect by lying
    // about the response: cell 2 answers outcome 1 under m1.
    auto broken = snap;
    broken.responses[0].table = {1, 1, 1, 0, 0, 0};
    auto broken_model = OntologicalModel::from_snapshot(broken);
    std::vector<Ket> states{toy.psi2};
    auto verdict = check_born_agreement(broken_model, states, {}, broken_model.contexts(), std::nullopt);
    REQUIRE_FALSE(verdict.pass);
    const auto& w = verdict.witnesses.front();
    CHECK(std::abs(replay(broken_model, w) - w.defect) <= 1e-12);
}

TEST_CASE("run_report composes the suite") {
    SUBCASE("bell: everything passes except lambda sufficiency") {
        auto model = small_bell();
        SuiteConfig config;
        config.checks = kFullSuite;
        auto report = run_report(model, config);
        CHECK_FALSE(report.all_pass());
        CHECK(report.exit_code() == 2);
        std::size_t failing = 0;
        std::string failing_id;
        for (const auto& check : report.checks) {
            if (check.applicable && !check.pass) {
                ++failing;
                failing_id = check.id;
            }
        }
        CHECK(failing == 1);
        CHECK(failing_id == "lambda_sufficiency");
    }
    SUBCASE("bb: full pass with disjointness not applicable") {
        auto model = small_bb();
        SuiteConfig config;
        config.checks = kFullSuite;
        auto report = run_report(model, config);
        CHECK(report.all_pass());
        CHECK(report.exit_code() == 0);
        for (const auto& check : report.checks) {
            if (check.id == "deterministic_disjointness") CHECK_FALSE(check.applicable);
        }
    }
    SUBCASE("empty check list gives an empty passing report") {
        auto model = small_bb();
        SuiteConfig config;
        auto report = run_report(model, config);
        CHECK(report.checks.empty());
        CHECK(report.exit_code() == 0);
    }
    SUBCASE("unknown check id is rejected") {
        auto model = small_bb();
        SuiteConfig config;
        config.checks = {"nosuch"};
        CHECK_THROWS_AS(run_report(model, config), std::invalid_argument);
    }
    SUBCASE("report json carries the contract fields") {
        auto model = small_bb();
        SuiteConfig config;
        config.checks = {"born", "support"};
        config.seed = 9;
        auto j = run_report(model, config).to_json();
        CHECK(j.at("model") == "bb");
        CHECK(j.at("seed") == 9);
        REQUIRE(j.at("checks").size() == 4);  // born + three support verdicts
        for (const auto& check : j.at("checks")) {
            CHECK(check.contains("id"));
            CHECK(check.contains("pass"));
            CHECK(check.contains("max_defect"));
            CHECK(check.contains("witnesses"));
        }
    }
}

TEST_CASE("run_report groups registered contexts into shared-effect families") {
    const int n = 500;
    auto canonical = complete_basis({}, 3, "canonical");
    Rng rng(61);
    auto sibling = random_context_sharing(*canonical.effect(0).rank1_ray(), rng, "sibling");
    auto model = zoo::build_bell_model(3, n, {canonical, sibling});
    model.register_state(uniform_ket(3));
    for (const auto& ctx : model.contexts()) {
        for (const auto& ray : ctx.basis_states()) {
            bool seen = false;
            for (const auto& [s, p] : model.states()) seen = seen || s.digest() == ray.digest();
            if (!seen) model.register_state(ray);
        }
    }
    SuiteConfig config;
    config.checks = {"cross_context"};
    auto report = run_report(model, config);
    REQUIRE(report.checks.size() == 1);
    const auto& verdict = report.checks.front();
    CHECK(verdict.applicable);
    CHECK(verdict.pass);
    CHECK(verdict.details.at("families").get<std::size_t>() == 1);
}

TEST_CASE("full suite on the hemisphere qubit model") {
    auto model = small_ks();
    SuiteConfig config;
    config.checks = kFullSuite;
    auto report = run_report(model, config);
    CHECK(report.all_pass());
    CHECK(report.coverage_gaps() == 0);
    CHECK(report.exit_code() == 0);
}

TEST_CASE("family construction guards and determinism") {
    auto base = complete_basis({}, 3, "base");
    Rng a(100), b(100);
    CHECK_THROWS_AS(make_family(base, 0, 1, a), std::invalid_argument);
    CHECK_THROWS_AS(make_family(base, 0, 3, a, 3), std::invalid_argument);
    auto fam1 = make_family(base, 0, 5, a, 2);
    auto fam2 = make_family(base, 0, 5, b, 2);
    REQUIRE(fam1.contexts.size() == 5);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(fam1.contexts[k].label == fam2.contexts[k].label);
        for (int e = 0; e < 3; ++e) {
            CHECK(fam1.contexts[k].effect(e).key() == fam2.contexts[k].effect(e).key());
        }
    }
    // Reordered members place the shared effect last.
    CHECK(fam1.shared_index(0) == 0);
    CHECK(fam1.shared_index(3) == 2);
    CHECK(fam1.shared_index(4) == 2);
}

TEST_CASE("replay rejects unknown witness kinds") {
    auto model = small_bb();
    Witness w;
    w.kind = "nosuch";
    CHECK_THROWS_AS(verifier::replay_witness(model, w), std::invalid_argument);
}

TEST_CASE("determinism check compares measurement against the claim") {
    ToyFixture toy;
    SUBCASE("matching claim passes") {
        auto model = OntologicalModel::from_snapshot(toy.snap);
        SuiteConfig config;
        config.checks = {"determinism"};
        auto report = run_report(model, config);
        CHECK(report.all_pass());
    }
    SUBCASE("claiming indeterminism for a deterministic model is witnessed") {
        auto snap = toy.snap;
        snap.metadata.claims_deterministic = false;
        auto model = OntologicalModel::from_snapshot(snap);
        SuiteConfig config;
        config.checks = {"determinism"};
        auto report = run_report(model, config);
        REQUIRE_FALSE(report.all_pass());
        const auto& verdict = report.checks.front();
        REQUIRE(verdict.witness_total == 1);
        const auto& w = verdict.witnesses.front();
        CHECK(w.kind == "determinism_claim");
        CHECK(replay(model, w) == doctest::Approx(w.defect));
    }
    SUBCASE("claiming determinism for an interior response is witnessed") {
        auto snap = toy.snap;
        snap.responses[0].table = {0.5, 1, 0, 0, 0, 0};
        snap.responses[1].table = {0.5, 0, 1, 1, 0, 0};
        auto model = OntologicalModel::from_snapshot(snap);
        SuiteConfig config;
        config.checks = {"determinism"};
        auto report = run_report(model, config);
        REQUIRE_FALSE(report.all_pass());
        const auto& w = report.checks.front().witnesses.front();
        CHECK(w.kind == "determinism");
        CHECK(std::abs(replay(model, w) - w.defect) <= 1e-12);
    }
}

TEST_CASE("deterministic response partition covers the space") {
    // The per-context supports of a deterministic model partition the
    // effective space: union everything, pairwise disjoint.
    auto model = small_ks();
    for (const auto& ctx : model.contexts()) {
        std::vector<char> seen(static_cast<std::size_t>(model.space().size()), 0);
        for (const auto& effect : ctx.effects) {
            auto table = model.response_table(effect, ctx);
            for (std::size_t i = 0; i < table.size(); ++i) {
                if (table[i] > kSuppTol) {
                    CHECK(seen[i] == 0);
                    seen[i] = 1;
                }
            }
        }
        for (char c : seen) CHECK(c == 1);
    }
}
